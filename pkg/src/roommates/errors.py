"""Exceptions raised by the roommates library."""


class RoommatesError(ValueError):
    """Base class for every expected failure (bad input, limits)."""


class DomainError(RoommatesError):
    """Invalid instance or violated precondition."""


class InstanceFormatError(DomainError):
    """Parse failure, pinned to a line and/or agent when known."""

    def __init__(self, message: str, line: int | None = None, agent: str | None = None):
        self.line = line
        self.agent = agent
        where = []
        if line is not None:
            where.append(f"line {line}")
        if agent is not None:
            where.append(f"agent '{agent}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(f"{prefix}{message}")


class CapacityError(RoommatesError):
    """Instance too large for an exhaustive procedure."""


class InvariantViolation(RuntimeError):
    """A solver produced a result that failed re-validation."""
