"""Modified phase-1 marking for tie-free profiles.

Marked pairs are kept (not deleted) so that ranks, and therefore egalitarian
costs, stay those of the input profile.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field

from .errors import DomainError
from .logger import get_logger
from .model import Pair, Profile, pair, require_no_ties

logger = get_logger(__name__)


@dataclass(frozen=True)
class Phase1Result:
    """Fixpoint of the marking procedure."""
    marked: frozenset[Pair]
    first_unmarked: tuple[int | None, ...]
    last_unmarked: tuple[int | None, ...]
    fixed_pairs: frozenset[Pair]
    marked_agents: frozenset[int]
    unmarked_agents: frozenset[int]
    profile: Profile = field(repr=False, compare=False)

    def is_marked(self, x: int, y: int) -> bool:
        return pair(x, y) in self.marked

    @property
    def fixed_agents(self) -> frozenset[int]:
        return frozenset(agent for e in self.fixed_pairs for agent in e)

    @property
    def open_agents(self) -> frozenset[int]:
        """Unmarked agents outside fixed pairs."""
        return self.unmarked_agents - self.fixed_agents

    def first_rank(self, x: int) -> int:
        """``rank_x(first(x))``; only defined for unmarked agents."""
        first = self.first_unmarked[x]
        if first is None:
            raise DomainError(f"agent '{self.profile.names[x]}' has no unmarked entry")
        return self.profile.rank(x, first)


def run_phase1(profile: Profile, order: Sequence[int] | None = None) -> Phase1Result:
    """Run the marking loop until no new pair gets marked.

    Each agent ``u`` looks at its first entry ``w`` with ``{u, w}`` unmarked and
    marks every ``{u', w}`` with ``u`` preferred to ``u'`` by ``w``.

    Args:
        profile: Tie-free profile
        order: Agent order for the outer loop (ascending ids by default)

    Returns:
        Phase1Result
    """
    require_no_ties(profile, "phase-1")
    n = profile.n
    order = list(range(n)) if order is None else list(order)
    if sorted(order) != list(range(n)):
        raise DomainError("order must be a permutation of the agents")

    marked: set[Pair] = set()
    rounds = 0
    changed = True
    while changed:
        changed = False
        rounds += 1
        for u in order:
            w = next((w for w in profile.acceptable(u) if pair(u, w) not in marked), None)
            if w is None:
                continue
            cutoff = profile.rank(w, u)
            for u2 in profile.acceptable(w)[cutoff + 1:]:
                e = pair(u2, w)
                if e not in marked:
                    marked.add(e)
                    changed = True

    first: list[int | None] = []
    last: list[int | None] = []
    for x in range(n):
        free = [y for y in profile.acceptable(x) if pair(x, y) not in marked]
        first.append(free[0] if free else None)
        last.append(free[-1] if free else None)

    fixed = frozenset(
        pair(x, y) for x, y in enumerate(first) if y is not None and first[y] == x
    )
    marked_agents = frozenset(x for x in range(n) if first[x] is None)
    result = Phase1Result(
        marked=frozenset(marked),
        first_unmarked=tuple(first),
        last_unmarked=tuple(last),
        fixed_pairs=fixed,
        marked_agents=marked_agents,
        unmarked_agents=frozenset(range(n)) - marked_agents,
        profile=profile,
    )
    logger.debug(
        f"phase-1: {len(marked)} marked pairs after {rounds} rounds, "
        f"{len(fixed)} fixed pairs, {len(marked_agents)} marked agents"
    )
    return result


def phase1_no_instance(result: Phase1Result, gamma: int) -> bool:
    """True iff phase-1 alone rules out a stable matching of cost at most ``gamma``."""
    if len(result.marked_agents) > gamma:
        return True
    return any(result.first_rank(x) > gamma for x in result.unmarked_agents)
