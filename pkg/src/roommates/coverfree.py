"""Cover-free families for random separation.

An ``(n, p, q)``-cover-free family over ``{0..n-1}`` has, for every set ``S``
of size ``p + q`` and every ``S' ⊆ S`` of size ``p``, a member ``A`` with
``S ∩ A = S'``.

Strategies:
    exhaustive     all ``2^n`` subsets (capped by ``Settings.exhaustive_cap``)
    combinatorial  all subsets of size at most ``p`` (exact, independent of ``q``)
    random         seeded random subsets, each element kept with probability ``p/(p+q)``
"""

import math
import random
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from itertools import combinations

from .config import Settings, get_settings
from .errors import CapacityError, DomainError
from .logger import get_logger

logger = get_logger(__name__)

STRATEGIES = ("exhaustive", "combinatorial", "random")


@dataclass(frozen=True)
class CoverFreeFamily:
    """A family of subsets of ``{0..universe_size-1}``."""
    universe_size: int
    p: int
    q: int
    members: tuple[frozenset[int], ...]
    strategy: str = "exhaustive"
    trials: int | None = None
    seed: int | None = None

    def __post_init__(self):
        for member in self.members:
            if any(not 0 <= x < self.universe_size for x in member):
                raise DomainError("family member leaves the universe")

    def __iter__(self) -> Iterator[frozenset[int]]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)


@dataclass
class VerificationReport:
    """Outcome of checking the separation property."""
    checked: int
    failures: int
    first_failure: tuple[frozenset[int], frozenset[int]] | None = None

    @property
    def ok(self) -> bool:
        return self.failures == 0


def default_trials(p: int, q: int) -> int:
    """Trials that leave a fixed challenge unseparated with probability at most 2^-20."""
    if p == 0 or q == 0:
        return 1
    rho = p / (p + q)
    hit = rho ** p * (1 - rho) ** q
    return math.ceil(20 * math.log(2) / hit)


def iter_combinatorial(
    n: int,
    p: int,
    admissible: Callable[[tuple[int, ...]], bool] | None = None,
) -> Iterator[tuple[int, ...]]:
    """Subsets of ``{0..n-1}`` with at most ``p`` elements, in lexicographic order.

    ``admissible`` prunes the search: a partial subset it rejects is neither
    yielded nor extended. Subsets grow in increasing element order, so the
    predicate only has to hold for every prefix of an admissible subset.
    """
    p = min(p, n)

    def extend(prefix: tuple[int, ...], start: int) -> Iterator[tuple[int, ...]]:
        if len(prefix) == p:
            return
        for x in range(start, n):
            candidate = prefix + (x,)
            if admissible is None or admissible(candidate):
                yield candidate
                yield from extend(candidate, x + 1)

    if admissible is None or admissible(()):
        yield ()
        yield from extend((), 0)


def build_family(
    n: int,
    p: int,
    q: int,
    strategy: str = "exhaustive",
    *,
    trials: int | None = None,
    seed: int = 0,
    strict: bool = True,
    settings: Settings | None = None,
) -> CoverFreeFamily:
    """Build an ``(n, p, q)``-cover-free family.

    Args:
        n: Universe size
        p, q: Separation parameters
        strategy: ``exhaustive``, ``combinatorial`` or ``random``
        trials: Member count for ``random`` (defaults to ``default_trials``)
        seed: PRNG seed for ``random``
        strict: Reject ``p + q > n``
        settings: Limits (process settings by default)

    Returns:
        CoverFreeFamily

    Raises:
        DomainError: bad parameters
        CapacityError: exhaustive family above the configured cap
    """
    settings = settings or get_settings()
    if n < 0 or p < 0 or q < 0:
        raise DomainError("universe size and separation parameters must be nonnegative")
    if strict and p + q > n:
        raise DomainError(f"p + q = {p + q} exceeds the universe size {n}")
    if strategy not in STRATEGIES:
        raise DomainError(f"unknown family strategy '{strategy}'")

    if strategy == "exhaustive":
        if n > settings.exhaustive_cap:
            raise CapacityError(
                f"exhaustive family over {n} elements exceeds the cap of {settings.exhaustive_cap}"
            )
        members = tuple(
            frozenset(c) for size in range(n + 1) for c in combinations(range(n), size)
        )
        return CoverFreeFamily(n, p, q, members, "exhaustive")

    if strategy == "combinatorial":
        members = tuple(frozenset(c) for c in iter_combinatorial(n, p))
        return CoverFreeFamily(n, p, q, members, "combinatorial")

    if trials is None:
        trials = default_trials(p, q)
        if trials > settings.max_random_trials:
            logger.warning(
                f"random family for p={p}, q={q} wants {trials} trials, "
                f"capped at {settings.max_random_trials}"
            )
            trials = settings.max_random_trials
    rng = random.Random(seed)
    rho = p / (p + q) if p + q else 0.0
    members = tuple(frozenset(x for x in range(n) if rng.random() < rho) for _ in range(trials))
    logger.debug(f"random family: n={n} p={p} q={q} trials={trials} seed={seed}")
    return CoverFreeFamily(n, p, q, members, "random", trials, seed)


def _mask(items) -> int:
    value = 0
    for x in items:
        value |= 1 << x
    return value


def verify_property(family: CoverFreeFamily, samples: int | None = None, seed: int = 0) -> VerificationReport:
    """Check the separation property.

    With ``samples=None`` every challenge ``(S, S')`` is checked; otherwise
    ``samples`` random challenges are drawn with a seeded PRNG.
    """
    n = family.universe_size
    size = min(family.p + family.q, n)
    inner = min(family.p, size)
    member_masks = [_mask(m) for m in family.members]

    checked = 0
    failures = 0
    first_failure = None

    def check(s: tuple[int, ...], traces: set[int] | None, s_prime: tuple[int, ...]) -> None:
        nonlocal checked, failures, first_failure
        checked += 1
        target = _mask(s_prime)
        if traces is None:
            s_mask = _mask(s)
            hit = any(m & s_mask == target for m in member_masks)
        else:
            hit = target in traces
        if not hit:
            failures += 1
            if first_failure is None:
                first_failure = (frozenset(s), frozenset(s_prime))

    if samples is None:
        for s in combinations(range(n), size):
            s_mask = _mask(s)
            traces = {m & s_mask for m in member_masks}
            for s_prime in combinations(s, inner):
                check(s, traces, s_prime)
    else:
        rng = random.Random(seed)
        for _ in range(samples):
            s = tuple(sorted(rng.sample(range(n), size)))
            s_prime = tuple(sorted(rng.sample(s, inner)))
            check(s, None, s_prime)

    if failures:
        logger.debug(f"cover-free check: {failures} of {checked} challenges failed")
    return VerificationReport(checked, failures, first_failure)
