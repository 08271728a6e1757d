"""Matchings with few blocking pairs or few blocking agents (tie-free profiles).

Both solvers guess the blocking pairs, smallest sets first, and ask whether
some matching is blocked by exactly that set.
"""

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from itertools import combinations

from .errors import DomainError, InvariantViolation
from .logger import get_logger
from .model import Matching, Pair, Profile, blocking_pairs, pair, require_no_ties
from .oracle import iter_stable_matchings

logger = get_logger(__name__)


@dataclass(frozen=True)
class BlockingCertificate:
    """A matching with its blocking pairs and blocking agents."""
    matching: Matching
    pairs: frozenset[Pair]
    agents: frozenset[int]

    @classmethod
    def of(cls, profile: Profile, m: Matching) -> "BlockingCertificate":
        pairs = frozenset(blocking_pairs(profile, m))
        return cls(m, pairs, frozenset(a for e in pairs for a in e))


def subsets_by_size(items: Sequence, max_size: int, min_size: int = 0) -> Iterator[tuple]:
    """Subsets of ``items`` by size, lexicographic within a size."""
    for size in range(min_size, min(max_size, len(items)) + 1):
        yield from combinations(items, size)


def exact_blocking_set_feasible(profile: Profile, blocking: Iterable[Pair]) -> Matching | None:
    """A matching whose blocking pairs are exactly ``blocking``, or None.

    Such a matching avoids ``blocking`` and is stable once those edges are
    deleted, so the stable matchings of the reduced edge set are scanned.
    """
    require_no_ties(profile, "blocking-set feasibility")
    target = frozenset(pair(*e) for e in blocking)
    for e in target:
        if not profile.is_acceptable(*e):
            raise DomainError(f"pair {{{', '.join(profile.pair_names(e))}}} is not an acceptability edge")

    for m in iter_stable_matchings(profile, excluded=target):
        if blocking_pairs(profile, m) == target:
            if not target.isdisjoint(m):
                raise InvariantViolation("a blocking pair is part of its own matching")
            return m
    return None


def min_blocking_pairs(profile: Profile, beta_max: int) -> BlockingCertificate | None:
    """Matching with the fewest blocking pairs, if that number is at most ``beta_max``."""
    require_no_ties(profile, "min-block-pair")
    edges = profile.edges()
    tried = 0
    for candidate in subsets_by_size(edges, beta_max):
        tried += 1
        m = exact_blocking_set_feasible(profile, candidate)
        if m is not None:
            cert = BlockingCertificate.of(profile, m)
            if cert.pairs != frozenset(candidate):
                raise InvariantViolation("blocking pairs differ from the guessed set")
            logger.info(f"min-bp: {len(cert.pairs)} blocking pairs after {tried} guesses")
            return cert
    logger.info(f"min-bp: no matching with at most {beta_max} blocking pairs ({tried} guesses)")
    return None


def min_blocking_agents(profile: Profile, ba_max: int) -> BlockingCertificate | None:
    """Matching with the fewest blocking agents, if that number is at most ``ba_max``.

    Guesses the blocking agents ``S`` and then every set of edges inside ``S``
    that covers ``S``.
    """
    require_no_ties(profile, "min-block-agents")
    tried = 0
    for agents in subsets_by_size(range(profile.n), ba_max):
        if len(agents) == 1:
            continue
        inside = [e for e in combinations(agents, 2) if profile.is_acceptable(*e)]
        wanted = set(agents)
        for candidate in subsets_by_size(inside, len(inside), min_size=(len(agents) + 1) // 2):
            if {a for e in candidate for a in e} != wanted:
                continue
            tried += 1
            m = exact_blocking_set_feasible(profile, candidate)
            if m is not None:
                cert = BlockingCertificate.of(profile, m)
                if cert.agents != frozenset(agents):
                    raise InvariantViolation("blocking agents differ from the guessed set")
                logger.info(f"min-ba: {len(cert.agents)} blocking agents after {tried} guesses")
                return cert
    logger.info(f"min-ba: no matching with at most {ba_max} blocking agents ({tried} guesses)")
    return None
