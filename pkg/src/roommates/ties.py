"""Egalitarian Stable Roommates with ties and incomplete lists.

The search looks for a *perfect* stable matching of cost at most ``gamma``;
``perfectness_reduction`` turns the general question into that one. Edges of
combined rank 0 are zero edges, edges of combined rank ``1..gamma`` are
costly, everything else can never be part of a solution.

One search iteration guesses a set ``E'`` of costly edges and then a set
``V'`` of agents, and deletes edges in that order:

    unguessed     costly edges outside ``E'``
    mutual harm   pairs of ``E'`` edges that harmlessly block each other
    unprotected   edges critical for an agent outside ``V'``
    induced       ``e'`` whenever ``e`` and ``e'`` induce a blocking pair ``{u, u'}``
                  with ``e`` critical for ``u``

Every perfect matching of what survives is stable, so a minimum-cost perfect
matching finishes the iteration.
"""

from collections.abc import Iterable, Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

from .coverfree import build_family, iter_combinatorial
from .errors import DomainError, InvariantViolation
from .logger import get_logger
from .matchingengine import WeightedGraph, min_cost_perfect_matching
from .model import (
    CostSemantics,
    Matching,
    Pair,
    Profile,
    egalitarian_cost,
    fresh_names,
    is_stable,
    pair,
)

logger = get_logger(__name__)

FAMILIES = ("combinatorial", "exhaustive", "random")


def _other(e: Pair, u: int) -> int:
    return e[1] if e[0] == u else e[0]


@dataclass(frozen=True)
class EdgeClassification:
    """Acceptability edges split by combined rank against ``gamma``."""
    gamma: int
    zero_edges: frozenset[Pair]
    costly_edges: frozenset[Pair]
    discarded: frozenset[Pair]
    cost: dict[Pair, int] = field(repr=False, compare=False)

    @property
    def kept(self) -> frozenset[Pair]:
        """``E1``: zero and costly edges."""
        return self.zero_edges | self.costly_edges


def classify_edges(profile: Profile, gamma: int, excluded: Iterable[Pair] = ()) -> EdgeClassification:
    """Split the acceptability edges (minus ``excluded``) into zero, costly and discarded."""
    excluded = frozenset(pair(*e) for e in excluded)
    zero, costly, discarded = set(), set(), set()
    cost = {}
    for e in profile.edges():
        if e in excluded:
            continue
        c = profile.edge_cost(e)
        cost[e] = c
        if c == 0:
            zero.add(e)
        elif c <= gamma:
            costly.add(e)
        else:
            discarded.add(e)
    return EdgeClassification(gamma, frozenset(zero), frozenset(costly), frozenset(discarded), cost)


@dataclass(frozen=True)
class CriticalityTable:
    """Which costly edges are critical for which endpoint.

    A costly edge ``{u, v}`` is critical for ``u`` when more than ``gamma``
    other agents are weakly preferred to ``v`` by ``u``, and harmless for
    ``u`` otherwise. Zero edges are neither.
    """
    gamma: int
    costly_edges: frozenset[Pair]
    critical: frozenset[tuple[Pair, int]]

    def is_critical(self, e: Pair, u: int) -> bool:
        return (e, u) in self.critical

    def is_harmless(self, e: Pair, u: int) -> bool:
        return e in self.costly_edges and (e, u) not in self.critical

    def critical_endpoints(self, e: Pair) -> tuple[int, ...]:
        return tuple(u for u in e if (e, u) in self.critical)


def criticality_table(
    profile: Profile,
    gamma: int,
    classification: EdgeClassification | None = None,
) -> CriticalityTable:
    classification = classification or classify_edges(profile, gamma)
    critical = frozenset(
        (e, u)
        for e in classification.costly_edges
        for u in e
        if profile.weakly_preferred_count(u, _other(e, u)) > gamma
    )
    return CriticalityTable(gamma, classification.costly_edges, critical)


def induced_blocking_pairs(
    profile: Profile,
    e: Pair,
    f: Pair,
    excluded: frozenset[Pair] = frozenset(),
) -> list[tuple[int, int]]:
    """Pairs ``(u, u2)`` with ``u`` in ``e`` and ``u2`` in ``f`` that block any matching holding both edges."""
    if e[0] in f or e[1] in f:
        return []
    found = []
    for u in e:
        v = _other(e, u)
        for u2 in f:
            if not profile.is_acceptable(u, u2) or pair(u, u2) in excluded:
                continue
            if profile.prefers(u, u2, v) and profile.prefers(u2, u, _other(f, u2)):
                found.append((u, u2))
    return found


def blocks_each_other(profile: Profile, e: Pair, f: Pair, excluded: frozenset[Pair] = frozenset()) -> bool:
    return bool(induced_blocking_pairs(profile, e, f, excluded))


def harmlessly_blocks(
    profile: Profile,
    table: CriticalityTable,
    e: Pair,
    f: Pair,
    excluded: frozenset[Pair] = frozenset(),
) -> bool:
    """True iff ``e`` blocks ``f`` at an endpoint of ``f`` for which ``f`` is harmless."""
    return any(table.is_harmless(f, u2) for _, u2 in induced_blocking_pairs(profile, e, f, excluded))


def harmlessly_blocked_edges(profile: Profile, gamma: int, m: Iterable[Pair]) -> set[Pair]:
    """Edges of ``E1`` outside ``m`` that some edge of ``m`` harmlessly blocks."""
    m = frozenset(m)
    classification = classify_edges(profile, gamma)
    table = criticality_table(profile, gamma, classification)
    return {
        f
        for f in classification.kept - m
        if any(harmlessly_blocks(profile, table, e, f) for e in m)
    }


def culprits(profile: Profile, gamma: int, m: Iterable[Pair], edges: Iterable[Pair] | None = None) -> set[int]:
    """Endpoints of non-matching edges that form a blocking pair with an endpoint of a matching edge.

    ``edges`` defaults to ``E1``.
    """
    m = frozenset(m)
    pool = classify_edges(profile, gamma).kept if edges is None else frozenset(edges)
    found = set()
    for f in pool - m:
        for e in m:
            found.update(u2 for _, u2 in induced_blocking_pairs(profile, e, f))
    return found


@dataclass(frozen=True)
class SeparationContext:
    """One search iteration: the guessed costly edges and the guessed agents."""
    edge_subset: frozenset[Pair]
    agent_subset: frozenset[int]


class EdgeReducer:
    """Precomputed edge relations for one ``(profile, gamma)`` search.

    ``excluded`` pairs are treated as deleted edges that keep the ranks around
    them; ``absent`` agents take no part (all their edges are excluded).
    """

    def __init__(
        self,
        profile: Profile,
        gamma: int,
        excluded: Iterable[Pair] = (),
        absent: Iterable[int] = (),
    ):
        self.profile = profile
        self.gamma = gamma
        self.absent = frozenset(absent)
        dropped = {pair(*e) for e in excluded}
        dropped.update(e for e in profile.edges() if e[0] in self.absent or e[1] in self.absent)
        self.excluded = frozenset(dropped)
        self.active = tuple(x for x in range(profile.n) if x not in self.absent)

        self.classification = classify_edges(profile, gamma, self.excluded)
        self.table = criticality_table(profile, gamma, self.classification)
        self.costly = tuple(sorted(self.classification.costly_edges))
        self.cost = self.classification.cost

        # only costly edges can block each other
        self.conflicts: dict[Pair, set[Pair]] = {e: set() for e in self.costly}
        self.mutually_harmless: set[frozenset[Pair]] = set()
        self.removes: dict[Pair, set[Pair]] = {e: set() for e in self.costly}
        for e, f in combinations(self.costly, 2):
            forward = induced_blocking_pairs(profile, e, f, self.excluded)
            if not forward:
                continue
            backward = [(u2, u) for u, u2 in forward]
            self.conflicts[e].add(f)
            self.conflicts[f].add(e)
            if any(self.table.is_harmless(f, u2) for _, u2 in forward) and any(
                self.table.is_harmless(e, u) for u, _ in forward
            ):
                self.mutually_harmless.add(frozenset((e, f)))
            if any(self.table.is_critical(e, u) for u, _ in forward):
                self.removes[e].add(f)
            if any(self.table.is_critical(f, u2) for u2, _ in backward):
                self.removes[f].add(e)

    def prune_edges(self, edge_subset: Iterable[Pair]) -> frozenset[Pair]:
        """Drop unguessed costly edges, then mutually harmless pairs."""
        chosen = frozenset(edge_subset) & self.classification.costly_edges
        doomed = set()
        for e, f in combinations(sorted(chosen), 2):
            if frozenset((e, f)) in self.mutually_harmless:
                doomed.update((e, f))
        return self.classification.zero_edges | (chosen - doomed)

    def prune_agents(self, edges: frozenset[Pair], agent_subset: Iterable[int]) -> frozenset[Pair]:
        """Drop unprotected critical edges, then edges losing an induced blocking pair."""
        keep = frozenset(agent_subset)
        table = self.table
        survivors = {e for e in edges if all(y in keep or not table.is_critical(e, y) for y in e)}
        doomed = {f for e in survivors if e in self.removes for f in self.removes[e] if f in survivors}
        return frozenset(survivors - doomed)

    def reduce(self, context: SeparationContext) -> frozenset[Pair]:
        return self.prune_agents(self.prune_edges(context.edge_subset), context.agent_subset)

    def critical_agents(self, edges: Iterable[Pair]) -> list[int]:
        return sorted({u for e in edges for u in self.table.critical_endpoints(e)})

    def perfect_matching(self, edges: Iterable[Pair]) -> tuple[Matching, int] | None:
        """Minimum-cost matching of ``edges`` covering every active agent."""
        index = {x: i for i, x in enumerate(self.active)}
        graph = WeightedGraph(
            len(self.active),
            tuple((index[u], index[v], self.cost[(u, v)]) for u, v in edges),
        )
        found = min_cost_perfect_matching(graph)
        if found is None:
            return None
        m, total = found
        return frozenset(pair(self.active[i], self.active[j]) for i, j in m), total

    def is_stable(self, m: Matching) -> bool:
        mate = {}
        for x, y in m:
            mate[x], mate[y] = y, x
        profile = self.profile
        for x, y in profile.edges():
            if (x, y) in m or (x, y) in self.excluded:
                continue
            if profile.prefers(x, y, mate.get(x)) and profile.prefers(y, x, mate.get(y)):
                return False
        return True

    def guess_groups(self, interchangeable: Sequence[int] = ()) -> tuple[frozenset[Pair], ...]:
        """Universe of the exhaustive and random families.

        Costly edges from one agent to the ``interchangeable`` agents form a
        single element; every other costly edge is an element of its own.
        """
        symmetric = frozenset(interchangeable)
        groups: list[frozenset[Pair]] = []
        shared: dict[int, set[Pair]] = {}
        for e in self.costly:
            outside = [u for u in e if u not in symmetric]
            if len(outside) == 1:
                shared.setdefault(outside[0], set()).add(e)
            else:
                groups.append(frozenset((e,)))
        groups.extend(frozenset(shared[u]) for u in sorted(shared))
        return tuple(groups)

    def edge_members(
        self,
        family: str,
        seed: int,
        trials: int | None,
        interchangeable: Sequence[int] = (),
    ) -> Iterator[frozenset[Pair]]:
        """Edge guesses for ``E'``.

        The combinatorial family walks every set of pairwise disjoint,
        pairwise non-blocking costly edges of total cost at most ``gamma``,
        which always contains the costly part of a solution. Agents listed in
        ``interchangeable`` must be symmetric in the profile; only the guess
        that uses them in list order is produced. The other families range
        over ``guess_groups``.
        """
        costly = self.costly
        if family != "combinatorial":
            groups = self.guess_groups(interchangeable)
            built = build_family(
                len(groups), self.gamma, self.gamma ** 3, family, trials=trials, seed=seed, strict=False
            )
            for member in built:
                yield frozenset().union(*(groups[i] for i in member))
            return

        order = tuple(interchangeable)
        symmetric = frozenset(order)

        def admissible(candidate: tuple[int, ...]) -> bool:
            if not candidate:
                return True
            new = costly[candidate[-1]]
            earlier = [costly[i] for i in candidate[:-1]]
            if sum(self.cost[e] for e in earlier) + self.cost[new] > self.gamma:
                return False
            for e in earlier:
                if e[0] in new or e[1] in new or e in self.conflicts[new]:
                    return False
            if symmetric:
                used = [u for e in earlier for u in e if u in symmetric]
                for u in new:
                    if u in symmetric:
                        if len(used) >= len(order) or order[len(used)] != u:
                            return False
                        used.append(u)
            return True

        for candidate in iter_combinatorial(len(costly), self.gamma, admissible):
            yield frozenset(costly[i] for i in candidate)

    def agent_members(
        self,
        edges: frozenset[Pair],
        edge_subset: frozenset[Pair],
        family: str,
        seed: int,
        trials: int | None,
    ) -> Iterator[frozenset[int]]:
        """Agent guesses for ``V'`` over the agents with a critical edge left."""
        if family == "combinatorial":
            yield frozenset(self.critical_agents(edge_subset & edges))
            return
        universe = self.critical_agents(edges)
        if not universe:
            yield frozenset()
            return
        built = build_family(
            len(universe), 2 * self.gamma, self.gamma ** 2 + 2 * self.gamma, family,
            trials=trials, seed=seed, strict=False,
        )
        for member in built:
            yield frozenset(universe[i] for i in member)

    def scan(
        self,
        members: Iterable[frozenset[Pair]],
        start: int,
        family: str,
        seed: int,
        trials: int | None,
        optimal: bool,
    ) -> tuple[int, Matching, int] | None:
        """Run the rules for every edge guess; ``(guess index, matching, cost)`` of the answer."""
        best: tuple[int, Matching, int] | None = None
        tried: set[frozenset[Pair]] = set()
        evaluated = 0
        for index, edge_subset in enumerate(members, start):
            edges = self.prune_edges(edge_subset)
            if edges in tried:
                continue
            tried.add(edges)
            bound = self.perfect_matching(edges)
            if bound is None or bound[1] > self.gamma:
                continue
            if best is not None and bound[1] > best[2]:
                continue

            seen: set[frozenset[Pair]] = set()
            for agent_subset in self.agent_members(edges, edge_subset, family, seed + 1, trials):
                reduced = self.prune_agents(edges, agent_subset)
                if reduced in seen:
                    continue
                seen.add(reduced)
                evaluated += 1
                found = self.perfect_matching(reduced)
                if found is None or found[1] > self.gamma:
                    continue
                m, cost = found
                if not self.is_stable(m):
                    raise InvariantViolation("a perfect matching of the reduced edge set is not stable")
                if not optimal:
                    logger.debug(f"separation: hit at guess {index} after {evaluated} reduced edge sets")
                    return index, m, cost
                if best is None or (cost, sorted(m)) < (best[2], sorted(best[1])):
                    best = (index, m, cost)
        logger.debug(f"separation: {evaluated} reduced edge sets from guesses starting at {start}")
        return best


def reduce_edges(
    profile: Profile,
    gamma: int,
    context: SeparationContext,
    *,
    excluded: Iterable[Pair] = (),
    absent: Iterable[int] = (),
) -> frozenset[Pair]:
    """Edge set left by the four deletions for one ``(E', V')`` guess."""
    return EdgeReducer(profile, gamma, excluded, absent).reduce(context)


def edge_universe(profile: Profile, gamma: int) -> tuple[frozenset[Pair], ...]:
    """Elements the exhaustive and random families range over in ``solve_egal_ties``."""
    reduced = perfectness_reduction(profile, gamma)
    return EdgeReducer(reduced, gamma).guess_groups(tuple(range(profile.n, reduced.n)))


def _scan_chunk(job: tuple) -> tuple[int, Matching, int] | None:
    profile, gamma, excluded, absent, members, start, family, seed, trials, optimal = job
    reducer = EdgeReducer(profile, gamma, excluded, absent)
    return reducer.scan(members, start, family, seed, trials, optimal)


def _better(a: tuple[int, Matching, int] | None, b: tuple[int, Matching, int] | None, optimal: bool):
    if a is None:
        return b
    if b is None:
        return a
    if optimal:
        return min(a, b, key=lambda hit: (hit[2], sorted(hit[1])))
    return min(a, b, key=lambda hit: hit[0])


def solve_perfect_egal(
    profile: Profile,
    gamma: int,
    family: str = "combinatorial",
    seed: int = 0,
    *,
    trials: int | None = None,
    optimal: bool = False,
    jobs: int = 1,
    interchangeable: Sequence[int] = (),
    excluded: Iterable[Pair] = (),
    absent: Iterable[int] = (),
) -> tuple[Matching, int] | None:
    """Perfect stable matching of cost at most ``gamma``, or None.

    Args:
        profile: Instance (ties and incomplete lists allowed)
        gamma: Cost bound
        family: ``combinatorial`` (exact), ``exhaustive`` (exact, capped) or ``random``
        seed: PRNG seed for the random family
        trials: Member count for the random family
        optimal: Keep scanning and return the cheapest certificate
        jobs: Worker processes for the edge-guess scan
        interchangeable: Symmetric agents, used to skip equivalent guesses
        excluded: Pairs treated as deleted edges (ranks unchanged)
        absent: Agents left out; only the others must be matched

    Returns:
        (matching, cost) or None
    """
    if family not in FAMILIES:
        raise DomainError(f"unknown family strategy '{family}'")
    if gamma < 0:
        return None
    reducer = EdgeReducer(profile, gamma, excluded, absent)
    if len(reducer.active) % 2:
        logger.info(f"separation: {len(reducer.active)} agents, no perfect matching")
        return None

    shortcut = reducer.perfect_matching(reducer.classification.kept)
    if shortcut is None or shortcut[1] > gamma:
        logger.info(f"separation: no perfect matching of cost <= {gamma} among low-cost edges")
        return None
    if reducer.is_stable(shortcut[0]):
        logger.info(f"separation: cheapest perfect matching is stable (cost {shortcut[1]})")
        return shortcut

    members = reducer.edge_members(family, seed, trials, interchangeable)
    jobs = max(1, jobs)
    if jobs == 1:
        hit = reducer.scan(members, 0, family, seed, trials, optimal)
    else:
        listed = list(members)
        size = -(-len(listed) // jobs) or 1
        excluded_set = reducer.excluded
        chunks = [
            (profile, gamma, excluded_set, reducer.absent, listed[i:i + size], i, family, seed, trials, optimal)
            for i in range(0, len(listed), size)
        ]
        hit = None
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for result in pool.map(_scan_chunk, chunks):
                hit = _better(hit, result, optimal)

    logger.info(
        f"separation: {len(reducer.costly)} costly edges, gamma={gamma}, family={family}: "
        f"{'cost ' + str(hit[2]) if hit else 'no solution'}"
    )
    if hit is None:
        return None
    return hit[1], hit[2]


def perfectness_reduction(profile: Profile, gamma: int) -> Profile:
    """Add ``k`` tied helper agents so that only perfect matchings need to be searched.

    ``k`` is the largest value at most ``gamma`` with the parity of the agent
    count. Agents with at most ``gamma`` acceptable agents append the helpers
    as one tie group; every helper ties all other helpers and those agents.
    Helpers get the ids after the original agents.
    """
    n = profile.n
    k = max(gamma, 0)
    if (k - n) % 2:
        k -= 1
    k = max(k, 0)
    short = [b for b in range(n) if profile.degree(b) <= gamma]
    if k == 1 and not short:
        k = 0
    if k == 0:
        return profile

    helpers = tuple(range(n, n + k))
    lists = []
    for b in range(n):
        groups = list(profile.lists[b])
        if profile.degree(b) <= gamma:
            groups.append(helpers)
        lists.append(tuple(groups))
    for a in helpers:
        lists.append(((*[h for h in helpers if h != a], *short),))
    reduced = Profile(tuple(lists), profile.names + tuple(fresh_names(profile, "a", k)))
    logger.debug(f"perfectness reduction: {n} agents + {k} helpers, {len(short)} short lists")
    return reduced


def solve_egal_ties(
    profile: Profile,
    gamma: int,
    family: str = "combinatorial",
    seed: int = 0,
    *,
    trials: int | None = None,
    optimal: bool = False,
    jobs: int = 1,
) -> tuple[Matching, int] | None:
    """Stable matching of egalitarian cost at most ``gamma`` (unmatched agents cost their list length)."""
    reduced = perfectness_reduction(profile, gamma)
    helpers = tuple(range(profile.n, reduced.n))
    found = solve_perfect_egal(
        reduced, gamma, family, seed, trials=trials, optimal=optimal, jobs=jobs, interchangeable=helpers
    )
    if found is None:
        return None
    m = frozenset(e for e in found[0] if e[1] < profile.n)
    cost = egalitarian_cost(profile, m)
    if not is_stable(profile, m) or cost > gamma:
        raise InvariantViolation("ties solver returned an unstable or over-budget matching")
    return m, cost


def solve_egal_constant(
    profile: Profile,
    gamma: int,
    c: int,
    family: str = "combinatorial",
    seed: int = 0,
    *,
    trials: int | None = None,
    jobs: int = 1,
) -> tuple[Matching, int] | None:
    """Cheapest stable matching when every unmatched agent costs ``c``, if it costs at most ``gamma``.

    Guesses the unmatched agents ``A`` (pairwise unacceptable, ``c * |A| <= gamma``).
    Everybody who accepts some ``a`` in ``A`` must end up with a partner at
    least as good as ``a``, so the entries below the best such ``a`` are
    deleted; the remaining agents then need a perfect stable matching within
    the leftover budget.
    """
    semantics = CostSemantics("const", c)
    n = profile.n
    best: tuple[Matching, int] | None = None
    guesses = 0
    for size in range(0, max(gamma, -1) // c + 1):
        for unmatched in combinations(range(n), size):
            if any(profile.is_acceptable(a, b) for a, b in combinations(unmatched, 2)):
                continue
            guesses += 1
            budget = gamma - c * size
            if best is not None:
                budget = min(budget, best[1] - c * size)
            gone = set(unmatched)
            excluded = set()
            for u in range(n):
                if u in gone:
                    continue
                cut = min((profile.rank(u, a) for a in unmatched if profile.is_acceptable(u, a)), default=None)
                if cut is None:
                    continue
                excluded.update(pair(u, b) for b in profile.acceptable(u) if profile.rank(u, b) > cut)
            found = solve_perfect_egal(
                profile, budget, family, seed, trials=trials, optimal=True, jobs=jobs,
                excluded=excluded, absent=gone,
            )
            if found is None:
                continue
            m, cost = found[0], found[1] + c * size
            if best is None or (cost, sorted(m)) < (best[1], sorted(best[0])):
                best = (m, cost)

    if best is not None:
        m, cost = best
        if not is_stable(profile, m) or egalitarian_cost(profile, m, semantics) != cost or cost > gamma:
            raise InvariantViolation("constant-cost solver returned an unstable or mispriced matching")
    logger.info(
        f"constant-cost: {guesses} unmatched-set guesses, c={c}, gamma={gamma}: "
        f"{'cost ' + str(best[1]) if best else 'no solution'}"
    )
    return best