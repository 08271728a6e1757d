"""Exhaustive ground-truth solvers for small instances.

Every matching of the acceptability graph is reachable by the backtracking
search below; pruning only cuts branches whose already-decided agents
violate stability or exceed the current bound, so results equal those of
plain enumeration.
"""

import math
from collections import deque
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

from .config import Settings, get_settings
from .errors import CapacityError
from .logger import get_logger
from .matchingengine import WeightedGraph
from .model import LIST_LENGTH, CostSemantics, Matching, Pair, Profile, pair

logger = get_logger(__name__)

UNDECIDED = -2
SINGLE = -1


def check_capacity(
    profile: Profile,
    settings: Settings | None = None,
    max_agents: int | None = None,
    max_edges: int | None = None,
) -> None:
    """Raise CapacityError when ``profile`` is too large for exhaustive search."""
    settings = settings or get_settings()
    max_agents = settings.oracle_max_agents if max_agents is None else max_agents
    max_edges = settings.oracle_max_edges if max_edges is None else max_edges
    edges = len(profile.edges())
    if profile.n > max_agents or edges > max_edges:
        raise CapacityError(
            f"oracle limited to {max_agents} agents / {max_edges} edges, "
            f"instance has {profile.n} / {edges}"
        )


def _search_order(profile: Profile) -> list[int]:
    """Breadth-first agent order so that neighbours get decided close together."""
    order: list[int] = []
    seen = [False] * profile.n
    for root in range(profile.n):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            x = queue.popleft()
            order.append(x)
            for y in sorted(profile.acceptable(x)):
                if not seen[y]:
                    seen[y] = True
                    queue.append(y)
    return order


class Backtracker:
    """Depth-first enumeration of matchings with incremental pruning.

    ``measure`` selects the quantity kept at most ``limit``: ``cost``
    (egalitarian cost under ``semantics``), ``bp`` (blocking pairs), ``ba``
    (blocking agents) or ``None``. With ``stable=True`` only stable matchings
    are produced; ``excluded`` pairs are treated as deleted edges.
    """

    def __init__(
        self,
        profile: Profile,
        *,
        stable: bool = True,
        perfect: bool = False,
        excluded: Iterable[Pair] = (),
        measure: str | None = None,
        semantics: CostSemantics = LIST_LENGTH,
        limit: float = math.inf,
    ):
        self.profile = profile
        self.stable = stable
        self.perfect = perfect
        self.excluded = frozenset(pair(*e) for e in excluded)
        self.measure = measure
        self.semantics = semantics
        self.limit = limit
        self.adj = [
            tuple(y for y in profile.acceptable(x) if pair(x, y) not in self.excluded)
            for x in range(profile.n)
        ]
        self.order = _search_order(profile)
        self.mate = [UNDECIDED] * profile.n
        self.blocking_count = [0] * profile.n
        self.nodes = 0

    def _partner(self, a: int) -> int | None:
        m = self.mate[a]
        return None if m == SINGLE else m

    def _new_blocking_pairs(self, agents: tuple[int, ...]) -> list[Pair]:
        found = []
        for a in agents:
            mine = self._partner(a)
            for z in self.adj[a]:
                if z == mine or self.mate[z] == UNDECIDED:
                    continue
                if self.profile.prefers(a, z, mine) and self.profile.prefers(z, a, self._partner(z)):
                    found.append(pair(a, z))
        return found

    def _agent_cost(self, a: int) -> int:
        mine = self._partner(a)
        if mine is None:
            return self.semantics.unmatched_cost(self.profile, a)
        return self.profile.rank(a, mine)

    def matching(self) -> Matching:
        return frozenset(pair(x, m) for x, m in enumerate(self.mate) if m > x)

    def run(self) -> Iterator[float]:
        """Yield the measure at every accepted leaf; ``matching()`` holds the leaf."""
        yield from self._descend(0, 0)

    def _descend(self, index: int, metric: float) -> Iterator[float]:
        self.nodes += 1
        order = self.order
        while index < len(order) and self.mate[order[index]] != UNDECIDED:
            index += 1
        if index == len(order):
            yield metric
            return

        x = order[index]
        options: list[int | None] = [y for y in self.adj[x] if self.mate[y] == UNDECIDED]
        if not self.perfect:
            options.append(None)

        for y in options:
            if y is None:
                self.mate[x] = SINGLE
                agents: tuple[int, ...] = (x,)
            else:
                self.mate[x] = y
                self.mate[y] = x
                agents = (x, y)

            blocks = self._new_blocking_pairs(agents)
            touched: list[int] = []
            if not (self.stable and blocks):
                value = metric
                if self.measure == "cost":
                    value += sum(self._agent_cost(a) for a in agents)
                elif self.measure == "bp":
                    value += len(blocks)
                elif self.measure == "ba":
                    for e in blocks:
                        for a in e:
                            if self.blocking_count[a] == 0:
                                value += 1
                            self.blocking_count[a] += 1
                            touched.append(a)
                if value <= self.limit:
                    yield from self._descend(index + 1, value)

            for a in touched:
                self.blocking_count[a] -= 1
            for a in agents:
                self.mate[a] = UNDECIDED


def _minimize(bt: Backtracker) -> tuple[Matching, int] | None:
    best = None
    for value in bt.run():
        best = (bt.matching(), int(value))
        bt.limit = value - 1
    return best


def iter_stable_matchings(
    profile: Profile,
    excluded: Iterable[Pair] = (),
    *,
    perfect: bool = False,
) -> Iterator[Matching]:
    """Stable matchings of ``profile`` with the ``excluded`` edges deleted (no size check)."""
    bt = Backtracker(profile, stable=True, perfect=perfect, excluded=excluded)
    for _ in bt.run():
        yield bt.matching()


def all_stable_matchings(
    profile: Profile,
    *,
    settings: Settings | None = None,
    max_agents: int | None = None,
    max_edges: int | None = None,
) -> list[Matching]:
    """Every stable matching, sorted by their sorted pair lists."""
    check_capacity(profile, settings, max_agents, max_edges)
    found = sorted(iter_stable_matchings(profile), key=sorted)
    logger.debug(f"oracle: {len(found)} stable matchings on {profile.n} agents")
    return found


def opt_egal_brute(
    profile: Profile,
    semantics: CostSemantics = LIST_LENGTH,
    bound: int | None = None,
    perfect: bool = False,
    *,
    settings: Settings | None = None,
    max_agents: int | None = None,
    max_edges: int | None = None,
) -> tuple[Matching, int] | None:
    """Minimum-cost stable matching, or None.

    Args:
        profile: Instance
        semantics: Unmatched-agent pricing
        bound: Only consider matchings of cost at most ``bound``
        perfect: Only consider perfect matchings

    Returns:
        (matching, cost) or None
    """
    check_capacity(profile, settings, max_agents, max_edges)
    limit = math.inf if bound is None else bound
    bt = Backtracker(profile, perfect=perfect, measure="cost", semantics=semantics, limit=limit)
    return _minimize(bt)


def min_bp_brute(
    profile: Profile,
    bound: int | None = None,
    *,
    settings: Settings | None = None,
    max_agents: int | None = None,
    max_edges: int | None = None,
) -> tuple[Matching, int] | None:
    """Matching with the fewest blocking pairs (None only when ``bound`` is exceeded)."""
    check_capacity(profile, settings, max_agents, max_edges)
    limit = math.inf if bound is None else bound
    return _minimize(Backtracker(profile, stable=False, measure="bp", limit=limit))


def min_ba_brute(
    profile: Profile,
    bound: int | None = None,
    *,
    settings: Settings | None = None,
    max_agents: int | None = None,
    max_edges: int | None = None,
) -> tuple[Matching, int] | None:
    """Matching with the fewest blocking agents (None only when ``bound`` is exceeded)."""
    check_capacity(profile, settings, max_agents, max_edges)
    limit = math.inf if bound is None else bound
    return _minimize(Backtracker(profile, stable=False, measure="ba", limit=limit))


def min_cost_perfect_brute(g: WeightedGraph) -> tuple[Matching, int] | None:
    """Minimum-weight perfect matching by enumeration."""
    if g.vertex_count % 2:
        return None
    weight = {(u, v): w for u, v, w in g.edges}
    adj: dict[int, list[int]] = {x: [] for x in range(g.vertex_count)}
    for u, v, _ in g.edges:
        adj[u].append(v)
        adj[v].append(u)

    best: tuple[Matching, int] | None = None

    def extend(free: frozenset[int], chosen: list[Pair], cost: int) -> None:
        nonlocal best
        if best is not None and cost >= best[1]:
            return
        if not free:
            best = (frozenset(chosen), cost)
            return
        x = min(free)
        for y in sorted(adj[x]):
            if y in free:
                e = pair(x, y)
                chosen.append(e)
                extend(free - {x, y}, chosen, cost + weight[e])
                chosen.pop()

    extend(frozenset(range(g.vertex_count)), [], 0)
    return best


@dataclass
class OracleReport:
    """Full-enumeration summary of one instance."""
    all_stable: list[Matching]
    opt_egal: dict[str, tuple[Matching, int] | None] = field(default_factory=dict)
    min_bp: tuple[Matching, int] | None = None
    min_ba: tuple[Matching, int] | None = None


def oracle_report(
    profile: Profile,
    semantics: Iterable[CostSemantics] = (LIST_LENGTH,),
    *,
    settings: Settings | None = None,
) -> OracleReport:
    """Run every oracle on ``profile``."""
    report = OracleReport(all_stable=all_stable_matchings(profile, settings=settings))
    for s in semantics:
        report.opt_egal[str(s)] = opt_egal_brute(profile, s, settings=settings)
    report.min_bp = min_bp_brute(profile, settings=settings)
    report.min_ba = min_ba_brute(profile, settings=settings)
    return report

