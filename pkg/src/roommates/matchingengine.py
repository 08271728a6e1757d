"""Exact minimum-cost perfect matching on general graphs.

Backed by networkx's blossom implementation: costs are complemented
against ``max_weight + 1`` and a maximum-cardinality maximum-weight matching
is requested, which is a minimum-cost perfect matching whenever a perfect
matching exists.
"""

from dataclasses import dataclass

import networkx as nx

from .errors import DomainError
from .logger import get_logger
from .model import Matching, pair

logger = get_logger(__name__)


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph on ``0..vertex_count-1`` with nonnegative integer edge weights."""
    vertex_count: int
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        seen = set()
        normalized = []
        for u, v, w in self.edges:
            if u == v:
                raise DomainError(f"self-loop on vertex {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise DomainError(f"edge ({u}, {v}) leaves the vertex range")
            if w < 0 or int(w) != w:
                raise DomainError(f"edge ({u}, {v}) needs a nonnegative integer weight")
            e = pair(u, v)
            if e in seen:
                raise DomainError(f"parallel edge ({u}, {v})")
            seen.add(e)
            normalized.append((e[0], e[1], int(w)))
        object.__setattr__(self, "edges", tuple(sorted(normalized)))

    @classmethod
    def from_costs(cls, vertex_count: int, costs: dict[tuple[int, int], int]) -> "WeightedGraph":
        return cls(vertex_count, tuple((u, v, w) for (u, v), w in costs.items()))


def min_cost_perfect_matching(g: WeightedGraph) -> tuple[Matching, int] | None:
    """Perfect matching of minimum total weight, or None when none exists."""
    if g.vertex_count % 2:
        return None
    if g.vertex_count == 0:
        return frozenset(), 0

    cover = {u for u, v, _ in g.edges} | {v for u, v, _ in g.edges}
    if len(cover) < g.vertex_count:
        return None

    top = max(w for _, _, w in g.edges) + 1
    graph = nx.Graph()
    graph.add_nodes_from(range(g.vertex_count))
    for u, v, w in g.edges:
        graph.add_edge(u, v, weight=top - w)

    result = nx.max_weight_matching(graph, maxcardinality=True, weight="weight")
    if 2 * len(result) != g.vertex_count:
        return None

    matching = frozenset(pair(u, v) for u, v in result)
    weight = dict(((u, v), w) for u, v, w in g.edges)
    total = sum(weight[e] for e in matching)
    logger.debug(f"min-cost perfect matching on {g.vertex_count} vertices: cost {total}")
    return matching, total
