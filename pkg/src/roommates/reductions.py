"""Instance generators for the hardness constructions.

Each generator returns the profile together with the target bound and can
translate witnesses both ways: ``witness`` builds the matching for a
solution of the source problem, ``decode`` reads a source solution off a
good matching.
"""

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import networkx as nx

from .errors import DomainError
from .logger import get_logger
from .model import Matching, Profile, matching_from_names, partners

logger = get_logger(__name__)

Prefs = dict[str, list]


@dataclass(frozen=True)
class ColoredGraph:
    """Graph whose vertices are split into color classes (one class for plain graphs)."""
    classes: tuple[tuple[str, ...], ...]
    edges: tuple[tuple[str, str], ...]
    _where: dict[str, tuple[int, int]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        where: dict[str, tuple[int, int]] = {}
        for j, members in enumerate(self.classes):
            for i, v in enumerate(members):
                if v in where:
                    raise DomainError(f"vertex '{v}' appears in two classes")
                where[v] = (j, i)
        normalized = set()
        for u, v in self.edges:
            if u not in where or v not in where:
                raise DomainError(f"edge {{{u}, {v}}} uses an unknown vertex")
            if u == v:
                raise DomainError(f"self-loop on '{u}'")
            normalized.add(tuple(sorted((u, v), key=where.__getitem__)))
        object.__setattr__(self, "classes", tuple(tuple(c) for c in self.classes))
        object.__setattr__(self, "edges", tuple(sorted(normalized, key=lambda e: (where[e[0]], where[e[1]]))))
        object.__setattr__(self, "_where", where)

    @property
    def k(self) -> int:
        return len(self.classes)

    @property
    def vertices(self) -> tuple[str, ...]:
        return tuple(v for members in self.classes for v in members)

    def position(self, v: str) -> tuple[int, int]:
        """``(class index, index inside the class)``, both 0-based."""
        return self._where[v]

    def neighbors(self, v: str) -> list[str]:
        found = [b for a, b in self.edges if a == v] + [a for a, b in self.edges if b == v]
        return sorted(found, key=self._where.__getitem__)

    def is_independent(self, vertices: Iterable[str]) -> bool:
        chosen = set(vertices)
        return not any(u in chosen and v in chosen for u, v in self.edges)


@dataclass(frozen=True)
class CnfFormula:
    """CNF over variables ``1..num_vars``; literals are signed integers."""
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def evaluate(self, assignment: Sequence[bool]) -> bool:
        """``assignment[i - 1]`` is the value of variable ``i``."""
        return all(any(assignment[abs(l) - 1] == (l > 0) for l in clause) for clause in self.clauses)

    def literal_counts(self) -> dict[int, int]:
        counts = {l: 0 for v in range(1, self.num_vars + 1) for l in (v, -v)}
        for clause in self.clauses:
            for l in clause:
                counts[l] += 1
        return counts


def _profile(prefs: Prefs) -> Profile:
    return Profile.from_named(list(prefs), prefs)


def is_bipartite(profile: Profile) -> bool:
    """True iff the acceptability graph is bipartite."""
    graph = nx.Graph()
    graph.add_nodes_from(range(profile.n))
    graph.add_edges_from(profile.edges())
    return nx.is_bipartite(graph)


# Selector and vertex gadgets

def selector_gadget(
    n_prime: int,
    u_names: Sequence[str],
    letters: tuple[str, str, str] = ("a", "c", "d"),
    key: str = "",
) -> Prefs:
    """Preference lists of the ``A``, ``C`` and ``D`` agents of one selector.

    ``u_names`` are the ``2 n' + 1`` outside agents that ``a^i`` ranks third;
    their own lists are up to the caller. Agent names are ``<letter>[<key><i>]``.
    """
    if n_prime < 1:
        raise DomainError("a selector needs n' >= 1")
    size = 2 * n_prime + 1
    if len(u_names) != size:
        raise DomainError(f"a selector with n' = {n_prime} needs {size} outside agents")
    a, c, d = ([f"{letter}[{key}{i}]" for i in range(size)] for letter in letters)
    prefs: Prefs = {}
    for i in range(size):
        prefs[a[i]] = [a[(i + 1) % size], a[(i - 1) % size], u_names[i], c[i], d[i]]
    for i in range(size):
        prefs[c[i]] = [d[i], a[i]]
    for i in range(size):
        prefs[d[i]] = [a[i], c[i]]
    return prefs


def selector_profile(n_prime: int) -> Profile:
    """Standalone selector where each ``u^i`` accepts only ``a^i``."""
    size = 2 * n_prime + 1
    u_names = [f"u[{i}]" for i in range(size)]
    prefs = selector_gadget(n_prime, u_names)
    for i, name in enumerate(u_names):
        prefs[name] = [f"a[{i}]"]
    return _profile(prefs)


def vertex_gadget(
    delta: int,
    a: str,
    b: str,
    y_slots: Sequence[str],
    x_names: Sequence[str] | None = None,
    genuine: bool = True,
) -> Prefs:
    """Preference lists of the ``2 delta + 2`` cycle agents ``x^0..x^{2 delta + 1}``.

    For ``delta = 0`` the cycle degenerates to two agents; a genuine vertex
    gets ``x^0: x^1 > a`` and ``x^1: b > x^0`` so it can be selected without
    blocking pairs, a padding vertex gets ``x^1: x^0 > b`` so selecting it
    costs one.
    """
    if delta < 0:
        raise DomainError("vertex degree must be nonnegative")
    if len(y_slots) != delta:
        raise DomainError(f"expected {delta} neighbour slots, got {len(y_slots)}")
    size = 2 * delta + 2
    x = list(x_names) if x_names is not None else [f"x[{z}]" for z in range(size)]
    if len(x) != size:
        raise DomainError(f"expected {size} gadget agents, got {len(x)}")

    if delta == 0:
        return {x[0]: [x[1], a], x[1]: [b, x[0]] if genuine else [x[0], b]}

    prefs: Prefs = {x[0]: [x[1], a, x[size - 1]]}
    for i in range(1, delta + 1):
        prefs[x[2 * i - 1]] = [x[2 * i], x[2 * i - 2]]
        prefs[x[2 * i]] = [x[2 * i + 1], y_slots[i - 1], x[2 * i - 1]]
    prefs[x[size - 1]] = [x[0], b, x[size - 2]]
    return prefs


@dataclass(frozen=True)
class BlockingReduction:
    """Min-blocking-pairs instance built from a colored graph."""
    profile: Profile
    beta: int
    graph: ColoredGraph
    padding: frozenset[str]
    n_prime: int

    def _vertex(self, j: int, i: int) -> str:
        return self.graph.classes[j][i]

    def decode(self, m: Iterable[tuple[int, int]]) -> set[str]:
        """Vertices whose selector agent is matched into their gadget."""
        mate = partners(m)
        names = self.profile.names
        chosen = set()
        for v in self.graph.vertices:
            j, i = self.graph.position(v)
            a = self.profile.agent(f"a[{j + 1},{i}]")
            if a in mate and names[mate[a]] == f"u[{j + 1},{i},0]":
                chosen.add(v)
        return chosen

    def witness(self, independent_set: Iterable[str]) -> Matching:
        """Matching whose blocking pairs are exactly the ``2k`` selector pairs."""
        chosen = set(independent_set)
        graph = self.graph
        picks = {}
        for v in chosen:
            if v not in graph.vertices or v in self.padding:
                raise DomainError(f"'{v}' is not a vertex of the graph")
            j, i = graph.position(v)
            if j in picks:
                raise DomainError("a multicolored independent set takes one vertex per class")
            picks[j] = i
        if len(picks) != graph.k or not graph.is_independent(chosen):
            raise DomainError("not a multicolored independent set")

        size = 2 * self.n_prime + 1
        pairs = []
        for j in range(graph.k):
            s = picks[j]
            key = f"{j + 1},"
            for i in range(size):
                pairs.append((f"c[{key}{i}]", f"d[{key}{i}]"))
                pairs.append((f"f[{key}{i}]", f"w[{key}{i}]"))
            for z in range(1, self.n_prime + 1):
                lo, hi = (s + 2 * z - 1) % size, (s + 2 * z) % size
                pairs.append((f"a[{key}{lo}]", f"a[{key}{hi}]"))
                pairs.append((f"b[{key}{lo}]", f"b[{key}{hi}]"))
            for i in range(size):
                delta = len(graph.neighbors(self._vertex(j, i)))
                last = 2 * delta + 1
                if i == s:
                    pairs.append((f"a[{key}{i}]", f"u[{key}{i},0]"))
                    pairs.append((f"b[{key}{i}]", f"u[{key}{i},{last}]"))
                    pairs.extend((f"u[{key}{i},{2 * z - 1}]", f"u[{key}{i},{2 * z}]") for z in range(1, delta + 1))
                else:
                    pairs.extend((f"u[{key}{i},{2 * z}]", f"u[{key}{i},{2 * z + 1}]") for z in range(delta + 1))
        return matching_from_names(self.profile, pairs)


def mcis_to_mbp(g: ColoredGraph) -> BlockingReduction:
    """Reduce Multi-Colored Independent Set to Min-Block-Pair Stable Roommates.

    Classes are padded with isolated vertices to a common odd size
    ``2 n' + 1 >= 3``. Every vertex gets a cycle gadget whose ends are wired
    to two selectors of its class; adjacent vertices are linked through
    their even cycle agents, slots assigned in edge order. The graph has a
    multicolored independent set iff some matching has at most ``2k``
    blocking pairs.
    """
    if g.k == 0:
        raise DomainError("the colored graph needs at least one class")
    widest = max(len(c) for c in g.classes)
    n_prime = max(1, math.ceil((widest - 1) / 2))
    size = 2 * n_prime + 1

    taken = set(g.vertices)
    padding = []
    classes = []
    for j, members in enumerate(g.classes):
        extra = []
        t = 0
        while len(members) + len(extra) < size:
            name = f"~pad{j + 1}.{t}"
            t += 1
            if name not in taken:
                extra.append(name)
        padding.extend(extra)
        classes.append(tuple(members) + tuple(extra))
    graph = ColoredGraph(tuple(classes), g.edges)

    def u(v: str, z: int) -> str:
        j, i = graph.position(v)
        return f"u[{j + 1},{i},{z}]"

    degree = {v: len(graph.neighbors(v)) for v in graph.vertices}
    slots: dict[str, list[str]] = {v: [] for v in graph.vertices}
    for v, w in graph.edges:
        zv, zw = len(slots[v]) + 1, len(slots[w]) + 1
        slots[v].append(u(w, 2 * zw))
        slots[w].append(u(v, 2 * zv))

    prefs: Prefs = {}
    for j, members in enumerate(graph.classes):
        key = f"{j + 1},"
        prefs.update(selector_gadget(n_prime, [u(v, 0) for v in members], ("a", "c", "d"), key))
        prefs.update(selector_gadget(n_prime, [u(v, 2 * degree[v] + 1) for v in members], ("b", "f", "w"), key))
        for i, v in enumerate(members):
            prefs.update(vertex_gadget(
                degree[v],
                f"a[{key}{i}]",
                f"b[{key}{i}]",
                slots[v],
                [u(v, z) for z in range(2 * degree[v] + 2)],
                genuine=v not in padding,
            ))

    profile = _profile(prefs)
    longest = max(profile.degree(x) for x in range(profile.n))
    if profile.has_ties or longest > 5:
        raise DomainError("blocking-pair reduction produced ties or a list longer than five")
    logger.info(f"mcis->mbp: k={g.k}, n'={n_prime}, {profile.n} agents, beta={2 * g.k}")
    return BlockingReduction(profile, 2 * g.k, graph, frozenset(padding), n_prime)


# Zero-cost egalitarian stable marriage from 3SAT

@dataclass(frozen=True)
class SatReduction:
    """Stable-marriage instance built from a CNF formula; the cost bound is zero."""
    profile: Profile
    formula: CnfFormula
    chosen_side: dict[tuple[int, int], tuple[str, str]] = field(repr=False, compare=False)

    @property
    def gamma(self) -> int:
        return 0

    def decode(self, m: Iterable[tuple[int, int]]) -> tuple[bool, ...]:
        """Variable ``i`` is true iff ``a*[i]`` is matched to ``aT[i]``."""
        mate = partners(m)
        names = self.profile.names
        values = []
        for i in range(1, self.formula.num_vars + 1):
            star = self.profile.agent(f"a*[{i}]")
            values.append(star in mate and names[mate[star]] == f"aT[{i}]")
        return tuple(values)

    def witness(self, assignment: Sequence[bool]) -> Matching:
        """Zero-cost stable matching for a satisfying assignment."""
        f = self.formula
        if len(assignment) != f.num_vars or not f.evaluate(assignment):
            raise DomainError("not a satisfying assignment")
        pairs = []
        for i in range(1, f.num_vars + 1):
            good, bad = ("T", "F") if assignment[i - 1] else ("F", "T")
            pairs.append((f"a*[{i}]", f"a{good}[{i}]"))
            for s in (1, 2):
                pairs.append((f"c{good}[{i},{s}]", f"d{good}[{i},{s}]"))
                pairs.append((f"b{bad}[{i},{s}]", f"c{bad}[{i},{s}]"))
        for j, clause in enumerate(f.clauses, start=1):
            r = next(r for r, l in enumerate(clause, start=1) if assignment[abs(l) - 1] == (l > 0))
            others = [t for t in (1, 2, 3) if t != r]
            pairs.append((f"u*[{j}]", f"x[{j},{others[0]}]"))
            pairs.append((f"w*[{j}]", f"x[{j},{others[1]}]"))
        return matching_from_names(self.profile, pairs)


def sat3_to_egal_zero(f: CnfFormula) -> SatReduction:
    """Reduce 3SAT (each literal exactly twice) to zero-cost Egalitarian Stable Marriage.

    Unmatched agents cost nothing here. Each clause position is identified
    with a (c, d) pair of its literal's side in the variable gadget, so the
    instance has ``15 n + 5 m`` agents, lists of length at most three and a
    bipartite acceptability graph.
    """
    for j, clause in enumerate(f.clauses, start=1):
        if len(clause) != 3:
            raise DomainError(f"clause {j} has {len(clause)} literals, expected 3")
    counts = f.literal_counts()
    wrong = sorted((l for l, c in counts.items() if c != 2), key=lambda l: (abs(l), l < 0))
    if wrong:
        raise DomainError(f"literal {wrong[0]} appears {counts[wrong[0]]} times, expected exactly twice")

    used = {l: 0 for l in counts}
    link: dict[tuple[int, int], tuple[str, str]] = {}
    for j, clause in enumerate(f.clauses, start=1):
        for r, l in enumerate(clause, start=1):
            used[l] += 1
            side = "T" if l > 0 else "F"
            link[(j, r)] = (f"c{side}[{abs(l)},{used[l]}]", f"d{side}[{abs(l)},{used[l]}]")
    clause_of = {d: f"x[{j},{r}]" for (j, r), (_, d) in link.items()}

    prefs: Prefs = {}
    for i in range(1, f.num_vars + 1):
        prefs[f"a*[{i}]"] = [(f"aT[{i}]", f"aF[{i}]")]
        for side in ("T", "F"):
            prefs[f"a{side}[{i}]"] = [f"a*[{i}]", (f"b{side}[{i},1]", f"b{side}[{i},2]")]
            for s in (1, 2):
                b, c, d = (f"{letter}{side}[{i},{s}]" for letter in "bcd")
                prefs[b] = [c, f"a{side}[{i}]"]
                prefs[c] = [(b, d)]
                prefs[d] = [c, clause_of[d]]
    for j in range(1, len(f.clauses) + 1):
        xs = tuple(f"x[{j},{r}]" for r in (1, 2, 3))
        prefs[f"u*[{j}]"] = [xs]
        prefs[f"w*[{j}]"] = [xs]
        for r in (1, 2, 3):
            prefs[f"x[{j},{r}]"] = [(f"u*[{j}]", f"w*[{j}]"), link[(j, r)][1]]

    profile = _profile(prefs)
    logger.info(f"3sat->egal: {f.num_vars} variables, {len(f.clauses)} clauses, {profile.n} agents")
    return SatReduction(profile, f, link)


# Constant-cost egalitarian stable roommates from Independent Set

@dataclass(frozen=True)
class ConstantCostReduction:
    """Instance where an independent set of size ``k`` means cost ``c * k``."""
    profile: Profile
    graph: ColoredGraph
    k: int
    c: int

    @property
    def gamma(self) -> int:
        return self.c * self.k

    @property
    def dummy_pairs(self) -> int:
        """Dummy pairs per vertex agent; one extra stands in for the selector tie when ``k = n``."""
        return self.c if self.k < len(self.graph.vertices) else self.c + 1

    def decode(self, m: Iterable[tuple[int, int]]) -> set[str]:
        """Vertex agents not matched to a selector."""
        mate = partners(m)
        selectors = {self.profile.agent(f"s[{t}]") for t in range(1, len(self.graph.vertices) - self.k + 1)}
        return {v for v in self.graph.vertices if mate.get(self.profile.agent(v)) not in selectors}

    def witness(self, independent_set: Iterable[str]) -> Matching:
        chosen = set(independent_set)
        vertices = self.graph.vertices
        if len(chosen) != self.k or not chosen <= set(vertices) or not self.graph.is_independent(chosen):
            raise DomainError(f"not an independent set of size {self.k}")
        rest = [v for v in vertices if v not in chosen]
        pairs = [(f"s[{t}]", v) for t, v in enumerate(rest, start=1)]
        for v in vertices:
            pairs.extend((f"d1[{v},{i}]", f"d2[{v},{i}]") for i in range(1, self.dummy_pairs + 1))
        return matching_from_names(self.profile, pairs)


def is_to_egal_const(g: ColoredGraph, k: int, c: int) -> ConstantCostReduction:
    """Reduce Independent Set to Egalitarian Stable Roommates with unmatched cost ``c``.

    Builds ``n`` vertex agents, ``n - k`` selectors that tie every vertex
    agent, and ``2 c n`` dummies; the bound is ``c * k``. Neighbors rank
    behind at least ``c + 1`` agents: with no selectors (``k = n``) each
    vertex agent gets one more dummy pair instead.
    """
    vertices = g.vertices
    n = len(vertices)
    if c < 1:
        raise DomainError("unmatched cost must be at least 1")
    if not 1 <= k <= n:
        raise DomainError(f"k must lie in 1..{n}")
    selectors = [f"s[{t}]" for t in range(1, n - k + 1)]
    clash = set(vertices) & set(selectors)
    if clash:
        raise DomainError(f"vertex name '{sorted(clash)[0]}' collides with a generated agent")

    dummies = c if selectors else c + 1
    prefs: Prefs = {}
    for s in selectors:
        prefs[s] = [tuple(vertices)]
    for v in vertices:
        entries: list = [tuple(selectors)] if selectors else []
        entries.extend(f"d1[{v},{i}]" for i in range(1, dummies + 1))
        neighbors = g.neighbors(v)
        if neighbors:
            entries.append(tuple(neighbors))
        prefs[v] = entries
    for v in vertices:
        for i in range(1, dummies + 1):
            prefs[f"d1[{v},{i}]"] = [f"d2[{v},{i}]", v]
            prefs[f"d2[{v},{i}]"] = [f"d1[{v},{i}]"]

    profile = _profile(prefs)
    logger.info(f"is->egal-const: {n} vertices, k={k}, c={c}, {profile.n} agents, gamma={c * k}")
    return ConstantCostReduction(profile, g, k, c)
