from itertools import combinations, product

import pytest
from hypothesis import given, settings, strategies as st

from instances import all_matchings
from roommates.errors import DomainError
from roommates.model import (
    ZERO,
    CostSemantics,
    Profile,
    blocking_pairs,
    egalitarian_cost,
    is_stable,
    matching_from_names,
    partners,
)
from roommates.oracle import min_bp_brute, opt_egal_brute
from roommates.reductions import (
    ColoredGraph,
    CnfFormula,
    is_bipartite,
    is_to_egal_const,
    mcis_to_mbp,
    sat3_to_egal_zero,
    selector_profile,
    vertex_gadget,
)

ALL_SIGNS = CnfFormula(3, ((1, 2, 3), (1, -2, -3), (-1, 2, -3), (-1, -2, 3)))

PATH = ColoredGraph((("a", "b", "c"),), (("a", "b"), ("b", "c")))
TRIANGLE = ColoredGraph((("a", "b", "c"),), (("a", "b"), ("b", "c"), ("a", "c")))


@st.composite
def colored_graphs(draw, max_classes=3, max_class_size=3, inside=False):
    k = draw(st.integers(1, max_classes))
    classes = tuple(
        tuple(f"v{j}.{i}" for i in range(draw(st.integers(1, max_class_size))))
        for j in range(k)
    )
    vertices = [v for members in classes for v in members]
    owner = {v: j for j, members in enumerate(classes) for v in members}
    edges = tuple(
        (u, v)
        for x, u in enumerate(vertices)
        for v in vertices[x + 1:]
        if (inside or owner[u] != owner[v]) and draw(st.booleans())
    )
    return ColoredGraph(classes, edges)


def multicolored_independent_sets(g):
    for choice in product(*g.classes):
        if g.is_independent(choice):
            yield set(choice)


def test_selector_profile_shape():
    selector = selector_profile(2)
    assert selector.n == 20
    assert not selector.has_ties
    assert selector.acceptable(selector.agent("a[0]")) == tuple(
        selector.agent(name) for name in ("a[1]", "a[4]", "u[0]", "c[0]", "d[0]")
    )


def test_single_vertex_class():
    g = ColoredGraph((("v1",),), ())
    reduction = mcis_to_mbp(g)
    assert reduction.profile.n == 24
    assert reduction.beta == 2
    assert reduction.padding == {"~pad1.0", "~pad1.1"}
    m = reduction.witness({"v1"})
    assert len(blocking_pairs(reduction.profile, m)) == 2
    assert reduction.decode(m) == {"v1"}


def test_two_classes_with_an_edge():
    g = ColoredGraph((("p", "q"), ("r",)), (("p", "r"),))
    reduction = mcis_to_mbp(g)
    assert reduction.beta == 4
    m = reduction.witness({"q", "r"})
    assert len(blocking_pairs(reduction.profile, m)) == 4
    assert reduction.decode(m) == {"q", "r"}
    with pytest.raises(DomainError):
        reduction.witness({"p", "r"})
    with pytest.raises(DomainError):
        reduction.witness({"q"})


def test_padding_is_not_a_witness_vertex():
    reduction = mcis_to_mbp(ColoredGraph((("v1",),), ()))
    with pytest.raises(DomainError):
        reduction.witness({"~pad1.0"})


def test_colored_graph_validation():
    with pytest.raises(DomainError):
        ColoredGraph((("a", "b"), ("a",)), ())
    with pytest.raises(DomainError):
        ColoredGraph((("a",),), (("a", "z"),))
    with pytest.raises(DomainError):
        ColoredGraph((("a",),), (("a", "a"),))
    with pytest.raises(DomainError):
        mcis_to_mbp(ColoredGraph((), ()))


@settings(max_examples=30, deadline=None)
@given(colored_graphs())
def test_blocking_reduction_structure(g):
    reduction = mcis_to_mbp(g)
    profile = reduction.profile
    assert not profile.has_ties
    assert max(profile.degree(x) for x in range(profile.n)) <= 5
    assert reduction.beta == 2 * g.k
    for chosen in multicolored_independent_sets(g):
        m = reduction.witness(chosen)
        assert len(blocking_pairs(profile, m)) == 2 * g.k
        assert reduction.decode(m) == chosen


@pytest.mark.slow
def test_single_vertex_minimum_is_two():
    reduction = mcis_to_mbp(ColoredGraph((("v1",),), ()))
    assert min_bp_brute(reduction.profile, max_agents=30, max_edges=80)[1] == 2


@pytest.mark.slow
@settings(max_examples=10, deadline=None)
@given(colored_graphs(max_classes=2, max_class_size=2))
def test_blocking_reduction_answers(g):
    reduction = mcis_to_mbp(g)
    best = min_bp_brute(reduction.profile, max_agents=200, max_edges=400)[1]
    assert best >= 2 * g.k
    has_solution = next(multicolored_independent_sets(g), None) is not None
    assert has_solution == (best <= reduction.beta)


def test_sat_reduction_all_signs():
    reduction = sat3_to_egal_zero(ALL_SIGNS)
    profile = reduction.profile
    assert profile.n == 15 * 3 + 5 * 4
    assert reduction.gamma == 0
    assert is_bipartite(profile)
    assert max(profile.degree(x) for x in range(profile.n)) <= 3
    m = reduction.witness((True, True, True))
    assert is_stable(profile, m)
    assert egalitarian_cost(profile, m, ZERO) == 0
    assert reduction.decode(m) == (True, True, True)


def test_sat_witness_needs_satisfying_assignment():
    reduction = sat3_to_egal_zero(ALL_SIGNS)
    with pytest.raises(DomainError):
        reduction.witness((False, False, False))
    with pytest.raises(DomainError):
        reduction.witness((True, True))


@pytest.mark.parametrize(
    "formula",
    [
        CnfFormula(2, ((1, 2), (-1, -2), (1, -2), (-1, 2))),
        CnfFormula(1, ((1, 1, 1),)),
        CnfFormula(3, ((1, 2, 3), (-1, -2, -3))),
    ],
)
def test_sat_reduction_rejects_bad_formulas(formula):
    with pytest.raises(DomainError):
        sat3_to_egal_zero(formula)


def test_formula_evaluation():
    assert ALL_SIGNS.evaluate((True, True, True))
    assert not ALL_SIGNS.evaluate((False, False, False))
    assert set(ALL_SIGNS.literal_counts().values()) == {2}


@pytest.mark.slow
def test_sat_reduction_agrees_with_oracle():
    reduction = sat3_to_egal_zero(ALL_SIGNS)
    found = opt_egal_brute(reduction.profile, ZERO, bound=0, max_agents=80, max_edges=200)
    assert found is not None
    assert ALL_SIGNS.evaluate(reduction.decode(found[0]))


def test_is_reduction_path():
    reduction = is_to_egal_const(PATH, 2, 1)
    profile = reduction.profile
    assert profile.n == 3 + 1 + 6
    assert reduction.gamma == 2
    m = reduction.witness({"a", "c"})
    assert is_stable(profile, m)
    assert egalitarian_cost(profile, m, CostSemantics("const", 1)) == 2
    assert reduction.decode(m) == {"a", "c"}
    with pytest.raises(DomainError):
        reduction.witness({"a", "b"})
    found = opt_egal_brute(profile, CostSemantics("const", 1), bound=2)
    assert found is not None and found[1] == 2


def test_is_reduction_triangle_has_no_solution():
    reduction = is_to_egal_const(TRIANGLE, 2, 1)
    assert opt_egal_brute(reduction.profile, CostSemantics("const", 1), bound=reduction.gamma) is None


@pytest.mark.parametrize("c", [1, 2])
def test_is_reduction_whole_vertex_set(c):
    edge = ColoredGraph((("a", "b"),), (("a", "b"),))
    reduction = is_to_egal_const(edge, 2, c)
    profile = reduction.profile
    assert reduction.dummy_pairs == c + 1
    assert profile.rank(profile.agent("a"), profile.agent("b")) == c + 1
    assert opt_egal_brute(profile, CostSemantics("const", c), bound=reduction.gamma) is None

    lonely = ColoredGraph((("a", "b"),), ())
    reduction = is_to_egal_const(lonely, 2, c)
    m = reduction.witness({"a", "b"})
    assert is_stable(reduction.profile, m)
    assert egalitarian_cost(reduction.profile, m, CostSemantics("const", c)) == 2 * c
    found = opt_egal_brute(reduction.profile, CostSemantics("const", c), bound=reduction.gamma)
    assert found is not None and reduction.decode(found[0]) == {"a", "b"}


@pytest.mark.parametrize("k, c", [(0, 1), (4, 1), (2, 0)])
def test_is_reduction_rejects_parameters(k, c):
    with pytest.raises(DomainError):
        is_to_egal_const(PATH, k, c)


def test_is_reduction_name_clash():
    g = ColoredGraph((("s[1]", "b"),), ())
    with pytest.raises(DomainError):
        is_to_egal_const(g, 1, 1)


@pytest.mark.slow
@settings(max_examples=20, deadline=None)
@given(colored_graphs(max_classes=1, max_class_size=4, inside=True), st.integers(1, 4), st.integers(1, 2))
def test_is_reduction_answers(g, k, c):
    n = len(g.vertices)
    k = min(k, n)
    reduction = is_to_egal_const(g, k, c)
    found = opt_egal_brute(reduction.profile, CostSemantics("const", c), bound=reduction.gamma, max_agents=40, max_edges=200)
    has_set = any(g.is_independent(s) for s in combinations(g.vertices, k))
    assert (found is not None) == has_set
    if found is not None:
        decoded = reduction.decode(found[0])
        assert len(decoded) == k and g.is_independent(decoded)


@st.composite
def twice_each_formulas(draw):
    """Three variables, four clauses, every literal exactly twice."""
    literals = draw(st.permutations([l for v in (1, 2, 3) for l in (v, v, -v, -v)]))
    return CnfFormula(3, tuple(tuple(literals[i:i + 3]) for i in range(0, 12, 3)))


def clause_matching(reduction, assignment):
    """The witness layout for any assignment; a clause with no true literal leaves ``x[j,1]`` single."""
    f = reduction.formula
    pairs = []
    for i in range(1, f.num_vars + 1):
        good, bad = ("T", "F") if assignment[i - 1] else ("F", "T")
        pairs.append((f"a*[{i}]", f"a{good}[{i}]"))
        for s in (1, 2):
            pairs.append((f"c{good}[{i},{s}]", f"d{good}[{i},{s}]"))
            pairs.append((f"b{bad}[{i},{s}]", f"c{bad}[{i},{s}]"))
    for j, clause in enumerate(f.clauses, start=1):
        r = next((r for r, l in enumerate(clause, start=1) if assignment[abs(l) - 1] == (l > 0)), 1)
        others = [t for t in (1, 2, 3) if t != r]
        pairs.append((f"u*[{j}]", f"x[{j},{others[0]}]"))
        pairs.append((f"w*[{j}]", f"x[{j},{others[1]}]"))
    return matching_from_names(reduction.profile, pairs)


@given(twice_each_formulas())
def test_false_clause_leaves_a_blocking_pair(f):
    reduction = sat3_to_egal_zero(f)
    for assignment in product((False, True), repeat=3):
        m = clause_matching(reduction, assignment)
        assert egalitarian_cost(reduction.profile, m, ZERO) == 0
        assert is_stable(reduction.profile, m) == f.evaluate(assignment)
        if f.evaluate(assignment):
            assert m == reduction.witness(assignment)
            assert reduction.decode(m) == assignment


@pytest.mark.slow
@settings(max_examples=10, deadline=None)
@given(twice_each_formulas())
def test_zero_cost_matchings_decode_to_satisfying_assignments(f):
    reduction = sat3_to_egal_zero(f)
    found = opt_egal_brute(reduction.profile, ZERO, bound=0, max_agents=80, max_edges=200)
    assert found is not None
    assert f.evaluate(reduction.decode(found[0]))


@pytest.mark.parametrize("delta", [0, 1, 2, 3])
def test_vertex_gadget_passes_the_choice_along(delta):
    ys = [f"y{i}" for i in range(1, delta + 1)]
    prefs = vertex_gadget(delta, "a", "b", ys)
    last = f"x[{2 * delta + 1}]"
    prefs["a"] = ["x[0]"]
    prefs["b"] = [last]
    for i, y in enumerate(ys, start=1):
        prefs[y] = [f"z{i}", f"x[{2 * i}]"]
        prefs[f"z{i}"] = [y]
    profile = Profile.from_named(list(prefs), prefs)
    gadget = {profile.agent(f"x[{z}]") for z in range(2 * delta + 2)}
    a, b, x0, x_last = (profile.agent(name) for name in ("a", "b", "x[0]", last))

    settled = 0
    for m in all_matchings(profile.edges()):
        if partners(m).get(x0) != a:
            continue
        if any(set(e) & gadget for e in blocking_pairs(profile, m)):
            continue
        settled += 1
        assert partners(m).get(x_last) == b
    assert settled > 0
