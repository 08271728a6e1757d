from itertools import combinations

import pytest
from hypothesis import assume, given, settings, strategies as st

from instances import NO_STABLE, TIED_FOUR, TWO_STABLE, named, profiles
from roommates.errors import DomainError
from roommates.model import CostSemantics, Profile, egalitarian_cost, is_perfect, is_stable
from roommates.oracle import all_stable_matchings, opt_egal_brute
from roommates.ties import (
    SeparationContext,
    blocks_each_other,
    classify_edges,
    criticality_table,
    culprits,
    edge_universe,
    harmlessly_blocked_edges,
    perfectness_reduction,
    reduce_edges,
    solve_egal_constant,
    solve_egal_ties,
    solve_perfect_egal,
)

# u ties a, b and c; a puts u second
TIED = Profile.from_named(
    ["u", "a", "b", "c", "x"],
    {"u": [["a", "b", "c"]], "a": ["x", "u"], "b": ["u"], "c": ["u"], "x": ["a"]},
)

PATH = Profile.from_lists([[1], [0, 2], [1]])

BIG = dict(max_agents=30, max_edges=300)


def test_classify_tied_four():
    c = classify_edges(TIED_FOUR, 2)
    assert c.zero_edges == {(0, 1), (0, 2)}
    assert c.costly_edges == {(1, 2), (2, 3)}
    assert c.discarded == {(0, 3)}
    assert c.kept == {(0, 1), (0, 2), (1, 2), (2, 3)}


def test_criticality():
    table = criticality_table(TIED, 1)
    ua = (0, 1)
    assert table.is_critical(ua, 0)
    assert table.is_harmless(ua, 1)
    assert table.critical_endpoints(ua) == (0,)
    # zero edges are neither critical nor harmless
    assert not table.is_critical((0, 2), 0)
    assert not table.is_harmless((0, 2), 0)


def test_no_ties_means_nothing_critical():
    table = criticality_table(TWO_STABLE, 3)
    assert table.critical == frozenset()


def test_unguessed_costly_edges_are_dropped():
    context = SeparationContext(frozenset(), frozenset())
    assert reduce_edges(TIED_FOUR, 2, context) == {(0, 1), (0, 2)}
    context = SeparationContext(frozenset({(1, 2), (2, 3)}), frozenset())
    assert reduce_edges(TIED_FOUR, 2, context) == {(0, 1), (0, 2), (1, 2), (2, 3)}


def test_mutually_harmless_pair_is_dropped():
    # {1,2} and {3,4} induce the blocking pair {2,3}
    context = SeparationContext(frozenset({(0, 1), (2, 3)}), frozenset())
    assert reduce_edges(NO_STABLE, 5, context) == frozenset()
    context = SeparationContext(frozenset({(0, 1)}), frozenset())
    assert reduce_edges(NO_STABLE, 5, context) == {(0, 1)}


def test_unprotected_critical_edge_is_dropped():
    edge_subset = frozenset({(0, 1)})
    dropped = reduce_edges(TIED, 1, SeparationContext(edge_subset, frozenset()))
    kept = reduce_edges(TIED, 1, SeparationContext(edge_subset, frozenset({0})))
    assert (0, 1) not in dropped
    assert (0, 1) in kept


# r ends up with its last choice s and blocks with both p and t
CHAIN = Profile.from_named(
    ["p", "q", "r", "s", "t", "w"],
    {"p": ["r", "q"], "q": ["p"], "r": ["p", "t", "s"], "s": ["r"], "t": ["r", "w"], "w": ["t"]},
)


def test_culprits_and_harmlessly_blocked_edges():
    m = named(CHAIN, "p-q", "r-s", "t-w")
    r, t = CHAIN.agent("r"), CHAIN.agent("t")
    assert culprits(CHAIN, 6, m) == {r}
    # {p, r} is a zero edge, so only {r, t} counts
    assert harmlessly_blocked_edges(CHAIN, 6, m) == {(r, t)}
    assert culprits(CHAIN, 6, m, edges=[(CHAIN.agent("p"), r)]) == set()


def test_perfectness_reduction_tied_four():
    reduced = perfectness_reduction(TIED_FOUR, 4)
    assert reduced.n == 8
    assert reduced.names[4:] == ("~a1", "~a2", "~a3", "~a4")
    # helpers come last in every list
    for x in range(4):
        assert reduced.acceptable(x)[-4:] == (4, 5, 6, 7)
        assert reduced.rank(x, 4) == TIED_FOUR.degree(x)
    found = opt_egal_brute(reduced, bound=4, perfect=True)
    assert found is not None and found[1] == 2


@pytest.mark.parametrize("odd, gamma, expected", [(False, 3, 2), (False, 0, 0), (True, 2, 1), (True, 1, 1)])
def test_perfectness_reduction_parity(odd, gamma, expected):
    profile = PATH if odd else TWO_STABLE
    reduced = perfectness_reduction(profile, gamma)
    assert reduced.n - profile.n == expected
    assert reduced.n % 2 == 0


@pytest.mark.parametrize(
    "profile, gamma, expected",
    [
        (TIED_FOUR, 2, (named(TIED_FOUR, "1-2", "3-4"), 2)),
        (TIED_FOUR, 4, (named(TIED_FOUR, "1-2", "3-4"), 2)),
        (TIED_FOUR, 1, None),
        (NO_STABLE, 4, None),
        (TWO_STABLE, 2, (named(TWO_STABLE, "1-2", "3-4"), 2)),
    ],
)
def test_solve_egal_ties_examples(profile, gamma, expected):
    assert solve_egal_ties(profile, gamma, optimal=True) == expected


@pytest.mark.slow
def test_no_stable_matching_large_budget():
    assert solve_egal_ties(NO_STABLE, 10) is None


def test_families_agree_on_tied_four():
    expected = (named(TIED_FOUR, "1-2", "3-4"), 2)
    assert solve_egal_ties(TIED_FOUR, 2, "exhaustive", optimal=True) == expected
    assert solve_egal_ties(TIED_FOUR, 2, "random", seed=5, optimal=True) == expected


def test_helper_edges_form_one_guess_element():
    # 6 costly edges among the agents, 16 to the helpers grouped per agent
    groups = edge_universe(NO_STABLE, 4)
    assert sorted(len(g) for g in groups) == [1] * 6 + [4] * 4
    assert solve_egal_ties(NO_STABLE, 4, "exhaustive") is None
    assert solve_egal_ties(TIED_FOUR, 4, "exhaustive", optimal=True) == (named(TIED_FOUR, "1-2", "3-4"), 2)


def test_parallel_scan_matches_serial():
    serial = solve_egal_ties(TIED_FOUR, 3, optimal=True)
    parallel = solve_egal_ties(TIED_FOUR, 3, optimal=True, jobs=2)
    assert serial == parallel
    assert solve_egal_ties(NO_STABLE, 4, jobs=2) is None


def test_unknown_family():
    with pytest.raises(DomainError):
        solve_perfect_egal(TIED_FOUR, 2, "greedy")


def test_odd_active_agents_have_no_perfect_matching():
    assert solve_perfect_egal(PATH, 5) is None


@pytest.mark.parametrize("c, gamma, cost", [(1, 2, 2), (1, 1, None), (3, 2, 2), (1, 4, 2)])
def test_constant_cost_tied_four(c, gamma, cost):
    found = solve_egal_constant(TIED_FOUR, gamma, c)
    if cost is None:
        assert found is None
    else:
        assert found == (named(TIED_FOUR, "1-2", "3-4"), cost)


def test_constant_cost_prefers_cheap_unmatched_agents():
    # a path 1-2-3: one agent has to stay single
    found = solve_egal_constant(PATH, 5, 1)
    assert found is not None
    assert found[1] == opt_egal_brute(PATH, CostSemantics("const", 1))[1]


def check_against_oracle(profile, gamma, family="combinatorial"):
    answer = opt_egal_brute(profile, bound=gamma)
    found = solve_egal_ties(profile, gamma, family, optimal=True)
    assert (found is None) == (answer is None)
    if found is not None:
        m, cost = found
        assert cost == answer[1]
        assert is_stable(profile, m)
        assert egalitarian_cost(profile, m) == cost


def check_blocking_bounds(profile, gamma):
    reduced = perfectness_reduction(profile, gamma)
    found = opt_egal_brute(reduced, bound=gamma, perfect=True, **BIG)
    if found is None:
        return
    m = found[0]
    assert is_perfect(reduced, m)
    blamed = culprits(reduced, gamma, m)
    assert len(blamed) <= gamma ** 2
    assert len(harmlessly_blocked_edges(reduced, gamma, m)) <= gamma ** 3
    matched = {x for e in m for x in e}
    assert blamed <= matched


def check_perfectness(profile, gamma):
    reduced = perfectness_reduction(profile, gamma)
    assert reduced.n <= profile.n + max(gamma, 0)
    original = opt_egal_brute(profile, bound=gamma)
    perfect = opt_egal_brute(reduced, bound=gamma, perfect=True, **BIG)
    assert (original is None) == (perfect is None)
    if perfect is not None:
        kept = frozenset(e for e in perfect[0] if e[1] < profile.n)
        assert is_stable(profile, kept)
        assert egalitarian_cost(profile, kept) == perfect[1]


@settings(max_examples=25, deadline=None)
@given(profiles(max_agents=6, ties=True), st.integers(0, 3))
def test_ties_solver_matches_oracle(profile, gamma):
    check_against_oracle(profile, gamma)


@settings(max_examples=25, deadline=None)
@given(profiles(max_agents=6, ties=True), st.integers(0, 3))
def test_perfectness_reduction_preserves_answers(profile, gamma):
    check_perfectness(profile, gamma)


@settings(max_examples=25, deadline=None)
@given(profiles(max_agents=6, ties=True), st.integers(1, 3))
def test_solutions_respect_blocking_bounds(profile, gamma):
    check_blocking_bounds(profile, gamma)


@settings(max_examples=15, deadline=None)
@given(profiles(max_agents=6, ties=True), st.integers(0, 3), st.integers(1, 2))
def test_constant_cost_matches_oracle(profile, gamma, c):
    answer = opt_egal_brute(profile, CostSemantics("const", c), bound=gamma)
    found = solve_egal_constant(profile, gamma, c)
    assert (found is None) == (answer is None)
    if found is not None:
        assert found[1] == answer[1]


@pytest.mark.slow
@settings(max_examples=500, deadline=None)
@given(profiles(max_agents=7, ties=True), st.integers(0, 4))
def test_ties_sweep(profile, gamma):
    family = "exhaustive" if len(edge_universe(profile, gamma)) <= 8 else "combinatorial"
    check_against_oracle(profile, gamma, family)
    check_perfectness(profile, gamma)
    if gamma:
        check_blocking_bounds(profile, gamma)
        check_goodness(profile, gamma)


@pytest.mark.slow
@settings(max_examples=100, deadline=None)
@given(profiles(max_agents=6, ties=True), st.integers(0, 3), st.integers(0, 2**16))
def test_random_family_sweep(profile, gamma, seed):
    assume(profile.n % 2 == 0)
    answer = opt_egal_brute(profile, bound=gamma, perfect=True)
    found = solve_perfect_egal(profile, gamma, "random", seed, optimal=True)
    if found is not None:
        assert answer is not None and found[1] >= answer[1]
        assert is_stable(profile, found[0])


@settings(max_examples=25, deadline=None)
@given(profiles(max_agents=6, ties=True), st.integers(0, 4))
def test_stable_solutions_use_kept_edges_only(profile, gamma):
    kept = classify_edges(profile, gamma).kept
    for m in all_stable_matchings(profile):
        if egalitarian_cost(profile, m) <= gamma:
            assert m <= kept


@given(profiles(max_agents=7, ties=True), st.integers(0, 4))
def test_kept_edges_that_block_each_other_are_costly(profile, gamma):
    c = classify_edges(profile, gamma)
    for e, f in combinations(sorted(c.kept), 2):
        if blocks_each_other(profile, e, f):
            assert e in c.costly_edges and f in c.costly_edges


def check_goodness(profile, gamma):
    reduced = perfectness_reduction(profile, gamma)
    found = opt_egal_brute(reduced, bound=gamma, perfect=True, **BIG)
    if found is None:
        return
    m = found[0]
    c = classify_edges(reduced, gamma)
    table = criticality_table(reduced, gamma, c)
    guessed = m & c.costly_edges
    agents = frozenset(u for e in guessed for u in table.critical_endpoints(e))
    assert m <= reduce_edges(reduced, gamma, SeparationContext(frozenset(guessed), agents))


@settings(max_examples=25, deadline=None)
@given(profiles(max_agents=6, ties=True), st.integers(1, 3))
def test_some_guess_keeps_the_whole_solution(profile, gamma):
    check_goodness(profile, gamma)


@pytest.mark.slow
@settings(max_examples=50, deadline=None)
@given(profiles(min_agents=4, max_agents=4, ties=True, complete=True), st.integers(0, 4))
def test_exhaustive_family_on_complete_profiles(profile, gamma):
    check_against_oracle(profile, gamma, "exhaustive")
