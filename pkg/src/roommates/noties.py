"""Egalitarian Stable Roommates without ties: kernelization and branching.

Both procedures start from the phase-1 table. Fixed pairs belong to every
stable matching and marked agents stay single in every stable matching, so
their cost is charged up front and the remaining budget ``gamma_hat`` only
covers the open agents (unmarked, not in a fixed pair).
"""

import math
from dataclasses import dataclass, field

from .errors import DomainError, InvariantViolation
from .logger import get_logger
from .model import (
    Matching,
    Pair,
    Profile,
    egalitarian_cost,
    fresh_names,
    is_stable,
    pair,
    partners,
    require_no_ties,
)
from .phase1 import Phase1Result, phase1_no_instance, run_phase1

logger = get_logger(__name__)


def reduced_budget(result: Phase1Result, gamma: int) -> int:
    """Budget left after charging fixed agents and marked agents."""
    profile = result.profile
    spent = sum(result.first_rank(x) for x in result.fixed_agents)
    spent += sum(profile.degree(x) for x in result.marked_agents)
    return gamma - spent


@dataclass(frozen=True)
class Kernel:
    """Reduced instance: open agents followed by paired dummies."""
    profile: Profile
    gamma_hat: int
    dummy_ids: frozenset[int]
    origin_map: tuple[int | None, ...]

    @property
    def original_agents(self) -> int:
        return self.profile.n - len(self.dummy_ids)


@dataclass(frozen=True)
class KernelOutcome:
    """Either a trivial no-instance or a kernel."""
    trivial_no: bool
    kernel: Kernel | None = None
    gamma_hat: int | None = None
    reason: str = ""
    ordered_pairs: frozenset[tuple[int, int]] = frozenset()
    fixed_pairs: frozenset[Pair] = frozenset()
    marked_agents: frozenset[int] = frozenset()


def kernelize(profile: Profile, gamma: int) -> KernelOutcome:
    """Shrink a tie-free instance to a kernel with lists of length ``gamma_hat + 1``.

    The kernel keeps the open agents. Each keeps the first ``gamma_hat + 1``
    positions of its list; an entry survives only if it is an open agent, the
    pair is unmarked and the agent sits within ``gamma_hat`` in the other list.
    Every other position, and every position past the end of a short list, is
    filled with a dummy so kept entries keep their original ranks and being
    single costs more than ``gamma_hat``. Dummies come in ``ceil(gamma_hat/2)``
    mutually-first pairs.

    Args:
        profile: Tie-free profile
        gamma: Cost bound

    Returns:
        KernelOutcome
    """
    require_no_ties(profile, "kernelization")
    result = run_phase1(profile)
    base = dict(fixed_pairs=result.fixed_pairs, marked_agents=result.marked_agents)

    if phase1_no_instance(result, gamma):
        logger.info(f"kernelize: trivial no-instance after phase-1 (gamma={gamma})")
        return KernelOutcome(True, reason="phase-1 bound exceeded", **base)

    gamma_hat = reduced_budget(result, gamma)
    if gamma_hat < 0:
        logger.info(f"kernelize: fixed and marked agents already cost more than gamma={gamma}")
        return KernelOutcome(True, gamma_hat=gamma_hat, reason="budget spent by fixed and marked agents", **base)
    open_agents = sorted(result.open_agents)
    # every pair of open agents in a stable matching costs at least one
    if 2 * gamma_hat < len(open_agents):
        logger.info(f"kernelize: {len(open_agents)} open agents exceed twice the budget {gamma_hat}")
        return KernelOutcome(True, gamma_hat=gamma_hat, reason="too many open agents", **base)

    ordered = frozenset(
        (x, y)
        for x in result.unmarked_agents
        for y in profile.acceptable(x)
        if profile.rank(x, y) > gamma_hat
    )

    half = math.ceil(gamma_hat / 2)
    dummy_count = 2 * half
    kernel_id = {a: i for i, a in enumerate(open_agents)}
    first_dummy = len(open_agents)
    open_set = set(open_agents)

    dummy_lists: list[list[int]] = [
        [first_dummy + (d + half) % dummy_count] for d in range(dummy_count)
    ]
    real_lists: list[list[int]] = []
    for t, a in enumerate(open_agents):
        listed = profile.acceptable(a)
        entries: list[int] = []
        used = 0
        kept = 0
        for i in range(gamma_hat + 1):
            x = listed[i] if i < len(listed) else None
            if (
                x is not None
                and x in open_set
                and not result.is_marked(a, x)
                and (x, a) not in ordered
            ):
                entries.append(kernel_id[x])
                kept += 1
            else:
                if used >= dummy_count:
                    return KernelOutcome(True, gamma_hat=gamma_hat, reason="no admissible partner",
                                         ordered_pairs=ordered, **base)
                # round-robin over the pool, starting at this agent's offset
                d = (t + used) % dummy_count
                entries.append(first_dummy + d)
                dummy_lists[d].append(kernel_id[a])
                used += 1
        if kept == 0:
            logger.info(f"kernelize: agent '{profile.names[a]}' has no admissible partner")
            return KernelOutcome(True, gamma_hat=gamma_hat, reason="no admissible partner",
                                 ordered_pairs=ordered, **base)
        real_lists.append(entries)

    names = [profile.names[a] for a in open_agents] + fresh_names(profile, "d", dummy_count)
    kernel_profile = Profile.from_lists(real_lists + dummy_lists, names)
    kernel = Kernel(
        profile=kernel_profile,
        gamma_hat=gamma_hat,
        dummy_ids=frozenset(range(first_dummy, first_dummy + dummy_count)),
        origin_map=tuple(open_agents) + (None,) * dummy_count,
    )
    logger.info(
        f"kernelize: {profile.n} agents -> {kernel_profile.n} "
        f"({len(open_agents)} original, {dummy_count} dummies), gamma_hat={gamma_hat}"
    )
    return KernelOutcome(False, kernel, gamma_hat, ordered_pairs=ordered, **base)


def lift_kernel_solution(outcome: KernelOutcome, kernel_matching: Matching) -> Matching:
    """Original-instance matching for a kernel matching (fixed pairs added, dummies dropped)."""
    if outcome.kernel is None:
        raise DomainError("a trivial no-instance has no solutions to lift")
    origin = outcome.kernel.origin_map
    lifted = set(outcome.fixed_pairs)
    for x, y in kernel_matching:
        if origin[x] is not None and origin[y] is not None:
            lifted.add(pair(origin[x], origin[y]))
    return frozenset(lifted)


@dataclass
class BranchingSolver:
    """Branch over partners of the lowest open agent, within the remaining budget.

    ``explored`` records ``(pair, pair_cost, budget_before)`` for every branch taken.
    """
    profile: Profile
    gamma: int
    explored: list[tuple[Pair, int, int]] = field(default_factory=list)
    leaves: int = 0

    def __post_init__(self):
        require_no_ties(self.profile, "the branching solver")

    def _blocks_closed(self, mate: dict[int, int], agents: tuple[int, int]) -> bool:
        profile = self.profile
        for a in agents:
            for z in profile.acceptable(a):
                if z == mate[a] or z not in mate:
                    continue
                if profile.prefers(a, z, mate[a]) and profile.prefers(z, a, mate[z]):
                    return True
        return False

    def solve(self) -> tuple[Matching, int] | None:
        profile = self.profile
        result = run_phase1(profile)
        if phase1_no_instance(result, self.gamma):
            logger.info(f"branching: phase-1 rules out cost <= {self.gamma}")
            return None

        budget = reduced_budget(result, self.gamma)
        open_agents = sorted(result.open_agents)
        mate = partners(result.fixed_pairs)
        best: tuple[Matching, int] | None = None

        def branch(remaining: int) -> None:
            nonlocal best
            u = next((a for a in open_agents if a not in mate), None)
            if u is None:
                self.leaves += 1
                m = frozenset(pair(x, y) for x, y in mate.items() if x < y)
                if not is_stable(profile, m):
                    return
                cost = egalitarian_cost(profile, m)
                if cost <= self.gamma and (best is None or (cost, sorted(m)) < (best[1], sorted(best[0]))):
                    best = (m, cost)
                return

            candidates = []
            for v in profile.acceptable(u):
                if v in mate or v not in result.open_agents or result.is_marked(u, v):
                    continue
                c = profile.rank(u, v) + profile.rank(v, u)
                if c <= remaining:
                    candidates.append((c, v))
            for c, v in sorted(candidates):
                self.explored.append((pair(u, v), c, remaining))
                mate[u], mate[v] = v, u
                if not self._blocks_closed(mate, (u, v)):
                    branch(remaining - c)
                del mate[u], mate[v]

        if budget >= 0:
            branch(budget)

        if best is not None:
            m, cost = best
            if not is_stable(profile, m) or cost > self.gamma:
                raise InvariantViolation("branching solver returned an unstable or over-budget matching")
        logger.info(
            f"branching: {len(self.explored)} branches, {self.leaves} leaves, "
            f"{'cost ' + str(best[1]) if best else 'no solution'} for gamma={self.gamma}"
        )
        return best


def solve_egal_noties(profile: Profile, gamma: int) -> tuple[Matching, int] | None:
    """Minimum-cost stable matching of cost at most ``gamma`` for a tie-free profile, or None."""
    return BranchingSolver(profile, gamma).solve()
