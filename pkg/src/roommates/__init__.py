"""Parameterized algorithms for Stable Roommates.

Egalitarian Stable Roommates with and without ties, Min-Block-Pair and
Min-Block-Agents Stable Roommates, exhaustive oracles and generators for the
hardness constructions.
"""

from .blocking import BlockingCertificate, exact_blocking_set_feasible, min_blocking_agents, min_blocking_pairs
from .config import Settings, get_settings, load_settings
from .coverfree import CoverFreeFamily, build_family, verify_property
from .errors import CapacityError, DomainError, InstanceFormatError, InvariantViolation, RoommatesError
from .formats import parse_dimacs, parse_graph, parse_instance, serialize_instance
from .matchingengine import WeightedGraph, min_cost_perfect_matching
from .model import (
    LIST_LENGTH,
    ZERO,
    CostSemantics,
    Profile,
    blocking_agents,
    blocking_pairs,
    egalitarian_cost,
    is_perfect,
    is_stable,
)
from .noties import kernelize, lift_kernel_solution, solve_egal_noties
from .oracle import all_stable_matchings, min_ba_brute, min_bp_brute, opt_egal_brute
from .phase1 import run_phase1
from .reductions import CnfFormula, ColoredGraph, is_to_egal_const, mcis_to_mbp, sat3_to_egal_zero
from .ties import perfectness_reduction, reduce_edges, solve_egal_constant, solve_egal_ties

__version__ = "1.0.0"

__all__ = [
    "BlockingCertificate",
    "CapacityError",
    "CnfFormula",
    "ColoredGraph",
    "CostSemantics",
    "CoverFreeFamily",
    "DomainError",
    "InstanceFormatError",
    "InvariantViolation",
    "LIST_LENGTH",
    "Profile",
    "RoommatesError",
    "Settings",
    "WeightedGraph",
    "ZERO",
    "all_stable_matchings",
    "blocking_agents",
    "blocking_pairs",
    "build_family",
    "egalitarian_cost",
    "exact_blocking_set_feasible",
    "get_settings",
    "is_perfect",
    "is_stable",
    "is_to_egal_const",
    "kernelize",
    "lift_kernel_solution",
    "load_settings",
    "mcis_to_mbp",
    "min_ba_brute",
    "min_blocking_agents",
    "min_blocking_pairs",
    "min_bp_brute",
    "min_cost_perfect_matching",
    "opt_egal_brute",
    "parse_dimacs",
    "parse_graph",
    "parse_instance",
    "perfectness_reduction",
    "reduce_edges",
    "run_phase1",
    "sat3_to_egal_zero",
    "serialize_instance",
    "solve_egal_constant",
    "solve_egal_noties",
    "solve_egal_ties",
    "verify_property",
]
