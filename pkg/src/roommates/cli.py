"""CLI interface for the roommates solvers.

Commands:
    roommates solve egal         Stable matching of egalitarian cost at most --gamma
    roommates solve mbp          Matching with at most --max-bp blocking pairs
    roommates solve mba          Matching with at most --max-ba blocking agents
    roommates kernelize          Kernel of a tie-free instance
    roommates phase1             Phase-1 marking table
    roommates gen mcis-mbp       Colored graph -> blocking-pairs instance
    roommates gen sat3-egal      3-CNF -> zero-cost stable matching instance
    roommates gen is-const       Graph -> constant-cost egalitarian instance
    roommates oracle stable-all  Every stable matching (small instances)
    roommates oracle egal        Minimum-cost stable matching by enumeration
    roommates oracle mbp         Fewest blocking pairs by enumeration
    roommates oracle mba         Fewest blocking agents by enumeration

Every command prints one JSON report on stdout. Exit codes: 0 success,
1 when ``solve`` finds nothing within the bound, 2 on bad input.
"""

import functools
import time
from pathlib import Path

import click

from .blocking import min_blocking_agents, min_blocking_pairs
from .config import FAMILY_CHOICES, get_settings, load_settings, use_settings
from .errors import DomainError, InvariantViolation
from .formats import format_matching, parse_dimacs, parse_graph, parse_instance, serialize_instance
from .logger import get_logger, set_verbose
from .model import (
    LIST_LENGTH,
    CostSemantics,
    Profile,
    blocking_agents,
    blocking_pairs,
    egalitarian_cost,
    is_stable,
    sort_matching,
)
from .noties import kernelize as build_kernel
from .noties import solve_egal_noties
from .oracle import all_stable_matchings, min_ba_brute, min_bp_brute, opt_egal_brute
from .phase1 import phase1_no_instance, run_phase1
from .reductions import is_to_egal_const, mcis_to_mbp, sat3_to_egal_zero
from .report import FOUND, NOT_FOUND, OK, TRIVIAL_NO, SolveReport, to_json
from .ties import solve_egal_constant, solve_egal_ties

logger = get_logger(__name__)

INSTANCE = click.Path(exists=True, dir_okay=False, path_type=Path)


def read_instance(path: Path) -> Profile:
    """Parse an instance file."""
    return parse_instance(path.read_text(encoding="utf-8"))


def parse_family(text: str | None) -> tuple[str, int | None]:
    """Split ``random:<trials>`` into the strategy name and its trial count."""
    text = text or get_settings().default_family
    name, _, trials = text.partition(":")
    if name not in FAMILY_CHOICES:
        raise click.BadParameter(f"expected one of {', '.join(FAMILY_CHOICES)} (random:<trials>)", param_hint="--family")
    if not trials:
        return name, None
    if name != "random" or not trials.isdigit() or int(trials) == 0:
        raise click.BadParameter("only random takes a positive trial count", param_hint="--family")
    return name, int(trials)


def parse_cost_model(text: str) -> CostSemantics:
    try:
        return CostSemantics.parse(text)
    except DomainError as e:
        raise click.BadParameter(str(e), param_hint="--cost-model")


def emit(report: SolveReport, started: float, output: Path | None = None) -> None:
    """Print the report (or write it to ``output``)."""
    report.timing_ms = round((time.perf_counter() - started) * 1000, 3)
    text = to_json(report)
    if output is None:
        click.echo(text)
    else:
        output.write_text(text + "\n", encoding="utf-8")
        logger.info(f"Report written to {output}")


def handle_errors(func):
    """Turn domain errors into ``❌ Error`` messages with exit code 2."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ValueError, OSError) as e:
            click.echo(f"❌ Error: {e}", err=True)
            raise SystemExit(2)

    return wrapper


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Debug logging on stderr")
@click.option("--config", "config_path", type=INSTANCE, help="YAML settings file")
def cli(verbose: bool, config_path: Path | None):
    """Parameterized solvers for Stable Roommates.

    Egalitarian cost, blocking pairs and blocking agents, with exhaustive
    oracles and generators for the hardness constructions.
    """
    set_verbose(verbose)
    try:
        use_settings(load_settings(config_path))
    except ValueError as e:
        click.echo(f"❌ Error: {e}", err=True)
        raise SystemExit(2)


@cli.group()
def solve():
    """Parameterized solvers."""
    pass


@solve.command("egal")
@click.argument("instance", type=INSTANCE)
@click.option("--gamma", type=click.IntRange(min=0), required=True, help="Cost bound")
@click.option("--cost-model", default="listlen", show_default=True, help="listlen | const:<c>")
@click.option("--family", default=None, help="combinatorial | exhaustive | random:<trials>")
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Seed for random:<trials>")
@click.option(
    "--optimal",
    is_flag=True,
    help="Return the cheapest matching within the bound (the branching and constant-cost methods always do)",
)
@click.option("--jobs", type=click.IntRange(min=1), default=None, help="Worker processes")
@click.option("--method", type=click.Choice(["auto", "branching", "separation"]), default="auto", show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path), help="Write the report here")
@handle_errors
def solve_egal(instance, gamma, cost_model, family, seed, optimal, jobs, method, output):
    """Stable matching with egalitarian cost at most GAMMA."""
    started = time.perf_counter()
    settings = get_settings()
    semantics = parse_cost_model(cost_model)
    if semantics.kind == "zero":
        raise click.UsageError("the zero cost model is only offered by 'oracle egal --cost-model zero'")
    family, trials = parse_family(family)
    seed = settings.default_seed if seed is None else seed
    jobs = settings.jobs if jobs is None else jobs
    profile = read_instance(instance)

    report = SolveReport(command="solve egal", status=NOT_FOUND, bound=gamma, seed=seed)
    report.extra = {"cost_model": str(semantics), "agents": profile.n}

    if semantics.kind == "const":
        report.extra["method"] = "constant-cost"
        report.extra["optimal"] = True
        found = solve_egal_constant(profile, gamma, semantics.c, family, seed, trials=trials, jobs=jobs)
    elif method == "branching" or (method == "auto" and not profile.has_ties):
        report.extra["method"] = "branching"
        report.extra["optimal"] = True
        if not profile.has_ties and phase1_no_instance(run_phase1(profile), gamma):
            report.status = TRIVIAL_NO
            emit(report, started, output)
            return
        found = solve_egal_noties(profile, gamma)
    else:
        report.extra["method"] = "separation"
        report.extra["family"] = family
        report.extra["optimal"] = optimal
        found = solve_egal_ties(profile, gamma, family, seed, trials=trials, optimal=optimal, jobs=jobs)

    if found is None:
        emit(report, started, output)
        raise SystemExit(1)

    m, cost = found
    if not is_stable(profile, m) or egalitarian_cost(profile, m, semantics) != cost or cost > gamma:
        raise InvariantViolation("solver output failed re-validation")
    report.status = FOUND
    report.value = cost
    report.attach(profile, m)
    emit(report, started, output)


@solve.command("mbp")
@click.argument("instance", type=INSTANCE)
@click.option("--max-bp", type=click.IntRange(min=0), required=True, help="Blocking-pair bound")
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path), help="Write the report here")
@handle_errors
def solve_mbp(instance, max_bp, output):
    """Matching with the fewest blocking pairs, if at most MAX_BP."""
    started = time.perf_counter()
    profile = read_instance(instance)
    cert = min_blocking_pairs(profile, max_bp)
    report = SolveReport(command="solve mbp", status=NOT_FOUND, bound=max_bp)
    if cert is None:
        emit(report, started, output)
        raise SystemExit(1)
    if set(blocking_pairs(profile, cert.matching)) != cert.pairs:
        raise InvariantViolation("certificate blocking pairs failed re-validation")
    report.status = FOUND
    report.value = len(cert.pairs)
    report.attach(profile, cert.matching)
    emit(report, started, output)


@solve.command("mba")
@click.argument("instance", type=INSTANCE)
@click.option("--max-ba", type=click.IntRange(min=0), required=True, help="Blocking-agent bound")
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path), help="Write the report here")
@handle_errors
def solve_mba(instance, max_ba, output):
    """Matching with the fewest blocking agents, if at most MAX_BA."""
    started = time.perf_counter()
    profile = read_instance(instance)
    cert = min_blocking_agents(profile, max_ba)
    report = SolveReport(command="solve mba", status=NOT_FOUND, bound=max_ba)
    if cert is None:
        emit(report, started, output)
        raise SystemExit(1)
    if set(blocking_agents(profile, cert.matching)) != cert.agents:
        raise InvariantViolation("certificate blocking agents failed re-validation")
    report.status = FOUND
    report.value = len(cert.agents)
    report.attach(profile, cert.matching)
    emit(report, started, output)


@cli.command()
@click.argument("instance", type=INSTANCE)
@click.option("--gamma", type=click.IntRange(min=0), required=True, help="Cost bound")
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path), help="Write the kernel instance here")
@handle_errors
def kernelize(instance, gamma, output):
    """Kernel of a tie-free instance for cost bound GAMMA."""
    started = time.perf_counter()
    profile = read_instance(instance)
    outcome = build_kernel(profile, gamma)
    names = profile.names
    report = SolveReport(command="kernelize", status=TRIVIAL_NO if outcome.trivial_no else OK, bound=gamma)
    report.extra = {
        "reason": outcome.reason,
        "gamma_hat": outcome.gamma_hat,
        "fixed_pairs": [profile.pair_names(e) for e in sort_matching(outcome.fixed_pairs)],
        "marked_agents": sorted(names[a] for a in outcome.marked_agents),
        "ordered_pairs": sorted([names[x], names[y]] for x, y in outcome.ordered_pairs),
    }
    if outcome.kernel is not None:
        kernel = outcome.kernel
        report.extra["kernel_agents"] = kernel.profile.n
        report.extra["dummies"] = len(kernel.dummy_ids)
        if output is not None:
            output.write_text(serialize_instance(kernel.profile, {"gamma_hat": kernel.gamma_hat}), encoding="utf-8")
            click.echo(f"✓ Kernel written to {output}", err=True)
    emit(report, started)


@cli.command()
@click.argument("instance", type=INSTANCE)
@handle_errors
def phase1(instance):
    """Marked pairs, fixed pairs and marked agents after phase 1."""
    started = time.perf_counter()
    profile = read_instance(instance)
    result = run_phase1(profile)
    names = profile.names
    report = SolveReport(command="phase1", status=OK)
    report.extra = {
        "marked_pairs": [profile.pair_names(e) for e in sort_matching(result.marked)],
        "fixed_pairs": [profile.pair_names(e) for e in sort_matching(result.fixed_pairs)],
        "marked_agents": sorted(names[a] for a in result.marked_agents),
        "first_unmarked": {
            names[x]: None if y is None else names[y] for x, y in enumerate(result.first_unmarked)
        },
    }
    emit(report, started)


@cli.group()
def gen():
    """Instance generators for the hardness constructions."""
    pass


def _write_generated(command: str, profile: Profile, header: dict, output: Path, started: float, **extra) -> None:
    output.write_text(serialize_instance(profile, header), encoding="utf-8")
    click.echo(f"✓ {profile.n} agents written to {output}", err=True)
    report = SolveReport(command=command, status=OK)
    report.extra = {"agents": profile.n, "edges": len(profile.edges()), **header, **extra}
    emit(report, started)


@gen.command("mcis-mbp")
@click.argument("graph", type=INSTANCE)
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--blocking-agents", is_flag=True, help="Also record the blocking-agent bound")
@handle_errors
def gen_mcis_mbp(graph, output, blocking_agents):
    """Multi-colored independent set -> min blocking pairs."""
    started = time.perf_counter()
    reduction = mcis_to_mbp(parse_graph(graph.read_text(encoding="utf-8")))
    header = {"beta": reduction.beta}
    if blocking_agents:
        header["ba"] = reduction.beta
    _write_generated("gen mcis-mbp", reduction.profile, header, output, started)


@gen.command("sat3-egal")
@click.argument("formula", type=INSTANCE)
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path), required=True)
@handle_errors
def gen_sat3_egal(formula, output):
    """3-CNF (each literal twice) -> zero-cost stable matching."""
    started = time.perf_counter()
    reduction = sat3_to_egal_zero(parse_dimacs(formula.read_text(encoding="utf-8")))
    _write_generated("gen sat3-egal", reduction.profile, {"gamma": 0, "cost_model": "zero"}, output, started)


@gen.command("is-const")
@click.argument("graph", type=INSTANCE)
@click.option("--k", "k", type=click.IntRange(min=1), required=True, help="Independent set size")
@click.option("--c", "c", type=click.IntRange(min=1), default=1, show_default=True, help="Cost of an unmatched agent")
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path), required=True)
@handle_errors
def gen_is_const(graph, k, c, output):
    """Independent set of size k -> egalitarian cost at most c*k."""
    started = time.perf_counter()
    reduction = is_to_egal_const(parse_graph(graph.read_text(encoding="utf-8")), k, c)
    header = {"gamma": reduction.gamma, "cost_model": f"const:{c}"}
    _write_generated("gen is-const", reduction.profile, header, output, started)


@cli.group()
def oracle():
    """Exhaustive ground truth for small instances."""
    pass


def cap_options(func):
    func = click.option("--max-edges", type=click.IntRange(min=0), default=None, help="Override the edge cap")(func)
    func = click.option("--max-agents", type=click.IntRange(min=0), default=None, help="Override the agent cap")(func)
    return func


def _oracle_report(command: str, profile: Profile, found, bound=None, **extra) -> SolveReport:
    report = SolveReport(command=command, status=NOT_FOUND if found is None else FOUND, bound=bound)
    report.extra = extra
    if found is not None:
        report.value = found[1]
        report.attach(profile, found[0])
    return report


@oracle.command("stable-all")
@click.argument("instance", type=INSTANCE)
@cap_options
@handle_errors
def oracle_stable_all(instance, max_agents, max_edges):
    """Every stable matching."""
    started = time.perf_counter()
    profile = read_instance(instance)
    found = all_stable_matchings(profile, max_agents=max_agents, max_edges=max_edges)
    report = SolveReport(command="oracle stable-all", status=OK, value=len(found))
    report.extra = {
        "stable_matchings": [
            {"matching": format_matching(profile, m), "cost": egalitarian_cost(profile, m)} for m in found
        ]
    }
    emit(report, started)


@oracle.command("egal")
@click.argument("instance", type=INSTANCE)
@click.option("--cost-model", default="listlen", show_default=True, help="listlen | zero | const:<c>")
@click.option("--gamma", type=click.IntRange(min=0), default=None, help="Only matchings of cost at most GAMMA")
@click.option("--perfect", is_flag=True, help="Only perfect matchings")
@cap_options
@handle_errors
def oracle_egal(instance, cost_model, gamma, perfect, max_agents, max_edges):
    """Minimum-cost stable matching."""
    started = time.perf_counter()
    semantics = parse_cost_model(cost_model) if cost_model else LIST_LENGTH
    profile = read_instance(instance)
    found = opt_egal_brute(profile, semantics, gamma, perfect, max_agents=max_agents, max_edges=max_edges)
    emit(_oracle_report("oracle egal", profile, found, gamma, cost_model=str(semantics)), started)


@oracle.command("mbp")
@click.argument("instance", type=INSTANCE)
@cap_options
@handle_errors
def oracle_mbp(instance, max_agents, max_edges):
    """Matching with the fewest blocking pairs."""
    started = time.perf_counter()
    profile = read_instance(instance)
    found = min_bp_brute(profile, max_agents=max_agents, max_edges=max_edges)
    emit(_oracle_report("oracle mbp", profile, found), started)


@oracle.command("mba")
@click.argument("instance", type=INSTANCE)
@cap_options
@handle_errors
def oracle_mba(instance, max_agents, max_edges):
    """Matching with the fewest blocking agents."""
    started = time.perf_counter()
    profile = read_instance(instance)
    found = min_ba_brute(profile, max_agents=max_agents, max_edges=max_edges)
    emit(_oracle_report("oracle mba", profile, found), started)


if __name__ == "__main__":
    cli()
