import json

import pytest
from click.testing import CliRunner

from instances import NO_STABLE, TEN_AGENTS, TIED_FOUR, TWO_STABLE
from roommates.cli import cli
from roommates.formats import parse_instance, read_header


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(cli, [str(a) for a in args])

    return invoke


def report_of(result):
    """The JSON report, skipping any status line echoed before it."""
    text = result.output
    return json.loads(text[text.index("{"):])


def test_solve_egal_with_ties(run, instance_file):
    result = run("solve", "egal", instance_file(TIED_FOUR), "--gamma", 2)
    assert result.exit_code == 0, result.output
    report = report_of(result)
    assert report["schema"] == 1
    assert report["status"] == "found"
    assert report["value"] == 2
    assert report["matching"] == [["1", "2"], ["3", "4"]]
    assert report["blocking_pairs"] == []
    assert report["extra"]["method"] == "separation"
    assert report["extra"]["family"] == "combinatorial"


def test_solve_egal_without_ties_uses_branching(run, instance_file):
    result = run("solve", "egal", instance_file(TEN_AGENTS), "--gamma", 8)
    assert result.exit_code == 0, result.output
    report = report_of(result)
    assert report["extra"]["method"] == "branching"
    assert report["value"] == 8
    assert report["matching"] == [["1", "7"], ["2", "8"], ["3", "6"], ["5", "10"]]


def test_solve_egal_constant_cost(run, instance_file):
    result = run("solve", "egal", instance_file(TIED_FOUR), "--gamma", 2, "--cost-model", "const:1")
    assert result.exit_code == 0, result.output
    assert report_of(result)["extra"]["method"] == "constant-cost"


def test_solve_egal_not_found(run, instance_file):
    result = run("solve", "egal", instance_file(TIED_FOUR), "--gamma", 1)
    assert result.exit_code == 1
    assert report_of(result)["status"] == "not_found"


def test_zero_cost_model_is_refused(run, instance_file):
    result = run("solve", "egal", instance_file(TIED_FOUR), "--gamma", 0, "--cost-model", "zero")
    assert result.exit_code == 2


@pytest.mark.parametrize("family", ["random:0", "greedy", "exhaustive:5"])
def test_bad_family(run, instance_file, family):
    result = run("solve", "egal", instance_file(TIED_FOUR), "--gamma", 2, "--family", family)
    assert result.exit_code == 2


def test_malformed_instance(run, tmp_path):
    path = tmp_path / "broken.sr"
    path.write_text("prefs 1: 2\n", encoding="utf-8")
    result = run("oracle", "stable-all", path)
    assert result.exit_code == 2
    assert "❌ Error" in result.output


def test_missing_file(run, tmp_path):
    assert run("phase1", tmp_path / "absent.sr").exit_code == 2


def test_solve_mbp_and_mba(run, instance_file):
    path = instance_file(NO_STABLE)
    report = report_of(run("solve", "mbp", path, "--max-bp", 1))
    assert report["value"] == 1
    assert len(report["blocking_pairs"]) == 1
    report = report_of(run("solve", "mba", path, "--max-ba", 2))
    assert report["value"] == 2
    assert run("solve", "mbp", path, "--max-bp", 0).exit_code == 1


def test_kernelize(run, instance_file, tmp_path):
    out = tmp_path / "kernel.sr"
    result = run("kernelize", instance_file(TEN_AGENTS), "--gamma", 8, "-o", out)
    assert result.exit_code == 0, result.output
    extra = report_of(result)["extra"]
    assert extra["gamma_hat"] == 6
    assert extra["dummies"] == 6
    assert extra["ordered_pairs"] == [["1", "8"], ["1", "9"]]
    text = out.read_text(encoding="utf-8")
    assert read_header(text) == {"gamma_hat": "6"}
    assert parse_instance(text).n == extra["kernel_agents"]


def test_phase1(run, instance_file):
    result = run("phase1", instance_file(TEN_AGENTS))
    assert result.exit_code == 0, result.output
    extra = report_of(result)["extra"]
    assert extra["marked_agents"] == ["4", "9"]
    assert extra["fixed_pairs"] == [["5", "10"]]
    assert extra["first_unmarked"]["1"] == "6"


def test_oracle_stable_all(run, instance_file):
    report = report_of(run("oracle", "stable-all", instance_file(NO_STABLE)))
    assert report["value"] == 0
    assert report["extra"]["stable_matchings"] == []
    report = report_of(run("oracle", "stable-all", instance_file(TWO_STABLE)))
    assert report["value"] == 2


def test_oracle_caps(run, instance_file):
    result = run("oracle", "mbp", instance_file(TEN_AGENTS), "--max-agents", 4)
    assert result.exit_code == 2


def test_oracle_egal_zero(run, instance_file):
    report = report_of(run("oracle", "egal", instance_file(TIED_FOUR), "--cost-model", "zero"))
    assert report["value"] == 0
    assert report["extra"]["cost_model"] == "zero"


def test_reports_are_reproducible(run, instance_file):
    path = instance_file(TIED_FOUR)
    first = report_of(run("solve", "egal", path, "--gamma", 3, "--optimal"))
    second = report_of(run("solve", "egal", path, "--gamma", 3, "--optimal"))
    first.pop("timing_ms")
    second.pop("timing_ms")
    assert first == second


def test_gen_mcis_mbp(run, tmp_path):
    graph = tmp_path / "graph.txt"
    graph.write_text("vertices v1\n", encoding="utf-8")
    out = tmp_path / "mbp.sr"
    result = run("gen", "mcis-mbp", graph, "-o", out, "--blocking-agents")
    assert result.exit_code == 0, result.output
    text = out.read_text(encoding="utf-8")
    assert text.startswith("# beta = 2\n")
    assert read_header(text) == {"beta": "2", "ba": "2"}
    assert parse_instance(text).n == report_of(result)["extra"]["agents"] == 24


def test_gen_sat3_egal(run, tmp_path):
    formula = tmp_path / "f.cnf"
    formula.write_text("p cnf 3 4\n1 2 3 0\n1 -2 -3 0\n-1 2 -3 0\n-1 -2 3 0\n", encoding="utf-8")
    out = tmp_path / "sat.sr"
    result = run("gen", "sat3-egal", formula, "-o", out)
    assert result.exit_code == 0, result.output
    assert read_header(out.read_text(encoding="utf-8")) == {"gamma": "0", "cost_model": "zero"}
    assert report_of(result)["extra"]["agents"] == 65


def test_gen_is_const(run, tmp_path):
    graph = tmp_path / "path.txt"
    graph.write_text("vertices a b c\nedge a b\nedge b c\n", encoding="utf-8")
    out = tmp_path / "is.sr"
    result = run("gen", "is-const", graph, "--k", 2, "--c", 1, "-o", out)
    assert result.exit_code == 0, result.output
    assert read_header(out.read_text(encoding="utf-8")) == {"gamma": "2", "cost_model": "const:1"}

    report = report_of(run("oracle", "egal", out, "--cost-model", "const:1", "--gamma", 2))
    assert report["status"] == "found"


def test_config_file_sets_default_family(run, instance_file, tmp_path):
    config = tmp_path / "roommates.yaml"
    config.write_text("default_family: exhaustive\n", encoding="utf-8")
    result = run("--config", config, "solve", "egal", instance_file(TIED_FOUR), "--gamma", 2)
    assert result.exit_code == 0, result.output
    assert report_of(result)["extra"]["family"] == "exhaustive"

    config.write_text("default_family: greedy\n", encoding="utf-8")
    assert run("--config", config, "phase1", instance_file(TIED_FOUR)).exit_code == 2


@pytest.mark.parametrize(
    "profile, extra_args",
    [(TEN_AGENTS, ()), (TIED_FOUR, ("--cost-model", "const:1"))],
)
def test_exact_methods_always_report_the_cheapest(run, instance_file, profile, extra_args):
    path = instance_file(profile)
    plain = report_of(run("solve", "egal", path, "--gamma", 9, *extra_args))
    cheapest = report_of(run("solve", "egal", path, "--gamma", 9, "--optimal", *extra_args))
    assert plain["extra"]["optimal"] is True
    assert plain["value"] == cheapest["value"]
    assert plain["matching"] == cheapest["matching"]


def test_separation_reports_the_optimal_flag(run, instance_file):
    path = instance_file(TIED_FOUR)
    assert report_of(run("solve", "egal", path, "--gamma", 3))["extra"]["optimal"] is False
    assert report_of(run("solve", "egal", path, "--gamma", 3, "--optimal"))["extra"]["optimal"] is True
