"""Tests for scenario parsing, the task runner and run reports."""
import json
import os
import sys

import numpy as np
import pytest
from jsonschema import Draft7Validator

# Add the project root to Python path
sys.path.insert(0, os.path.abspath('.'))

from cost import BELL_DETERMINISTIC, ITERATIVE
from error_logger import ScenarioError
from logger import RunLogger
from scenario import (Report, TaskReport, golden_scenario, golden_trace_params, load_scenario, parse_scenario,
                      replay_scenario, run_scenario, write_report)

ROOT = os.path.dirname(os.path.abspath(__file__))


def fixture(name: str) -> str:
    return os.path.join(ROOT, "scenarios", name)


def scenario_text(tasks, **extra) -> str:
    doc = {
        "seed": 3,
        "layout": {"modules": [{"position": [0, 0, 0]}, {"position": [1, 0, 0]}]},
        "tasks": tasks,
    }
    doc.update(extra)
    return json.dumps(doc)


def report_validator() -> Draft7Validator:
    with open(os.path.join(ROOT, "schemas", "report.schema.json"), "r", encoding="utf-8") as f:
        return Draft7Validator(json.load(f))


class TestParseErrors:
    """Malformed documents are rejected with a location."""

    def test_bad_json_reports_line(self):
        text = '{\n  "seed": 1,\n  "layout": ,\n}'
        with pytest.raises(ScenarioError) as excinfo:
            parse_scenario(text, "broken.json")
        assert excinfo.value.line == 3
        assert str(excinfo.value).startswith("line 3: ")

    def test_missing_seed(self):
        doc = json.loads(scenario_text([]))
        del doc["seed"]
        with pytest.raises(ScenarioError) as excinfo:
            parse_scenario(json.dumps(doc))
        assert excinfo.value.path == "seed"

    def test_non_positive_gamma(self):
        with pytest.raises(ScenarioError) as excinfo:
            parse_scenario(scenario_text([], coupling={"J": 1.0, "gamma": 0}))
        assert excinfo.value.path == "coupling.gamma"

    def test_unknown_key(self):
        with pytest.raises(ScenarioError):
            parse_scenario(scenario_text([], colour="blue"))

    def test_unknown_protocol(self):
        with pytest.raises(ScenarioError) as excinfo:
            parse_scenario(scenario_text([{"kind": "induce-gate", "protocol": "teleport-everything"}]))
        assert excinfo.value.path.startswith("tasks[0]")

    def test_missing_protocol_parameter(self):
        with pytest.raises(ScenarioError) as excinfo:
            parse_scenario(scenario_text([{"kind": "induce-gate", "protocol": "iterate-rotation", "theta": 0.1}]))
        assert excinfo.value.path == "tasks[0].mask"

    def test_resource_must_be_earlier_task(self):
        tasks = [{"name": "cz", "kind": "induce-gate", "protocol": "clifford-diagonal", "resource": "bond"}]
        with pytest.raises(ScenarioError) as excinfo:
            parse_scenario(scenario_text(tasks))
        assert excinfo.value.path == "tasks[0].resource"

    def test_graph_must_match_layout(self):
        tasks = [{"kind": "prepare-resource", "graph": {"vertices": 3, "edges": [[0, 1]]}}]
        with pytest.raises(ScenarioError) as excinfo:
            parse_scenario(scenario_text(tasks))
        assert excinfo.value.path == "tasks[0].graph.vertices"

    def test_non_unitary_matrix(self):
        gate = {"unitary": {"real": [[1, 1], [0, 1]]}}
        tasks = [{"kind": "induce-gate", "protocol": "iterate-general", "gate": gate}]
        with pytest.raises(ScenarioError) as excinfo:
            parse_scenario(scenario_text(tasks))
        assert excinfo.value.path == "tasks[0].gate"

    def test_duplicate_task_names(self):
        task = {"name": "a", "kind": "cost-analysis", "theta": 0.1}
        with pytest.raises(ScenarioError):
            parse_scenario(scenario_text([task, task]))

    def test_missing_file(self):
        with pytest.raises(OSError):
            load_scenario(fixture("does-not-exist.json"))

    def test_overrides_checked(self):
        scenario = parse_scenario(scenario_text([]))
        with pytest.raises(ScenarioError):
            scenario.with_overrides(seed=-1)
        with pytest.raises(ScenarioError):
            scenario.with_overrides(trials=0)
        assert scenario.with_overrides(seed=11, trials=5).seed == 11


class TestFixtures:
    """The bundled scenario files."""

    def test_two_module_cz(self):
        report = run_scenario(load_scenario(fixture("two_module_cz.json")))
        assert report.passed, [t.message for t in report.tasks]
        assert report.exit_code == 0
        bond, from_bond = report.tasks[0], report.tasks[1]
        assert bond.ebits == pytest.approx(1.0)
        assert from_bond.rounds == 1
        assert from_bond.fidelity == pytest.approx(1.0, abs=1e-9)

    def test_edge_pruning_fixture(self):
        report = run_scenario(load_scenario(fixture("appendix_e.json")))
        task = report.tasks[0]
        assert task.passed, task.message
        assert task.rounds == 3
        assert task.details["checkpoints_matched"] == [True, True, True]

    def test_cost_analysis(self):
        scenario = load_scenario(fixture("cost_analysis.json")).with_overrides(trials=200)
        report = run_scenario(scenario)
        small, large = report.tasks
        assert small.details["preferred"] == ITERATIVE
        assert large.details["preferred"] == BELL_DETERMINISTIC
        assert large.passed
        assert isinstance(large.replay["seed"], int)


class TestRunner:
    """Task execution, failures and determinism."""

    def test_reports_are_deterministic(self):
        scenario = load_scenario(fixture("two_module_cz.json"))
        first = run_scenario(scenario)
        second = run_scenario(scenario)
        assert first.to_json(include_timing=False) == second.to_json(include_timing=False)

    def test_seed_changes_outcomes(self):
        scenario = load_scenario(fixture("two_module_cz.json"))
        first = run_scenario(scenario)
        other = run_scenario(scenario.with_overrides(seed=8))
        assert first.to_json(include_timing=False) != other.to_json(include_timing=False)

    def test_replay_reproduces_fidelities(self):
        scenario = load_scenario(fixture("two_module_cz.json"))
        first = run_scenario(scenario)
        replayed = run_scenario(replay_scenario(scenario, first))
        for a, b in zip(first.tasks, replayed.tasks):
            assert a.status == b.status
            assert a.rounds == b.rounds
            assert a.fidelity == pytest.approx(b.fidelity, abs=1e-12)

    def test_failing_expectation_sets_exit_code(self):
        tasks = [{"kind": "induce-gate", "protocol": "clifford-diagonal", "gate": {"name": "cz"},
                  "expect": {"rounds": 2}}]
        report = run_scenario(parse_scenario(scenario_text(tasks)))
        assert not report.passed
        assert report.exit_code == 1
        assert "expected 2" in report.tasks[0].message

    def test_raising_task_does_not_stop_the_run(self):
        """A non-Clifford gate on the Clifford route fails alone."""
        tasks = [
            {"name": "bad", "kind": "induce-gate", "protocol": "clifford-diagonal",
             "gate": {"name": "zz", "theta": 0.1}},
            {"name": "good", "kind": "induce-gate", "protocol": "rotation-bell", "theta": 0.3},
        ]
        logger = RunLogger("failing", log_to_file=False, verbose=False)
        report = run_scenario(parse_scenario(scenario_text(tasks)), logger)
        assert [t.status for t in report.tasks] == ["failed", "passed"]
        assert report.tasks[0].message.startswith("NotCliffordError")
        assert logger.get_run_summary()["errors"] == 1

    def test_forced_outcomes_are_used(self):
        tasks = [{"kind": "induce-gate", "protocol": "iterate-rotation", "theta": 0.3, "mask": "11",
                  "forced": [[0, 1], [1, 1]]}]
        report = run_scenario(parse_scenario(scenario_text(tasks)))
        task = report.tasks[0]
        assert task.rounds == 2
        assert task.replay["forced"] == [[0, 1], [1, 1]]

    def test_basis_data_state(self):
        tasks = [{"kind": "induce-gate", "protocol": "rotation-ghz", "theta": 0.4, "mask": "111",
                  "data": {"state": "basis", "index": "101"}, "forced": [1, 0, 1]}]
        report = run_scenario(parse_scenario(scenario_text(tasks)))
        assert report.passed
        assert report.tasks[0].replay["forced"] == [1, 0, 1]


class TestReport:
    """Report serialization."""

    def test_report_matches_schema(self, tmp_path):
        report = run_scenario(load_scenario(fixture("two_module_cz.json")))
        path = write_report(report, str(tmp_path / "out" / "report.json"))
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
        errors = list(report_validator().iter_errors(doc))
        assert errors == []
        assert doc["totals"]["tasks"] == 5
        assert "wall_time" in doc

    def test_timing_excluded_on_request(self):
        doc = json.loads(run_scenario(golden_scenario()).to_json(include_timing=False))
        assert "wall_time" not in doc
        assert all("wall_time" not in t for t in doc["tasks"])
        assert list(report_validator().iter_errors(doc)) == []

    def test_totals(self):
        tasks = [TaskReport("a", "cost-analysis", "passed", None, 2.0, 0.5),
                 TaskReport("b", "induce-gate", "failed", 0.5, 1, 1.0)]
        totals = Report("r", 0, tasks, {}).totals()
        assert totals == {"tasks": 2, "passed": 1, "failed": 1, "rounds": 3.0, "ebits": 1.5}


class TestGolden:
    """The built-in edge-pruning trace."""

    def test_trace_parameters(self):
        params = golden_trace_params("appendix-e")
        theta = np.pi / 16
        assert params["checkpoints"][1] == pytest.approx([theta, -3 * theta, theta, theta])
        assert params["forced"][1][1] is None

    @pytest.mark.parametrize("seed", [0, 5])
    def test_golden_scenario_passes(self, seed):
        report = run_scenario(golden_scenario("appendix-e", seed))
        task = report.tasks[0]
        assert task.passed, task.message
        assert task.rounds == 3
        assert task.fidelity == pytest.approx(1.0, abs=1e-9)
        assert len(task.details["pair_angles"]) == 3

    def test_unknown_trace(self):
        with pytest.raises(ScenarioError):
            golden_trace_params("appendix-z")
