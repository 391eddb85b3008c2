"""Scenario files: JSON parsing against the versioned schema and the sequential task runner."""
import json
import os
import time
from dataclasses import dataclass, field, replace
from functools import lru_cache, partial
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np
import scipy
from jsonschema import Draft7Validator
from jsonschema.exceptions import best_match

import config
from cost import cost_profile, monte_carlo_cost
from coupling import CouplingModel, Module, ModuleLayout, schedule_pattern
from diagonal import (
    DiagonalGate,
    GraphSpec,
    clifford_correction,
    gate_state,
    graph_gate,
    is_clifford,
    qubit_bit,
    rotation,
    walsh_spectrum,
    zz_rotation,
)
from encoding import distribute_graph_state
from error_logger import (
    ErrorCategory,
    NonUnitaryError,
    NotCliffordError,
    RegisterError,
    ScenarioError,
    SimulationError,
    log_exceptions,
    log_info,
)
from logger import RunLogger
from protocols.base_protocol import InductionRecord, RoundRecord, resource_ebits, single_round_record
from protocols.deterministic import (
    induce_clifford_diagonal,
    induce_clifford_general,
    induce_diagonal_ghz,
    induce_rotation_bell,
    induce_rotation_ghz,
)
from protocols.iterative import IterativePairwise, iterate_general, iterate_pairwise, iterate_rotation
from protocols.routines import routine_T
from protocols.splitting import gate_arity, standard_gate
from protocols.toffoli import iterate_toffoli, toffoli_target
from statevec import (
    StateVector,
    apply_diagonal,
    apply_gate,
    fidelity_up_to_phase,
    is_unitary,
    new_basis_state,
    plus_state,
    random_state,
)

SCHEMA_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), "schemas", "scenario.schema.json")
GOLDEN_TRACES = ("appendix-e",)

# protocols whose forced outcomes are a single flat bit list
SINGLE_ROUND_PROTOCOLS = ("clifford-diagonal", "clifford-choi", "rotation-ghz", "rotation-bell")
# protocols that report their rounds to the run logger themselves
_SELF_LOGGING = ("iterate-rotation", "iterate-pairwise", "iterate-general", "iterate-toffoli")

_REQUIRED_PARAMS = {
    "clifford-diagonal": ("gate",),
    "clifford-choi": ("gate",),
    "diagonal-ghz": ("gate",),
    "iterate-general": ("gate",),
    "rotation-ghz": ("theta", "mask"),
    "iterate-rotation": ("theta", "mask"),
    "rotation-bell": ("theta",),
    "iterate-pairwise": ("graph",),
    "iterate-toffoli": ("n",),
}

Runner = Callable[[StateVector, Any, np.random.Generator], Tuple[StateVector, InductionRecord]]


@dataclass(frozen=True)
class TaskSpec:
    """One scenario task: its kind and the raw (schema-validated) parameters."""

    name: str
    kind: str
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int
    layout: ModuleLayout
    coupling: CouplingModel
    tasks: Tuple[TaskSpec, ...]
    trials: int = config.DEFAULT_TRIALS

    def with_overrides(self, seed: Optional[int] = None, trials: Optional[int] = None) -> "Scenario":
        """Copy with the command-line seed and trial count applied."""
        if seed is not None and not 0 <= seed < 2 ** 64:
            raise ScenarioError(f"seed {seed} is not a 64-bit unsigned integer", "seed")
        if trials is not None and trials < 1:
            raise ScenarioError(f"trials must be >= 1, got {trials}", "trials")
        return replace(self,
                       seed=self.seed if seed is None else seed,
                       trials=self.trials if trials is None else trials)


@dataclass
class TaskReport:
    """Outcome of one task; `replay` holds what re-runs it exactly."""

    name: str
    kind: str
    status: str = "failed"
    fidelity: Optional[float] = None
    rounds: Optional[float] = None
    ebits: Optional[float] = None
    transcript: Any = None
    replay: Optional[Dict[str, Any]] = None
    details: Dict[str, Any] = field(default_factory=dict)
    message: str = ""
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status == "passed"

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        out = {
            "name": self.name,
            "kind": self.kind,
            "status": self.status,
            "fidelity": self.fidelity,
            "rounds": self.rounds,
            "ebits": self.ebits,
            "transcript": self.transcript,
            "replay": self.replay,
            "details": self.details,
            "message": self.message,
        }
        if include_timing:
            out["wall_time"] = self.wall_time
        return out


@dataclass
class Report:
    scenario: str
    seed: int
    tasks: List[TaskReport]
    versions: Dict[str, str]
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(t.passed for t in self.tasks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def totals(self) -> Dict[str, Any]:
        return {
            "tasks": len(self.tasks),
            "passed": sum(1 for t in self.tasks if t.passed),
            "failed": sum(1 for t in self.tasks if not t.passed),
            "rounds": float(sum(t.rounds for t in self.tasks if t.rounds is not None)),
            "ebits": float(sum(t.ebits for t in self.tasks if t.ebits is not None)),
        }

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        out = {
            "schema_version": config.SCHEMA_VERSION,
            "scenario": self.scenario,
            "seed": self.seed,
            "versions": self.versions,
            "totals": self.totals(),
            "tasks": [t.to_dict(include_timing) for t in self.tasks],
        }
        if include_timing:
            out["wall_time"] = self.wall_time
        return out

    def to_json(self, include_timing: bool = True) -> str:
        """Canonical JSON (sorted keys); without timing it is byte-stable for a fixed seed."""
        return json.dumps(self.to_dict(include_timing), sort_keys=True, indent=2, default=_jsonable)


def _jsonable(value):
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def versions() -> Dict[str, str]:
    return {"modnet": config.VERSION, "numpy": np.__version__, "scipy": scipy.__version__}


@lru_cache(maxsize=1)
def _load_schema() -> Dict[str, Any]:
    with open(SCHEMA_PATH, "r", encoding="utf-8") as f:
        return json.load(f)


def _format_path(path) -> str:
    out = ""
    for part in path:
        if isinstance(part, int):
            out += f"[{part}]"
        else:
            out += f".{part}" if out else str(part)
    return out


def _graph_spec(doc: Dict[str, Any]) -> GraphSpec:
    edges = tuple(tuple(e) for e in doc["edges"])
    if "angles" in doc:
        return GraphSpec(doc["vertices"], edges, tuple(doc["angles"]))
    if "theta" in doc:
        return GraphSpec.uniform(doc["vertices"], edges, doc["theta"])
    return GraphSpec(doc["vertices"], edges)


def _gate(doc: Dict[str, Any]) -> Union[DiagonalGate, np.ndarray]:
    """Gate from a scenario gate object: a named gate, diagonal phases or an explicit unitary."""
    if "alpha" in doc:
        size = len(doc["alpha"])
        n = int(round(np.log2(size)))
        if 2 ** n != size:
            raise RegisterError(f"{size} phases is not a power of two")
        return DiagonalGate(n, doc["alpha"])
    if "unitary" in doc:
        real = np.asarray(doc["unitary"]["real"], dtype=float)
        imag = np.asarray(doc["unitary"].get("imag", np.zeros_like(real)), dtype=float)
        u = real + 1j * imag
        if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape != imag.shape:
            raise RegisterError(f"unitary must be square, got shape {u.shape}")
        if not is_unitary(u):
            raise NonUnitaryError("scenario matrix is not unitary")
        return u
    name = doc["name"]
    return standard_gate(name, range(gate_arity(name)), doc.get("theta")).matrix


def _diagonal(doc: Dict[str, Any]) -> DiagonalGate:
    gate = _gate(doc)
    if isinstance(gate, DiagonalGate):
        return gate
    if not np.allclose(gate, np.diag(np.diag(gate)), atol=config.UNITARY_TOL):
        raise RegisterError("protocol needs a diagonal gate")
    return DiagonalGate(int(round(np.log2(gate.shape[0]))), np.angle(np.diag(gate)))


def _unitary(doc: Dict[str, Any]) -> np.ndarray:
    gate = _gate(doc)
    return gate.matrix() if isinstance(gate, DiagonalGate) else gate


def _check_task(kind: str, params: Dict[str, Any], path: str, earlier: Dict[str, str],
                layout: ModuleLayout):
    """Cross-field checks the schema cannot express."""
    if "graph" in params:
        try:
            spec = _graph_spec(params["graph"])
        except SimulationError as e:
            raise ScenarioError(str(e), f"{path}.graph") from e
        if kind == "prepare-resource" and spec.vertices != layout.n_modules:
            raise ScenarioError(f"graph has {spec.vertices} vertices but the layout has "
                                f"{layout.n_modules} modules", f"{path}.graph.vertices")
    if "gate" in params:
        try:
            _gate(params["gate"])
        except SimulationError as e:
            raise ScenarioError(str(e), f"{path}.gate") from e

    data = params.get("data")
    if data is not None and data["state"] == "basis" and "index" not in data:
        raise ScenarioError("basis data state needs an index", f"{path}.data.index")

    if kind != "induce-gate":
        return
    protocol = params["protocol"]
    if "resource" in params:
        if protocol != "clifford-diagonal":
            raise ScenarioError("only clifford-diagonal tasks can consume a prepared resource", f"{path}.resource")
        if earlier.get(params["resource"]) != "prepare-resource":
            raise ScenarioError(f"resource {params['resource']!r} is not an earlier prepare-resource task",
                                f"{path}.resource")
        return
    for key in _REQUIRED_PARAMS[protocol]:
        if key not in params:
            raise ScenarioError(f"protocol {protocol} needs '{key}'", f"{path}.{key}")


def parse_scenario(text: str, source: str = "") -> Scenario:
    """
    Parse and validate a scenario document.

    Args:
        text: UTF-8 JSON document
        source: File name used in error messages and as the default scenario name

    Returns:
        Validated scenario

    Raises:
        ScenarioError: Malformed JSON (with line), schema violation (with field path),
            missing seed, or unresolved task references
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(e.msg, source, e.lineno) from e
    if isinstance(doc, dict) and "seed" not in doc:
        raise ScenarioError("missing seed; unseeded runs are not allowed", "seed")

    error = best_match(Draft7Validator(_load_schema()).iter_errors(doc))
    if error is not None:
        raise ScenarioError(error.message, _format_path(error.absolute_path) or "scenario")

    try:
        modules = tuple(
            Module(tuple(m["position"]), m.get("unit_size", 1),
                   tuple(tuple(o) for o in m["qubit_offsets"]) if "qubit_offsets" in m else None)
            for m in doc["layout"]["modules"]
        )
        layout = ModuleLayout(modules)
    except SimulationError as e:
        raise ScenarioError(str(e), "layout.modules") from e
    coupling_doc = doc.get("coupling", {})
    coupling = CouplingModel(coupling_doc.get("J", config.DEFAULT_J), coupling_doc.get("gamma", config.DEFAULT_GAMMA))

    tasks = []
    earlier: Dict[str, str] = {}
    for index, raw in enumerate(doc["tasks"]):
        path = f"tasks[{index}]"
        name = raw.get("name", f"task{index}")
        if name in earlier:
            raise ScenarioError(f"duplicate task name {name!r}", f"{path}.name")
        params = {k: v for k, v in raw.items() if k not in ("name", "kind")}
        _check_task(raw["kind"], params, path, earlier, layout)
        earlier[name] = raw["kind"]
        tasks.append(TaskSpec(name, raw["kind"], params))

    default_name = os.path.splitext(os.path.basename(source))[0] if source else "scenario"
    return Scenario(doc.get("name", default_name), doc["seed"], layout, coupling, tuple(tasks),
                    doc.get("trials", config.DEFAULT_TRIALS))


def load_scenario(path: str) -> Scenario:
    """Read and parse a scenario file; OSError propagates for missing files."""
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    return parse_scenario(text, path)


def golden_trace_params(trace: str) -> Dict[str, Any]:
    """
    Parameters of a built-in golden trace.

    "appendix-e": four-vertex graph, edges (0,2) (0,3) (1,3) (2,3) at pi/16,
    forced outcomes 0101 then 0.11; the accumulated gate is checked after
    each of the three rounds.
    """
    if trace not in GOLDEN_TRACES:
        raise ScenarioError(f"unknown golden trace {trace!r}", "trace")
    theta = np.pi / 16
    return {
        "graph": {"vertices": 4, "edges": [[0, 2], [0, 3], [1, 3], [2, 3]], "theta": theta},
        "forced": [[0, 1, 0, 1], [0, None, 1, 1], [1, 0]],
        "checkpoints": [
            [theta, -theta, theta, -theta],
            [theta, -3 * theta, theta, theta],
            [theta, theta, theta, theta],
        ],
        "data": {"state": "random"},
    }


def golden_scenario(trace: str = "appendix-e", seed: int = 0) -> Scenario:
    """Single-task scenario running a built-in golden trace on point-like modules in a row."""
    vertices = golden_trace_params(trace)["graph"]["vertices"]
    layout = ModuleLayout.point_like([(float(i), 0.0, 0.0) for i in range(vertices)], [1] * vertices)
    return Scenario(f"golden-{trace}", seed, layout, CouplingModel(),
                    (TaskSpec(trace, "golden-trace", {"trace": trace}),))


def _data_state(doc: Optional[Dict[str, Any]], n: int, rng: np.random.Generator) -> StateVector:
    if doc is None or doc["state"] == "random":
        return random_state(n, rng)
    if doc["state"] == "plus":
        return plus_state(n)
    return new_basis_state(n, doc["index"])


def _apply_target(data: StateVector, target: Union[DiagonalGate, np.ndarray]) -> StateVector:
    if isinstance(target, DiagonalGate):
        return apply_diagonal(data, target, range(data.n_qubits))
    return apply_gate(data, target, range(data.n_qubits))


def _fidelity(a: StateVector, b: StateVector) -> float:
    return float(min(1.0, max(0.0, fidelity_up_to_phase(a, b))))


def _judge(report: TaskReport, expect: Optional[Dict[str, Any]], problems: List[str]):
    """Set the task status from the expectations and any problems already found."""
    expect = expect or {}
    problems = list(problems)
    min_fidelity = expect.get("min_fidelity", 1 - config.FIDELITY_TOL)
    if report.fidelity is not None and report.fidelity < min_fidelity:
        problems.append(f"fidelity {report.fidelity:.12f} below {min_fidelity}")
    if "rounds" in expect and report.rounds != expect["rounds"]:
        problems.append(f"{report.rounds} rounds, expected {expect['rounds']}")
    if "ebits" in expect and abs((report.ebits or 0.0) - expect["ebits"]) > config.FIDELITY_TOL:
        problems.append(f"{report.ebits} ebits, expected {expect['ebits']}")
    if "mean_rounds" in expect:
        lo, hi = expect["mean_rounds"]
        if report.rounds is None or not lo <= report.rounds <= hi:
            problems.append(f"mean rounds {report.rounds} outside [{lo}, {hi}]")
    report.status = "failed" if problems else "passed"
    report.message = "; ".join(problems)


def _log_rounds(logger: RunLogger, record: InductionRecord):
    for number, entry in enumerate(record.rounds, start=1):
        logger.log_round(number, list(entry.outcome), entry.byproduct.label(),
                         None if entry.correction is None else entry.correction.label(),
                         entry.ebits, entry.success, {"target": entry.target, **entry.metadata})


def _induce_from_resource(name: str, spec: GraphSpec, resource: StateVector, data: StateVector,
                          forced, rng: np.random.Generator) -> Tuple[StateVector, InductionRecord]:
    """Consume a distributed graph-gate state with routine T and its Clifford correction."""
    gate = graph_gate(spec)
    if not is_clifford(gate):
        raise NotCliffordError(f"resource {name!r} is not the gate state of a Clifford graph gate")
    if data.n_qubits != gate.n:
        raise RegisterError(f"resource {name!r} has {gate.n} qubits, data has {data.n_qubits}")
    result = routine_T(resource, data, forced, rng)
    correction = clifford_correction(gate, result.outcome)
    post = correction.apply_to(result.post_state, range(data.n_qubits))
    ebits, per_cut = resource_ebits(resource)
    entry = RoundRecord(result.outcome, result.byproduct, correction, ebits, per_cut,
                        f"distributed graph[{len(spec.edges)}] clifford", result.probability, True,
                        {"resource": name})
    return post, single_round_record("clifford-diagonal", entry, gate)


def _induction_plan(params: Dict[str, Any], prepared: Dict[str, Tuple[GraphSpec, StateVector]],
                    logger: RunLogger) -> Tuple[int, Union[DiagonalGate, np.ndarray], Runner]:
    """Data width, target gate and a runner(data, forced, rng) for an induce-gate task."""
    protocol = params["protocol"]
    max_rounds = params.get("max_rounds")

    if protocol == "clifford-diagonal" and "resource" in params:
        name = params["resource"]
        if name not in prepared:
            raise ScenarioError(f"resource task {name!r} did not produce a state", "resource")
        spec, resource = prepared[name]
        return spec.vertices, graph_gate(spec), partial(_induce_from_resource, name, spec, resource)
    if protocol == "clifford-diagonal":
        gate = _diagonal(params["gate"])
        return gate.n, gate, partial(induce_clifford_diagonal, gate)
    if protocol == "diagonal-ghz":
        gate = _diagonal(params["gate"])
        return gate.n, gate, partial(induce_diagonal_ghz, gate)
    if protocol in ("clifford-choi", "iterate-general"):
        u = _unitary(params["gate"])
        n = int(round(np.log2(u.shape[0])))
        if protocol == "clifford-choi":
            return n, u, partial(induce_clifford_general, u)
        return n, u, partial(iterate_general, u, max_rounds=max_rounds, logger=logger)
    if protocol in ("rotation-ghz", "iterate-rotation"):
        theta, mask = float(params["theta"]), params["mask"]
        n = len(mask)
        target = rotation(mask, theta, n)
        if protocol == "rotation-ghz":
            return n, target, partial(induce_rotation_ghz, theta, mask)
        return n, target, partial(iterate_rotation, theta, mask, max_rounds=max_rounds, logger=logger)
    if protocol == "rotation-bell":
        theta = float(params["theta"])
        return 2, zz_rotation(theta), partial(induce_rotation_bell, theta)
    if protocol == "iterate-pairwise":
        spec = _graph_spec(params["graph"])
        return spec.vertices, graph_gate(spec), partial(iterate_pairwise, spec, max_rounds=max_rounds, logger=logger)
    if protocol == "iterate-toffoli":
        n = int(params["n"])
        return n, toffoli_target(n), partial(iterate_toffoli, n, max_rounds=max_rounds, logger=logger)
    raise ScenarioError(f"unknown protocol {protocol!r}", "protocol")


def _run_prepare(task: TaskSpec, scenario: Scenario, prepared, report: TaskReport):
    spec = _graph_spec(task.params["graph"])
    schedule = schedule_pattern(spec, scenario.layout, scenario.coupling)
    state = distribute_graph_state(scenario.layout, scenario.coupling, spec)
    ebits, per_cut = resource_ebits(state)
    report.fidelity = _fidelity(state, gate_state(graph_gate(spec)))
    report.rounds = len(schedule)
    report.ebits = ebits
    report.transcript = {
        "schedule": [{"edge": list(step.edge), "duration": step.duration} for step in schedule.steps],
        "total_time": schedule.total_time,
        "ebits_per_cut": list(per_cut),
    }
    report.replay = {"forced": None}
    _judge(report, task.params.get("expect"), [])
    if report.passed:
        prepared[task.name] = (spec, state)


def _run_induce(task: TaskSpec, rng: np.random.Generator, prepared, logger: RunLogger, report: TaskReport):
    params = task.params
    protocol = params["protocol"]
    n, target, runner = _induction_plan(params, prepared, logger)
    data = _data_state(params.get("data"), n, rng)
    post, record = runner(data, params.get("forced"), rng)
    if protocol not in _SELF_LOGGING:
        _log_rounds(logger, record)

    report.fidelity = _fidelity(post, _apply_target(data, target))
    report.rounds = record.n_rounds
    report.ebits = record.total_ebits
    report.transcript = record.to_dict()
    report.replay = {"forced": record.outcomes[0] if protocol in SINGLE_ROUND_PROTOCOLS else record.outcomes}
    report.details = {"protocol": protocol, "probability": record.probability}
    problems = [] if record.succeeded else [f"{record.protocol} did not finish in {record.n_rounds} rounds"]
    _judge(report, params.get("expect"), problems)


def _pair_angles(gate: DiagonalGate, spec: GraphSpec) -> List[float]:
    theta = walsh_spectrum(gate).theta
    n = spec.vertices
    return [float(theta[qubit_bit(a, n) | qubit_bit(b, n)]) for a, b in spec.edges]


def _run_golden(task: TaskSpec, rng: np.random.Generator, logger: RunLogger, report: TaskReport):
    params = dict(task.params)
    if "trace" in params:
        params = {**golden_trace_params(params.pop("trace")), **params}
    spec = _graph_spec(params["graph"])
    data = _data_state(params.get("data"), spec.vertices, rng)
    protocol = IterativePairwise(spec, data, params["forced"], rng, params.get("max_rounds"), logger)
    post, record = protocol.run()

    problems = [] if record.succeeded else ["trace did not complete the graph gate"]
    checkpoints = params.get("checkpoints", [])
    if checkpoints and record.n_rounds != len(checkpoints):
        problems.append(f"{record.n_rounds} rounds, trace has {len(checkpoints)} checkpoints")
    matched = []
    for index, angles in enumerate(checkpoints):
        expected = graph_gate(GraphSpec(spec.vertices, spec.edges, tuple(angles)))
        ok = index < len(protocol.history) and protocol.history[index].equals_up_to_phase(expected)
        matched.append(ok)
        if not ok:
            problems.append(f"accumulated gate after round {index + 1} does not match its checkpoint")

    report.fidelity = _fidelity(post, apply_diagonal(data, graph_gate(spec), range(spec.vertices)))
    report.rounds = record.n_rounds
    report.ebits = record.total_ebits
    report.transcript = record.to_dict()
    report.replay = {"forced": record.outcomes}
    report.details = {
        "checkpoints_matched": matched,
        "pair_angles": [_pair_angles(g, spec) for g in protocol.history],
        "probability": record.probability,
    }
    _judge(report, params.get("expect"), problems)


def _run_cost(task: TaskSpec, scenario: Scenario, rng: np.random.Generator, report: TaskReport):
    params = task.params
    theta = float(params["theta"])
    seed = int(rng.integers(0, 2 ** 63))
    result = monte_carlo_cost(theta, params.get("trials", scenario.trials), seed=seed,
                              workers=params.get("workers", 1))
    profile = cost_profile(theta)
    report.rounds = result.mean_rounds
    report.ebits = result.mean_ebits
    report.transcript = {"profile": profile.to_dict(), "monte_carlo": result.to_dict()}
    report.replay = {"seed": seed}
    report.details = {"preferred": profile.preferred, "expected_cost": profile.expected_cost}
    _judge(report, params.get("expect"), [])


@log_exceptions(ErrorCategory.SCENARIO)
def _execute_task(task: TaskSpec, scenario: Scenario, rng: np.random.Generator,
                  prepared: Dict[str, Tuple[GraphSpec, StateVector]], logger: RunLogger, report: TaskReport):
    if task.kind == "prepare-resource":
        _run_prepare(task, scenario, prepared, report)
    elif task.kind == "induce-gate":
        _run_induce(task, rng, prepared, logger, report)
    elif task.kind == "golden-trace":
        _run_golden(task, rng, logger, report)
    elif task.kind == "cost-analysis":
        _run_cost(task, scenario, rng, report)
    else:
        raise ScenarioError(f"unknown task kind {task.kind!r}", "kind")


def run_scenario(scenario: Scenario, logger: Optional[RunLogger] = None) -> Report:
    """
    Run every task in order.

    Task i draws its randomness from default_rng([seed, i]), so a report is
    reproducible from the seed alone. A task that raises is recorded as
    failed and the run moves on to the next task.

    Args:
        scenario: Parsed scenario
        logger: Run logger (default: silent, in memory)

    Returns:
        The run report
    """
    logger = logger or RunLogger(scenario.name, log_to_file=False, verbose=False)
    start = time.perf_counter()
    prepared: Dict[str, Tuple[GraphSpec, StateVector]] = {}
    reports = []
    for index, task in enumerate(scenario.tasks):
        rng = np.random.default_rng([scenario.seed, index])
        report = TaskReport(task.name, task.kind)
        logger.log_task_start(task.name, task.kind, task.params)
        task_start = time.perf_counter()
        try:
            _execute_task(task, scenario, rng, prepared, logger, report)
        except Exception as e:
            report.status = "failed"
            report.message = f"{type(e).__name__}: {e}"
            logger.log_error(type(e).__name__, str(e), {"task": task.name})
        report.wall_time = time.perf_counter() - task_start
        logger.log_task_end(task.name, report.status, report.fidelity,
                            int(round(report.rounds or 0)),
                            report.ebits or 0.0, report.wall_time, report.message)
        reports.append(report)

    report = Report(scenario.name, scenario.seed, reports, versions(), time.perf_counter() - start)
    totals = report.totals()
    log_info(f"scenario {scenario.name}: {totals['passed']}/{totals['tasks']} tasks passed",
             ErrorCategory.SCENARIO, {"seed": scenario.seed})
    return report


def replay_scenario(scenario: Scenario, report: Report) -> Scenario:
    """Copy of the scenario with every task's forced outcomes taken from a report's replay section."""
    by_name = {t.name: t for t in report.tasks}
    tasks = []
    for task in scenario.tasks:
        recorded = by_name.get(task.name)
        forced = None if recorded is None or recorded.replay is None else recorded.replay.get("forced")
        if forced is None:
            tasks.append(task)
        else:
            tasks.append(replace(task, params={**task.params, "forced": forced}))
    return replace(scenario, tasks=tuple(tasks))


def write_report(report: Report, path: str) -> str:
    """Write the report as JSON and return the path."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(report.to_json())
        f.write("\n")
    return path
