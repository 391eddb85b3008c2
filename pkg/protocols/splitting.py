"""Split a modular circuit into local blocks and intermodular pieces with an induction strategy each."""
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

import config
import cost
from diagonal import (
    DiagonalGate,
    conjugate_by_x,
    gate_state,
    ghz_plan,
    is_clifford,
    is_clifford_unitary,
    popcount,
    projector_phase,
    walsh_spectrum,
)
from error_logger import RegisterError, StrategyError
from protocols.base_protocol import resource_ebits
from protocols.toffoli import XorSpan, toffoli_target
from statevec import CCZ, CX, CZ, H, S, SWAP, T, X, Y, Z, rx, rz

GATE_STATE = "gate_state"
ITERATIVE = cost.ITERATIVE
BELL_DETERMINISTIC = cost.BELL_DETERMINISTIC
GHZ = "ghz"
CHOI_CLIFFORD = "choi_clifford"
ITERATIVE_TOFFOLI = "iterative_toffoli"

# Expected Toffoli cost is found by enumerating every outcome branch
ITERATIVE_TOFFOLI_MAX_QUBITS = 4

_FIXED = {
    "h": H, "x": X, "y": Y, "z": Z, "s": S, "t": T,
    "cx": CX, "cnot": CX, "cz": CZ, "swap": SWAP, "ccz": CCZ,
}
_ANGLE_GATES = ("rx", "rz", "zz")


def gate_arity(name: str) -> int:
    """Number of qubits a named gate acts on."""
    key = name.lower()
    if key in ("ccx", "toffoli"):
        return 3
    if key in _FIXED:
        return int(np.log2(_FIXED[key].shape[0]))
    if key in _ANGLE_GATES:
        return 2 if key == "zz" else 1
    raise RegisterError(f"unknown gate {name!r}")


@dataclass(frozen=True, eq=False)
class CircuitGate:
    """A gate on named qubits; `matrix` acts on `qubits` in order (first = most significant)."""

    name: str
    qubits: Tuple[int, ...]
    matrix: np.ndarray
    theta: Optional[float] = None

    @property
    def is_diagonal(self) -> bool:
        return bool(np.allclose(self.matrix, np.diag(np.diag(self.matrix)), atol=config.UNITARY_TOL))

    def diagonal_gate(self) -> DiagonalGate:
        return DiagonalGate(len(self.qubits), np.angle(np.diag(self.matrix)))


def standard_gate(name: str, qubits: Sequence[int], theta: Optional[float] = None) -> CircuitGate:
    """
    Build a named gate.

    Args:
        name: One of h, x, y, z, s, t, cx, cz, swap, ccz, ccx/toffoli, rx, rz, zz
        qubits: Qubits the gate acts on
        theta: Angle for rx (e^{i theta X}), rz (e^{i theta Z}) and zz (e^{i theta ZZ})
    """
    key = name.lower()
    qubits = tuple(int(q) for q in qubits)
    if key in ("ccx", "toffoli"):
        matrix = np.eye(8, dtype=complex)
        matrix[6:, 6:] = X
    elif key in _FIXED:
        matrix = _FIXED[key]
    elif key in _ANGLE_GATES:
        if theta is None:
            raise RegisterError(f"gate {name} needs an angle")
        if key == "rx":
            matrix = rx(theta)
        elif key == "rz":
            matrix = rz(theta)
        else:
            matrix = np.diag(np.exp(1j * theta * np.array([1, -1, -1, 1])))
    else:
        raise RegisterError(f"unknown gate {name!r}")
    if matrix.shape[0] != 2 ** len(qubits) or len(set(qubits)) != len(qubits):
        raise RegisterError(f"gate {name} cannot act on qubits {qubits}")
    return CircuitGate(key, qubits, matrix, theta)


@dataclass(frozen=True)
class LocalBlock:
    gates: Tuple[CircuitGate, ...]


@dataclass(frozen=True)
class IntermodularPiece:
    gate: CircuitGate
    modules: Tuple[int, ...]
    strategy: str
    resource: Dict[str, Any] = field(default_factory=dict)

    @property
    def ebits(self) -> float:
        return float(self.resource.get("ebits", 0.0))


@dataclass(frozen=True)
class CircuitPlan:
    segments: Tuple[Union[LocalBlock, IntermodularPiece], ...]

    @property
    def local_blocks(self) -> List[LocalBlock]:
        return [s for s in self.segments if isinstance(s, LocalBlock)]

    @property
    def pieces(self) -> List[IntermodularPiece]:
        return [s for s in self.segments if isinstance(s, IntermodularPiece)]

    @property
    def total_ebits(self) -> float:
        return float(sum(p.ebits for p in self.pieces))

    def to_dict(self) -> Dict[str, Any]:
        out = []
        for s in self.segments:
            if isinstance(s, LocalBlock):
                out.append({"kind": "local", "gates": [[g.name, list(g.qubits)] for g in s.gates]})
            else:
                out.append({"kind": "piece", "gate": s.gate.name, "qubits": list(s.gate.qubits),
                            "modules": list(s.modules), "strategy": s.strategy, "resource": s.resource})
        return {"segments": out, "total_ebits": self.total_ebits}


def _module_cuts(gate: CircuitGate, module_of) -> List[List[int]]:
    groups: Dict[int, List[int]] = {}
    for pos, q in enumerate(gate.qubits):
        groups.setdefault(module_of[q], []).append(pos)
    return list(groups.values())


def toffoli_family_index(gate: DiagonalGate) -> Optional[int]:
    """The index m when gate = e^{i pi |m><m|} up to a global phase, else None."""
    for m in range(2 ** gate.n):
        if gate.equals_up_to_phase(projector_phase(m, np.pi, gate.n)):
            return m
    return None


@lru_cache(maxsize=None)
def iterative_toffoli_cost(n: int, cuts: Optional[Tuple[Tuple[int, ...], ...]] = None) -> Tuple[float, float]:
    """
    Expected rounds and ebits of iterate_toffoli on n qubits.

    Every routine-T outcome has probability 2^-n, so the expectation is an
    average over the outcome tree; a branch ends on an outcome inside the
    XOR span or on a Clifford residual. Any e^{i pi |m><m|} costs the same,
    being F conjugated by X^m.

    Args:
        n: Number of qubits
        cuts: Qubit groups per module for the ebit count (default: one qubit per module)
    """
    if n > ITERATIVE_TOFFOLI_MAX_QUBITS:
        raise StrategyError(f"iterative Toffoli cost is enumerated up to {ITERATIVE_TOFFOLI_MAX_QUBITS} qubits, got {n}")
    target = toffoli_target(n)
    weight = 2.0 ** -n

    def expand(applied: DiagonalGate, xi: XorSpan) -> Tuple[float, float]:
        residual = target.compose(applied.inverse())
        ebits, _ = resource_ebits(gate_state(residual), cuts)
        if is_clifford(residual):
            return 1.0, ebits
        rounds = 1.0
        for k in range(2 ** n):
            if k in xi:
                continue
            r, e = expand(applied.compose(conjugate_by_x(residual, k)), xi.add(k))
            rounds += weight * r
            ebits += weight * e
        return rounds, ebits

    return expand(DiagonalGate.identity(n), XorSpan(n))



def choose_strategy(gate: CircuitGate, module_of) -> Tuple[str, Dict[str, Any]]:
    """
    Pick how an intermodular gate is induced and estimate its resources.

    Diagonal Clifford gates use a corrected gate state; a single non-Clifford
    two-qubit rotation goes iterative below the cost threshold and through
    one Bell pair otherwise; Toffoli-family gates on at most
    ITERATIVE_TOFFOLI_MAX_QUBITS qubits go iterative when that is expected to
    cost fewer ebits than the GHZ route; other diagonal gates use GHZ states
    per multiqubit Walsh term; non-diagonal Clifford gates use a Choi state.

    Raises:
        StrategyError: For non-diagonal non-Clifford gates
    """
    if gate.is_diagonal:
        dg = gate.diagonal_gate()
        if is_clifford(dg):
            ebits, per_cut = resource_ebits(gate_state(dg), _module_cuts(gate, module_of))
            return GATE_STATE, {"ebits": ebits, "ebits_per_cut": list(per_cut), "bell_equivalents": ebits}
        multi = {j: t for j, t in walsh_spectrum(dg).terms().items() if popcount(j) >= 2}
        if len(multi) == 1 and popcount(next(iter(multi))) == 2:
            theta = next(iter(multi.values()))
            if cost.strategy_advice(theta) == ITERATIVE:
                return ITERATIVE, {"theta": theta, "ebits": cost.expected_cost(cost.fold_angle(theta)),
                                   "expected_rounds": 2.0}
            return BELL_DETERMINISTIC, {"theta": theta, "ebits": 1.0}
        plan = ghz_plan(dg)
        index = toffoli_family_index(dg)
        if index is not None and dg.n <= ITERATIVE_TOFFOLI_MAX_QUBITS:
            cuts = tuple(tuple(c) for c in _module_cuts(gate, module_of))
            rounds, ebits = iterative_toffoli_cost(dg.n, cuts)
            if ebits < plan.ghz_count:
                return ITERATIVE_TOFFOLI, {"ebits": ebits, "expected_rounds": rounds, "projector_index": index,
                                           "ghz_ebits": float(plan.ghz_count)}
        return GHZ, {"ebits": float(plan.ghz_count), "ghz_states": plan.ghz_count,
                     "two_qubit_gates": plan.two_qubit_gate_count}
    if is_clifford_unitary(gate.matrix):
        return CHOI_CLIFFORD, {"ebits": float(len(gate.qubits))}
    raise StrategyError(f"no induction strategy for non-diagonal non-Clifford gate {gate.name} on {gate.qubits}")


def _expand(gate: CircuitGate) -> List[CircuitGate]:
    if gate.name in ("ccx", "toffoli"):
        target = gate.qubits[2]
        return [standard_gate("h", [target]), standard_gate("ccz", gate.qubits), standard_gate("h", [target])]
    return [gate]


def split_circuit(circuit: Sequence[CircuitGate],
                  module_of: Union[Sequence[int], Mapping[int, int]]) -> CircuitPlan:
    """
    Greedy left-to-right partition into local blocks and intermodular pieces.

    Args:
        circuit: Gates in execution order
        module_of: Module of every qubit (sequence indexed by qubit or mapping)

    Returns:
        Alternating local blocks and pieces, each piece with a strategy and resource estimate
    """
    segments: List[Union[LocalBlock, IntermodularPiece]] = []
    block: List[CircuitGate] = []
    for original in circuit:
        for gate in _expand(original):
            try:
                modules = tuple(sorted({module_of[q] for q in gate.qubits}))
            except (IndexError, KeyError):
                raise RegisterError(f"gate {gate.name} on {gate.qubits} uses a qubit without a module")
            if len(modules) == 1:
                block.append(gate)
                continue
            if block:
                segments.append(LocalBlock(tuple(block)))
                block = []
            strategy, resource = choose_strategy(gate, module_of)
            segments.append(IntermodularPiece(gate, modules, strategy, resource))
    if block:
        segments.append(LocalBlock(tuple(block)))
    return CircuitPlan(tuple(segments))
