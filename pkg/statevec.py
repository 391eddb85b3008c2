"""Dense state-vector engine.

Qubit 0 is the most significant bit of a basis index: for n qubits the
basis state |b_0 b_1 ... b_{n-1}> sits at index sum_q b_q 2^(n-1-q).
Every operation returns a new StateVector; amplitude arrays are read-only.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, List, Optional, Sequence, Tuple, Union

import numpy as np

import config
from error_logger import (
    CodeSpaceError,
    NonUnitaryError,
    QubitLimitError,
    RegisterError,
    ZeroProbabilityError,
)

if TYPE_CHECKING:
    from diagonal import DiagonalGate

Bits = Tuple[int, ...]

_SQRT2_INV = 1 / np.sqrt(2)

# Gate matrices
I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV
S = np.array([[1, 0], [0, 1j]], dtype=complex)
T = np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex)
CX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
CCZ = np.diag([1, 1, 1, 1, 1, 1, 1, -1]).astype(complex)
CCX = np.eye(8, dtype=complex)
CCX[6:, 6:] = X


def rx(theta: float) -> np.ndarray:
    """e^{i theta X}."""
    return np.cos(theta) * I2 + 1j * np.sin(theta) * X


def rz(theta: float) -> np.ndarray:
    """e^{i theta Z}."""
    return np.diag([np.exp(1j * theta), np.exp(-1j * theta)])


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state of n qubits."""

    n_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= config.MAX_QUBITS:
            raise QubitLimitError(
                f"{self.n_qubits} qubits outside the allowed range 1..{config.MAX_QUBITS}")
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.size != 2 ** self.n_qubits:
            raise RegisterError(
                f"expected {2 ** self.n_qubits} amplitudes for {self.n_qubits} qubits, got {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1) > config.NORM_TOL:
            raise RegisterError(f"state not normalized (norm {norm:.12g})")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return self.amps.size

    def tensor_view(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per qubit (a writable copy)."""
        return self.amps.reshape([2] * self.n_qubits).copy()

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits})"


@dataclass(frozen=True)
class MeasurementResult:
    outcome: int
    probability: float
    post_state: StateVector


def from_amplitudes(amps: Sequence[complex]) -> StateVector:
    """Build a state from unnormalized amplitudes."""
    vec = np.asarray(amps, dtype=complex).reshape(-1)
    n = int(round(np.log2(vec.size))) if vec.size else 0
    if vec.size == 0 or 2 ** n != vec.size:
        raise RegisterError(f"amplitude count {vec.size} is not a power of two")
    norm = np.linalg.norm(vec)
    if norm < config.PROB_ZERO_TOL:
        raise RegisterError("cannot normalize the zero vector")
    return StateVector(n, vec / norm)


def _parse_bits(index: Union[str, Sequence[int]], n: int) -> Bits:
    bits = tuple(int(b) for b in index)
    if len(bits) != n or any(b not in (0, 1) for b in bits):
        raise RegisterError(f"basis label {index!r} is not a {n}-bit string")
    return bits


def bits_to_index(bits: Sequence[int]) -> int:
    index = 0
    for b in bits:
        index = (index << 1) | int(b)
    return index


def index_to_bits(index: int, n: int) -> Bits:
    return tuple((index >> (n - 1 - q)) & 1 for q in range(n))


def new_basis_state(n: int, index: Union[str, Sequence[int]]) -> StateVector:
    """
    Computational basis state |index> on n qubits.

    Args:
        n: Number of qubits
        index: Bit string (e.g. "010") or bit sequence, qubit 0 first

    Returns:
        The basis state
    """
    if n > config.MAX_QUBITS:
        raise QubitLimitError(f"{n} qubits exceed the configured maximum {config.MAX_QUBITS}")
    bits = _parse_bits(index, n)
    amps = np.zeros(2 ** n, dtype=complex)
    amps[bits_to_index(bits)] = 1.0
    return StateVector(n, amps)


def plus_state(n: int) -> StateVector:
    return StateVector(n, np.full(2 ** n, 2 ** (-n / 2), dtype=complex))


def random_state(n: int, rng: np.random.Generator) -> StateVector:
    """Random state with complex Gaussian amplitudes (unitarily invariant distribution)."""
    vec = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return from_amplitudes(vec)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """|a> (x) |b>, with a's qubits first."""
    return StateVector(a.n_qubits + b.n_qubits, np.kron(a.amps, b.amps))


def _check_targets(targets: Sequence[int], n: int) -> List[int]:
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise RegisterError(f"duplicate targets {targets}")
    if any(t < 0 or t >= n for t in targets):
        raise RegisterError(f"targets {targets} out of range for {n} qubits")
    return targets


def is_unitary(matrix: np.ndarray, tol: Optional[float] = None) -> bool:
    tol = config.UNITARY_TOL if tol is None else tol
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=tol))


def apply_gate(state: StateVector, matrix: np.ndarray, targets: Sequence[int]) -> StateVector:
    """
    Apply a k-qubit unitary to the listed target qubits.

    The first target is the most significant qubit of the matrix index.

    Args:
        state: Input state
        matrix: 2^k x 2^k unitary
        targets: Distinct qubit indices, length k

    Returns:
        The transformed state
    """
    n = state.n_qubits
    targets = _check_targets(targets, n)
    k = len(targets)
    u = np.asarray(matrix, dtype=complex)
    if u.shape != (2 ** k, 2 ** k):
        raise RegisterError(f"matrix shape {u.shape} does not match {k} targets")
    if not is_unitary(u):
        raise NonUnitaryError("gate matrix is not unitary")
    psi = state.amps.reshape([2] * n)
    out = np.tensordot(u.reshape([2] * (2 * k)), psi, axes=(list(range(k, 2 * k)), targets))
    out = np.moveaxis(out, list(range(k)), targets)
    return StateVector(n, out.reshape(-1))


def apply_diagonal(state: StateVector, gate: "DiagonalGate", targets: Sequence[int]) -> StateVector:
    """Multiply each amplitude by e^{i alpha_{i'}}, i' being the index restricted to `targets`."""
    n = state.n_qubits
    targets = _check_targets(targets, n)
    if gate.n != len(targets):
        raise RegisterError(f"gate arity {gate.n} does not match {len(targets)} targets")
    k = len(targets)
    psi = np.moveaxis(state.amps.reshape([2] * n), targets, list(range(k)))
    shape = psi.shape
    psi = psi.reshape(2 ** k, -1) * np.exp(1j * np.asarray(gate.alpha))[:, None]
    psi = np.moveaxis(psi.reshape(shape), list(range(k)), targets)
    return StateVector(n, psi.reshape(-1))


def _branch_probabilities(state: StateVector, qubit: int) -> np.ndarray:
    n = state.n_qubits
    psi = np.moveaxis(state.amps.reshape([2] * n), qubit, 0).reshape(2, -1)
    return np.sum(np.abs(psi) ** 2, axis=1)


def measure(state: StateVector, qubit: int, forced: Optional[int] = None,
            rng: Optional[np.random.Generator] = None) -> MeasurementResult:
    """
    Projective Z measurement of one qubit.

    Args:
        state: State to measure
        qubit: Qubit index
        forced: Outcome to post-select on instead of sampling
        rng: Random generator used when no outcome is forced

    Returns:
        MeasurementResult with the exact branch probability and the renormalized post-state
    """
    n = state.n_qubits
    _check_targets([qubit], n)
    probs = _branch_probabilities(state, qubit)
    if forced is None:
        if rng is None:
            raise ValueError("measure needs a forced outcome or a seeded random generator")
        outcome = 1 if rng.random() < probs[1] / probs.sum() else 0
    else:
        if forced not in (0, 1):
            raise RegisterError(f"forced outcome {forced!r} is not a bit")
        outcome = int(forced)
    probability = float(probs[outcome])
    if probability < config.PROB_ZERO_TOL:
        raise ZeroProbabilityError(
            f"outcome {outcome} on qubit {qubit} has probability {probability:.3g}")
    psi = state.tensor_view()
    index = [slice(None)] * n
    index[qubit] = 1 - outcome
    psi[tuple(index)] = 0.0
    post = StateVector(n, psi.reshape(-1) / np.sqrt(probability))
    return MeasurementResult(outcome, probability, post)


def measure_qubits(state: StateVector, qubits: Sequence[int], forced: Optional[Sequence[Optional[int]]] = None,
                   rng: Optional[np.random.Generator] = None) -> Tuple[Bits, float, StateVector]:
    """Measure several qubits in order; returns (outcomes, joint probability, post-state)."""
    if forced is not None and len(forced) != len(qubits):
        raise RegisterError(f"forced outcome {tuple(forced)} has length {len(forced)}, expected {len(qubits)}")
    outcomes = []
    probability = 1.0
    for pos, q in enumerate(qubits):
        result = measure(state, q, None if forced is None else forced[pos], rng)
        outcomes.append(result.outcome)
        probability *= result.probability
        state = result.post_state
    return tuple(outcomes), probability, state


def discard_qubits(state: StateVector, qubits: Sequence[int]) -> StateVector:
    """
    Remove qubits that sit in a computational basis product state.

    Raises CodeSpaceError when the qubits are entangled with the rest or
    in superposition (tolerance config.CODE_SPACE_TOL).
    """
    n = state.n_qubits
    qubits = _check_targets(qubits, n)
    if not qubits:
        return state
    keep = [q for q in range(n) if q not in qubits]
    if not keep:
        raise RegisterError("cannot discard every qubit")
    psi = np.moveaxis(state.amps.reshape([2] * n), keep + qubits, list(range(n)))
    psi = psi.reshape(2 ** len(keep), 2 ** len(qubits))
    weights = np.sum(np.abs(psi) ** 2, axis=0)
    column = int(np.argmax(weights))
    if 1 - weights[column] > config.CODE_SPACE_TOL:
        raise CodeSpaceError(
            f"qubits {qubits} are not in a computational basis state (max weight {weights[column]:.12g})")
    return from_amplitudes(psi[:, column])


def fidelity_up_to_phase(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2."""
    if a.n_qubits != b.n_qubits:
        raise RegisterError(f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits")
    return float(min(1.0, abs(np.vdot(a.amps, b.amps)) ** 2))


def _bipartition_matrix(state: StateVector, part: Sequence[int]) -> np.ndarray:
    n = state.n_qubits
    part = _check_targets(part, n)
    if not part or len(part) == n:
        raise RegisterError("subsystem must be a nonempty proper subset of the qubits")
    rest = [q for q in range(n) if q not in part]
    psi = np.moveaxis(state.amps.reshape([2] * n), part + rest, list(range(n)))
    return psi.reshape(2 ** len(part), -1)


def reduced_density_matrix(state: StateVector, part: Sequence[int]) -> np.ndarray:
    """Density matrix of `part` (in the listed qubit order) after tracing out the rest."""
    psi = _bipartition_matrix(state, part)
    return psi @ psi.conj().T


def entanglement_entropy(state: StateVector, part: Sequence[int]) -> float:
    """Von Neumann entropy (ebits) of the reduced state on `part`."""
    singular = np.linalg.svd(_bipartition_matrix(state, part), compute_uv=False)
    probs = singular ** 2
    probs = probs[probs > config.EIGEN_CUTOFF]
    return float(max(0.0, -np.sum(probs * np.log2(probs))))
