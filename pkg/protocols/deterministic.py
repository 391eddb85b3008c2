"""Deterministic gate induction: Clifford gates with Pauli corrections, GHZ/Bell-assisted rotations."""
from typing import List, Optional, Sequence, Tuple

import numpy as np

from diagonal import (
    DiagonalGate,
    MaskLike,
    PauliString,
    as_mask,
    choi_state,
    clifford_correction,
    embed,
    gate_state,
    ghz_plan,
    ghz_state,
    is_clifford,
    is_clifford_unitary,
    mask_bits,
    rotation,
)
from error_logger import NotCliffordError, RegisterError
from protocols.base_protocol import InductionRecord, RoundRecord, resource_ebits, single_round_record
from protocols.routines import choi_ebits, routine_T, routine_T_tilde
from statevec import (
    CX,
    CZ,
    Z,
    StateVector,
    apply_gate,
    discard_qubits,
    measure,
    rx,
    tensor,
)


def _support(mask: MaskLike, n: int) -> List[int]:
    return [q for q, b in enumerate(mask_bits(as_mask(mask, n), n)) if b]


def induce_clifford_diagonal(target: DiagonalGate, data: StateVector, forced: Optional[Sequence[int]] = None,
                             rng: Optional[np.random.Generator] = None,
                             targets: Optional[Sequence[int]] = None) -> Tuple[StateVector, InductionRecord]:
    """
    Induce a Clifford diagonal gate: routine T followed by its Pauli correction.

    Raises:
        NotCliffordError: If the target is not Clifford
    """
    if not is_clifford(target):
        raise NotCliffordError("gate-state induction with correction needs a Clifford diagonal gate")
    targets = list(range(data.n_qubits)) if targets is None else list(targets)
    resource = gate_state(target)
    result = routine_T(resource, data, forced, rng, targets)
    correction = clifford_correction(target, result.outcome)
    post = correction.apply_to(result.post_state, targets)
    ebits, per_cut = resource_ebits(resource)
    entry = RoundRecord(result.outcome, result.byproduct, correction, ebits, per_cut,
                        f"diagonal[{target.n}] clifford", result.probability, True)
    return post, single_round_record("clifford-diagonal", entry, embed(target, targets, data.n_qubits))


def induce_clifford_general(u: np.ndarray, data: StateVector, forced=None,
                            rng: Optional[np.random.Generator] = None,
                            targets: Optional[Sequence[int]] = None) -> Tuple[StateVector, InductionRecord]:
    """
    Induce a Clifford unitary through its Choi state and the correction U Z^j X^i U^dag.

    Raises:
        NotCliffordError: If U is not Clifford
    """
    u = np.asarray(u, dtype=complex)
    if not is_clifford_unitary(u):
        raise NotCliffordError("Choi-state correction needs a Clifford unitary")
    choi = choi_state(u)
    n = choi.n_qubits // 2
    targets = list(range(data.n_qubits)) if targets is None else list(targets)
    result = routine_T_tilde(choi, data, forced, rng, targets)
    undo = PauliString(n, 0, 0, result.byproduct.z_mask).multiply(PauliString(n, 0, result.byproduct.x_mask, 0))
    correction = PauliString.from_matrix(u @ undo.matrix() @ u.conj().T)
    post = correction.apply_to(result.post_state, targets)
    ebits, per_cut = choi_ebits(choi)
    entry = RoundRecord(result.outcome, result.byproduct, correction, ebits, per_cut,
                        f"unitary[{n}] clifford", result.probability, True)
    return post, single_round_record("clifford-choi", entry, u)


def _ghz_rotation_round(theta: float, support: Sequence[int], data: StateVector,
                        forced: Optional[Sequence[int]], rng: Optional[np.random.Generator]):
    """
    e^{i theta Z^support} from one GHZ (star graph) state.

    Memory qubit i >= 2 absorbs data qubit i by CX and is measured (k_i);
    Z^(sum k) and CZ with data qubit 1 put the parity on memory qubit 1,
    which is rotated by e^{i theta X} and measured (l). (Z^n)^l finishes.
    """
    n = len(support)
    if n < 2:
        raise RegisterError(f"GHZ rotation needs a mask of weight >= 2, got {n}")
    if forced is not None and len(forced) != n:
        raise RegisterError(f"forced outcome {tuple(forced)} has length {len(forced)}, expected {n}")
    resource = ghz_state(n)
    joint = tensor(resource, data)
    probability = 1.0
    outcomes = []
    for i in range(1, n):
        joint = apply_gate(joint, CX, [n + support[i], i])
        result = measure(joint, i, None if forced is None else forced[i - 1], rng)
        joint = result.post_state
        probability *= result.probability
        outcomes.append(result.outcome)
    if sum(outcomes) % 2:
        joint = apply_gate(joint, Z, [0])
    joint = apply_gate(joint, CZ, [0, n + support[0]])
    joint = apply_gate(joint, rx(theta), [0])
    result = measure(joint, 0, None if forced is None else forced[n - 1], rng)
    joint = result.post_state
    probability *= result.probability
    l = result.outcome
    outcomes.append(l)
    if l:
        for q in support:
            joint = apply_gate(joint, Z, [n + q])
    post = discard_qubits(joint, list(range(n)))
    ebits, per_cut = resource_ebits(resource)
    m = data.n_qubits
    byproduct = PauliString.z_string(m, sum(1 << (m - 1 - q) for q in support)) if l else PauliString.identity(m)
    return post, tuple(outcomes), probability, byproduct, ebits, per_cut


def induce_rotation_ghz(theta: float, mask: MaskLike, data: StateVector, forced: Optional[Sequence[int]] = None,
                        rng: Optional[np.random.Generator] = None) -> Tuple[StateVector, InductionRecord]:
    """
    Deterministic e^{i theta Z^mask} consuming one GHZ state.

    Args:
        theta: Rotation angle
        mask: Data qubits of the rotation (weight >= 2)
        data: Data register
        forced: Outcomes (k_2, ..., k_n, l)
        rng: Random generator for sampled outcomes
    """
    support = _support(mask, data.n_qubits)
    post, outcome, probability, byproduct, ebits, per_cut = _ghz_rotation_round(theta, support, data, forced, rng)
    entry = RoundRecord(outcome, PauliString.identity(data.n_qubits), byproduct, ebits, per_cut,
                        f"rotation[{len(support)}] {theta:.12g}", probability, True)
    return post, single_round_record("rotation-ghz", entry, rotation(mask, theta, data.n_qubits))


def induce_rotation_bell(theta: float, data: StateVector, forced: Optional[Sequence[int]] = None,
                         rng: Optional[np.random.Generator] = None,
                         targets: Sequence[int] = (0, 1)) -> Tuple[StateVector, InductionRecord]:
    """Deterministic e^{i theta ZZ} on two data qubits consuming one Bell-equivalent (CZ gate) state."""
    n = data.n_qubits
    mask = sum(1 << (n - 1 - q) for q in targets)
    if len(set(targets)) != 2:
        raise RegisterError(f"Bell rotation needs two distinct targets, got {tuple(targets)}")
    post, record = induce_rotation_ghz(theta, mask, data, forced, rng)
    return post, InductionRecord("rotation-bell", record.rounds, record.accumulated_gate, True)


def induce_diagonal_ghz(gate: DiagonalGate, data: StateVector,
                        forced: Optional[Sequence[Sequence[int]]] = None,
                        rng: Optional[np.random.Generator] = None) -> Tuple[StateVector, InductionRecord]:
    """
    Any diagonal gate as weight-1 local rotations plus one GHZ-induced rotation per multiqubit Walsh term.

    Args:
        gate: Diagonal gate on the whole data register
        data: Data register
        forced: Per-term outcome lists, in the plan's term order
        rng: Random generator for sampled outcomes
    """
    if gate.n != data.n_qubits:
        raise RegisterError(f"gate arity {gate.n} does not match {data.n_qubits} data qubits")
    plan = ghz_plan(gate)
    state = data
    for mask, angle in plan.local_terms:
        q = _support(mask, gate.n)[0]
        state = apply_gate(state, np.diag([np.exp(1j * angle), np.exp(-1j * angle)]), [q])
    rounds = []
    for index, (mask, angle) in enumerate(plan.terms):
        term_forced = forced[index] if forced is not None and index < len(forced) else None
        state, record = induce_rotation_ghz(angle, mask, state, term_forced, rng)
        rounds.extend(record.rounds)
    return state, InductionRecord("diagonal-ghz", tuple(rounds), gate, True)
