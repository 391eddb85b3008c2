"""Measurement-based routines consuming a gate state (T) or a Choi state (T-tilde).

The resource register always precedes the data register in the joint state.
"""
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

import config
from diagonal import PauliString, as_mask
from error_logger import CodeSpaceError, RegisterError
from statevec import (
    CX,
    H,
    SWAP,
    Bits,
    StateVector,
    apply_gate,
    discard_qubits,
    entanglement_entropy,
    measure_qubits,
    reduced_density_matrix,
    tensor,
)


@dataclass(frozen=True)
class RoutineResult:
    """Outcome of routine T: post = X^k L X^k |psi>."""

    outcome: Bits
    probability: float
    post_state: StateVector
    byproduct: PauliString


@dataclass(frozen=True)
class ChoiRoutineResult:
    """Outcome of routine T-tilde: post = U X^i Z^j |psi>."""

    i: Bits
    j: Bits
    probability: float
    post_state: StateVector
    byproduct: PauliString

    @property
    def outcome(self) -> Bits:
        return self.i + self.j


def _resolve_targets(targets: Optional[Sequence[int]], data: StateVector, n: int) -> list:
    targets = list(range(data.n_qubits)) if targets is None else list(targets)
    if len(targets) != n:
        raise RegisterError(f"resource acts on {n} qubits but {len(targets)} data targets were given")
    if len(set(targets)) != n or any(not 0 <= t < data.n_qubits for t in targets):
        raise RegisterError(f"invalid data targets {targets}")
    return targets


def routine_T(resource: StateVector, data: StateVector, forced: Optional[Sequence[int]] = None,
              rng: Optional[np.random.Generator] = None,
              targets: Optional[Sequence[int]] = None) -> RoutineResult:
    """
    Apply the diagonal gate stored in a gate state, up to an X^k byproduct.

    CX from each data target onto its memory qubit, then a computational
    measurement of the memory. Every outcome k has probability 2^-n.

    Args:
        resource: Gate state |L> on the memory register
        data: Data register
        forced: Optional outcome bits for the memory qubits
        rng: Random generator for sampled outcomes
        targets: Data qubits the gate acts on (default all)

    Returns:
        RoutineResult with the post-state on the data register
    """
    n = resource.n_qubits
    targets = _resolve_targets(targets, data, n)
    if forced is not None and len(forced) != n:
        raise RegisterError(f"forced outcome {tuple(forced)} has length {len(forced)}, expected {n}")
    joint = tensor(resource, data)
    for m, t in enumerate(targets):
        joint = apply_gate(joint, CX, [n + t, m])
    outcome, probability, joint = measure_qubits(joint, list(range(n)), forced, rng)
    post = discard_qubits(joint, list(range(n)))
    return RoutineResult(outcome, probability, post, PauliString.x_string(n, as_mask(outcome, n)))


def _split_choi_forced(forced, n: int) -> Optional[list]:
    if forced is None:
        return None
    forced = list(forced)
    if len(forced) == 2 and all(isinstance(part, (list, tuple)) for part in forced):
        forced = list(forced[0]) + list(forced[1])
    if len(forced) != 2 * n:
        raise RegisterError(f"forced outcome has length {len(forced)}, expected {2 * n}")
    return forced


def routine_T_tilde(choi: StateVector, data: StateVector, forced=None,
                    rng: Optional[np.random.Generator] = None,
                    targets: Optional[Sequence[int]] = None) -> ChoiRoutineResult:
    """
    Apply the unitary stored in a Choi state, up to an X^i Z^j byproduct.

    SWAP M' with the data, CX M' -> M, H on M', then measure M (i) and M' (j).
    Every (i, j) has probability 4^-n.

    Args:
        choi: Choi state on (M, M')
        data: Data register
        forced: Optional 2n outcome bits (i then j), flat or as an (i, j) pair
        rng: Random generator for sampled outcomes
        targets: Data qubits the unitary acts on (default all)
    """
    if choi.n_qubits % 2:
        raise CodeSpaceError("Choi state must have an even number of qubits")
    n = choi.n_qubits // 2
    targets = _resolve_targets(targets, data, n)
    rho_m = reduced_density_matrix(choi, list(range(n)))
    if not np.allclose(rho_m, np.eye(2 ** n) / 2 ** n, atol=config.CODE_SPACE_TOL):
        raise CodeSpaceError("malformed Choi state: memory half is not maximally mixed")
    forced = _split_choi_forced(forced, n)

    joint = tensor(choi, data)
    for q, t in enumerate(targets):
        joint = apply_gate(joint, SWAP, [n + q, 2 * n + t])
        joint = apply_gate(joint, CX, [n + q, q])
        joint = apply_gate(joint, H, [n + q])
    outcome, probability, joint = measure_qubits(joint, list(range(2 * n)), forced, rng)
    post = discard_qubits(joint, list(range(2 * n)))
    i, j = outcome[:n], outcome[n:]
    return ChoiRoutineResult(i, j, probability, post, PauliString(n, 0, as_mask(i, n), as_mask(j, n)))


def choi_ebits(choi: StateVector) -> Tuple[float, Tuple[float, ...]]:
    """Ebits charged for one Choi-state round: the entropy across the M/M' cut (n for a unitary)."""
    e = entanglement_entropy(choi, list(range(choi.n_qubits // 2)))
    return e, (e,)
