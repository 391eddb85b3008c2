"""Logical-qubit lifecycle in entangling units and memory-unit entanglement swapping.

A logical qubit in an entangling unit of m qubits lives in span{|0...0>, |1...1>}
(or in a signed subspace span{|k>, X^m|k>}); decoding localizes it on the first
unit qubit, and transfer moves it into the module's memory qubit.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

import config
from coupling import (
    CouplingModel,
    ModuleLayout,
    WeightedGraph,
    effective_coupling,
    evolve_zz,
    physical_hamiltonian,
    schedule_pattern,
)
from diagonal import GraphSpec
from error_logger import CodeSpaceError, RegisterError
from statevec import (
    CX,
    CZ,
    H,
    X,
    Z,
    StateVector,
    apply_gate,
    discard_qubits,
    measure,
    new_basis_state,
    reduced_density_matrix,
)


@dataclass(frozen=True)
class RegisterMap:
    """Per-module entangling-unit and memory qubit indices within one register."""

    entangling: Tuple[Tuple[int, ...], ...]
    memory: Tuple[Tuple[int, ...], ...]
    n_qubits: int

    def __post_init__(self):
        entangling = tuple(tuple(unit) for unit in self.entangling)
        memory = tuple(tuple(unit) for unit in self.memory)
        object.__setattr__(self, "entangling", entangling)
        object.__setattr__(self, "memory", memory)
        if len(entangling) != len(memory):
            raise RegisterError("every module needs an entangling unit and a memory unit")
        used = [q for unit in entangling + memory for q in unit]
        if len(set(used)) != len(used):
            raise RegisterError("register ranges overlap")
        if any(not 0 <= q < self.n_qubits for q in used):
            raise RegisterError(f"register index out of range for {self.n_qubits} qubits")

    @classmethod
    def contiguous(cls, unit_sizes: Sequence[int], memory_size: int = 1) -> "RegisterMap":
        """Entangling units first (module by module), then the memory units."""
        entangling = []
        start = 0
        for m in unit_sizes:
            entangling.append(tuple(range(start, start + m)))
            start += m
        memory = []
        for _ in unit_sizes:
            memory.append(tuple(range(start, start + memory_size)))
            start += memory_size
        return cls(tuple(entangling), tuple(memory), start)

    @property
    def n_modules(self) -> int:
        return len(self.entangling)


def _code_space_weight(state: StateVector, unit: Sequence[int], flips: int = 0) -> float:
    """Probability that `unit` reads |k> or its complement, k given by `flips`."""
    n = state.n_qubits
    m = len(unit)
    psi = np.moveaxis(state.amps.reshape([2] * n), list(unit), list(range(m))).reshape(2 ** m, -1)
    probs = np.sum(np.abs(psi) ** 2, axis=1)
    return float(probs[flips] + probs[flips ^ (2 ** m - 1)])


def _check_code_space(state: StateVector, unit: Sequence[int], flips: int = 0):
    weight = _code_space_weight(state, unit, flips)
    if 1 - weight > config.CODE_SPACE_TOL:
        raise CodeSpaceError(f"unit {list(unit)} has weight {1 - weight:.3g} outside the code space")


def _signs_to_flips(signs: Sequence[int]) -> int:
    flips = 0
    for s in signs:
        if s not in (1, -1):
            raise CodeSpaceError(f"sign vector entry {s!r} is not +-1")
        flips = (flips << 1) | (1 if s == -1 else 0)
    return flips


def encode_logical(state: StateVector, unit: Sequence[int]) -> StateVector:
    """CX from the first unit qubit to every other one: a|0>+b|1> -> a|0...0>+b|1...1>."""
    unit = list(unit)
    if not unit:
        raise RegisterError("entangling unit needs at least one qubit")
    for q in unit[1:]:
        state = apply_gate(state, CX, [unit[0], q])
    return state


def decode_logical(state: StateVector, unit: Sequence[int]) -> StateVector:
    """Inverse of encode_logical; raises CodeSpaceError when the unit left the code space."""
    unit = list(unit)
    if not unit:
        raise RegisterError("entangling unit needs at least one qubit")
    _check_code_space(state, unit)
    for q in reversed(unit[1:]):
        state = apply_gate(state, CX, [unit[0], q])
    return state


def encode_signed(state: StateVector, unit: Sequence[int], signs: Sequence[int]) -> StateVector:
    """Encode into span{|k>, X^m|k>} with k_mu = (1 - s_mu) / 2."""
    if len(signs) != len(unit):
        raise RegisterError(f"{len(signs)} signs for a unit of {len(unit)} qubits")
    state = encode_logical(state, unit)
    for q, s in zip(unit, signs):
        if s == -1:
            state = apply_gate(state, X, [q])
    return state


def decode_signed(state: StateVector, unit: Sequence[int], signs: Sequence[int]) -> StateVector:
    if len(signs) != len(unit):
        raise RegisterError(f"{len(signs)} signs for a unit of {len(unit)} qubits")
    _check_code_space(state, unit, _signs_to_flips(signs))
    for q, s in zip(unit, signs):
        if s == -1:
            state = apply_gate(state, X, [q])
    return decode_logical(state, unit)


def decode_logical_dynamic(state: StateVector, unit: Sequence[int],
                           forced: Optional[Sequence[int]] = None,
                           rng: Optional[np.random.Generator] = None) -> StateVector:
    """
    Decode by measurement and feed-forward.

    Qubits 2..m of the unit are measured in the X basis; an odd outcome
    parity is undone by Z on the first qubit. Measured qubits are reset to |0>,
    so every branch matches decode_logical.

    Args:
        state: Register holding the encoded unit
        unit: Entangling-unit qubits, first one keeps the logical state
        forced: Optional outcomes for qubits 2..m
        rng: Random generator for sampled outcomes
    """
    unit = list(unit)
    if not unit:
        raise RegisterError("entangling unit needs at least one qubit")
    _check_code_space(state, unit)
    rest = unit[1:]
    if forced is not None and len(forced) != len(rest):
        raise RegisterError(f"expected {len(rest)} forced outcomes, got {len(forced)}")
    total = 0
    for pos, q in enumerate(rest):
        state = apply_gate(state, H, [q])
        result = measure(state, q, None if forced is None else forced[pos], rng)
        state = result.post_state
        total ^= result.outcome
        if result.outcome:
            state = apply_gate(state, X, [q])
    if total:
        state = apply_gate(state, Z, [unit[0]])
    return state


def transfer_to_memory(state: StateVector, map: RegisterMap, module: int) -> StateVector:
    """SWAP-like CX pair moving the decoded qubit E_i(1) into the empty memory qubit M_i(1)."""
    if not 0 <= module < map.n_modules:
        raise RegisterError(f"module {module} out of range")
    e, mem = map.entangling[module][0], map.memory[module][0]
    rho = reduced_density_matrix(state, [mem])
    if abs(1 - rho[0, 0].real) > config.CODE_SPACE_TOL:
        raise CodeSpaceError(f"memory qubit {mem} is not in |0>")
    state = apply_gate(state, CX, [e, mem])
    return apply_gate(state, CX, [mem, e])


_PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


def _check_bell_pairs(state: StateVector, outers: Sequence[int], centers: Sequence[int]):
    """Each (outer, center) pair must hold Phi+ to within CODE_SPACE_TOL."""
    for o, c in zip(outers, centers):
        rho = reduced_density_matrix(state, [o, c])
        overlap = float(np.real(_PHI_PLUS.conj() @ rho @ _PHI_PLUS))
        if overlap < 1 - config.CODE_SPACE_TOL:
            raise CodeSpaceError(f"qubits ({o}, {c}) do not hold a Bell pair (overlap {overlap:.3e})")


def _x_measure_reset(state: StateVector, qubit: int, forced: Optional[int],
                     rng: Optional[np.random.Generator]) -> Tuple[StateVector, int]:
    state = apply_gate(state, H, [qubit])
    result = measure(state, qubit, forced, rng)
    state = result.post_state
    if result.outcome:
        state = apply_gate(state, X, [qubit])
    return state, result.outcome


def merge_star(state: StateVector, centers: Sequence[int], outers: Sequence[int],
               forced: Optional[Sequence[int]] = None,
               rng: Optional[np.random.Generator] = None) -> StateVector:
    """
    Fuse k Bell pairs (outer_i, center_i) sharing one module into a GHZ state.

    CZ from the first center to every other center, X measurement of centers
    2..k with Z corrections on their outer partners, then H on those outers.
    The result is (|0...0>+|1...1>)/sqrt(2) on (outer_1, center_1, outer_2, ..., outer_k);
    measured centers are reset to |0>.
    """
    centers, outers = list(centers), list(outers)
    if len(centers) != len(outers) or len(centers) < 2:
        raise RegisterError("merge needs at least two (outer, center) pairs")
    if len(set(centers + outers)) != 2 * len(centers):
        raise RegisterError("merge qubits must be distinct")
    if forced is not None and len(forced) != len(centers) - 1:
        raise RegisterError(f"expected {len(centers) - 1} forced outcomes, got {len(forced)}")
    _check_bell_pairs(state, outers, centers)
    for c in centers[1:]:
        state = apply_gate(state, CZ, [centers[0], c])
    for pos, (c, o) in enumerate(zip(centers[1:], outers[1:])):
        state, s = _x_measure_reset(state, c, None if forced is None else forced[pos], rng)
        if s:
            state = apply_gate(state, Z, [o])
        state = apply_gate(state, H, [o])
    return state


def merge_swap(state: StateVector, center_pair: Sequence[int], outer_pair: Sequence[int],
               mode: str = "ghz", forced: Optional[Sequence[int]] = None,
               rng: Optional[np.random.Generator] = None) -> StateVector:
    """
    Entanglement swapping on two centre qubits holding halves of two Bell pairs.

    Args:
        state: Register holding Bell pairs (outer_1, center_1) and (outer_2, center_2)
        center_pair: The two centre (memory) qubits
        outer_pair: Their Bell partners
        mode: 'ghz' leaves GHZ on (outer_1, center_1, outer_2); 'bell' leaves Phi+ on the outers
        forced: Outcomes (s,) for ghz mode or (s, r) for bell mode
        rng: Random generator for sampled outcomes

    Returns:
        The corrected state; measured centres are reset to |0>

    Raises:
        CodeSpaceError: If (outer_1, center_1) and (outer_2, center_2) are not both Phi+
    """
    if mode not in ("ghz", "bell"):
        raise RegisterError(f"unknown merge mode {mode!r}")
    expected = 1 if mode == "ghz" else 2
    if forced is not None and len(forced) != expected:
        raise RegisterError(f"{mode} merge takes {expected} forced outcomes, got {len(forced)}")
    c1, c2 = center_pair
    o1, o2 = outer_pair
    state = merge_star(state, [c1, c2], [o1, o2], None if forced is None else forced[:1], rng)
    if mode == "bell":
        state, r = _x_measure_reset(state, c1, None if forced is None else forced[1], rng)
        if r:
            state = apply_gate(state, Z, [o1])
    return state


def distribute_graph_state(layout: ModuleLayout, model: CouplingModel, target: GraphSpec) -> StateVector:
    """
    Physical pipeline producing the gate state of graph_gate(target) in the memory units.

    Every entangling unit starts in |+>|0...0> and is encoded; each bang-bang
    step evolves the two active units under their physical pair couplings in
    the step's sign encoding; units are then decoded and transferred, and the
    entangling qubits are dropped.

    Returns:
        The memory register, one qubit per module
    """
    regs = RegisterMap.contiguous(layout.unit_sizes)
    n_entangling = sum(layout.unit_sizes)
    state = new_basis_state(regs.n_qubits, "0" * regs.n_qubits)
    for unit in regs.entangling:
        state = apply_gate(state, H, [unit[0]])
        state = encode_logical(state, unit)

    for step in schedule_pattern(target, layout, model).steps:
        active = [k for k, enc in enumerate(step.encodings) if enc is not None]
        for k in active:
            for q, s in zip(regs.entangling[k], step.encodings[k]):
                if s == -1:
                    state = apply_gate(state, X, [q])
        w = np.zeros((regs.n_qubits, regs.n_qubits))
        w[:n_entangling, :n_entangling] = physical_hamiltonian(layout, model, active).weights
        state = evolve_zz(state, WeightedGraph(w), step.duration)
        for k in active:
            for q, s in zip(regs.entangling[k], step.encodings[k]):
                if s == -1:
                    state = apply_gate(state, X, [q])

    for module, unit in enumerate(regs.entangling):
        state = decode_logical(state, unit)
        state = transfer_to_memory(state, regs, module)
    return discard_qubits(state, [q for unit in regs.entangling for q in unit])


def logical_block(layout: ModuleLayout, model: CouplingModel, i: int, j: int, t: float) -> np.ndarray:
    """
    Restriction of the physical two-unit evolution to the joint code space.

    Returns the 4x4 matrix in the basis |0bar 0bar>, |0bar 1bar>, |1bar 0bar>, |1bar 1bar>,
    to be compared with e^{i t fbar Zbar Zbar}.
    """
    mi, mj = layout.modules[i].unit_size, layout.modules[j].unit_size
    n = mi + mj
    graph = physical_hamiltonian(ModuleLayout((layout.modules[i], layout.modules[j])), model)
    ones_i, ones_j = 2 ** mi - 1, 2 ** mj - 1
    code = [0, ones_j, ones_i << mj, (ones_i << mj) | ones_j]
    block = np.zeros((4, 4), dtype=complex)
    for col, index in enumerate(code):
        basis = np.zeros(2 ** n, dtype=complex)
        basis[index] = 1
        evolved = evolve_zz(StateVector(n, basis), graph, t).amps
        block[:, col] = evolved[code]
    return block


def expected_logical_block(layout: ModuleLayout, model: CouplingModel, i: int, j: int, t: float) -> np.ndarray:
    f = effective_coupling(layout, model, i, j)
    return np.diag(np.exp(1j * t * f * np.array([1, -1, -1, 1])))
