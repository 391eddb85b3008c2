"""Physical coupling model: module geometry, logical ZZ couplings and bang-bang schedules."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np

import config
from diagonal import DiagonalGate, GraphSpec
from error_logger import CouplingError, RegisterError, log_debug, ErrorCategory
from statevec import StateVector, apply_diagonal

SignVector = Tuple[int, ...]
Vec3 = Tuple[float, float, float]


@dataclass(frozen=True)
class Module:
    """One module: its position, entangling-unit size and per-qubit offsets."""

    position: Vec3
    unit_size: int = 1
    qubit_offsets: Optional[Tuple[Vec3, ...]] = None

    def __post_init__(self):
        if self.unit_size < 1:
            raise CouplingError(f"unit size must be >= 1, got {self.unit_size}")
        object.__setattr__(self, "position", tuple(float(c) for c in self.position))
        if self.qubit_offsets is not None:
            offsets = tuple(tuple(float(c) for c in off) for off in self.qubit_offsets)
            if len(offsets) != self.unit_size:
                raise CouplingError(f"{len(offsets)} offsets given for a unit of {self.unit_size} qubits")
            object.__setattr__(self, "qubit_offsets", offsets)

    def qubit_positions(self) -> np.ndarray:
        base = np.asarray(self.position, dtype=float)
        if self.qubit_offsets is None:
            return np.tile(base, (self.unit_size, 1))
        return base + np.asarray(self.qubit_offsets, dtype=float)


@dataclass(frozen=True)
class ModuleLayout:
    modules: Tuple[Module, ...]

    def __post_init__(self):
        object.__setattr__(self, "modules", tuple(self.modules))
        for a, b in combinations(range(len(self.modules)), 2):
            d = _distances(self.modules[a], self.modules[b])
            if np.any(d <= 0):
                raise CouplingError(f"modules {a} and {b} have coincident qubits")

    @classmethod
    def point_like(cls, positions: Sequence[Vec3], unit_sizes: Sequence[int]) -> "ModuleLayout":
        return cls(tuple(Module(tuple(p), int(m)) for p, m in zip(positions, unit_sizes)))

    @property
    def n_modules(self) -> int:
        return len(self.modules)

    @property
    def unit_sizes(self) -> List[int]:
        return [m.unit_size for m in self.modules]

    def check_index(self, i: int):
        if not 0 <= i < self.n_modules:
            raise RegisterError(f"module index {i} out of range for {self.n_modules} modules")


@dataclass(frozen=True)
class CouplingModel:
    """Pair coupling f = J / d^gamma."""

    J: float = config.DEFAULT_J
    gamma: float = config.DEFAULT_GAMMA

    def __post_init__(self):
        if self.J <= 0:
            raise CouplingError(f"J must be positive, got {self.J}")
        if self.gamma <= 0:
            raise CouplingError(f"gamma must be positive, got {self.gamma}")


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Symmetric coupling matrix with zero diagonal (radians per unit time)."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise CouplingError(f"weights must be square, got shape {w.shape}")
        if not np.allclose(w, w.T) or np.any(np.diag(w) != 0):
            raise CouplingError("weights must be symmetric with zero diagonal")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def weight(self, i: int, j: int) -> float:
        return float(self.weights[i, j])


@dataclass(frozen=True)
class ScheduleStep:
    """One bang-bang step: per-module encodings (None = idle) held for `duration`."""

    encodings: Tuple[Optional[SignVector], ...]
    duration: float
    edge: Tuple[int, int] = (0, 0)

    def __post_init__(self):
        if self.duration < 0:
            raise CouplingError(f"negative step duration {self.duration}")


@dataclass(frozen=True)
class Schedule:
    steps: Tuple[ScheduleStep, ...] = field(default=())

    @property
    def total_time(self) -> float:
        return float(sum(step.duration for step in self.steps))

    def __len__(self) -> int:
        return len(self.steps)


def _distances(a: Module, b: Module) -> np.ndarray:
    pa, pb = a.qubit_positions(), b.qubit_positions()
    return np.linalg.norm(pa[:, None, :] - pb[None, :, :], axis=-1)


def _check_signs(signs: Sequence[int], m: int) -> np.ndarray:
    s = np.asarray(signs, dtype=float)
    if s.shape != (m,) or np.any(np.abs(s) != 1):
        raise CouplingError(f"sign vector {tuple(signs)} is not a length-{m} vector of +-1")
    return s


def trivial_signs(m: int) -> SignVector:
    return tuple(1 for _ in range(m))


def pair_strength(d: float, model: CouplingModel) -> float:
    """J / d^gamma."""
    if d <= 0:
        raise CouplingError(f"distance must be positive, got {d}")
    return model.J / d ** model.gamma


def effective_coupling(layout: ModuleLayout, model: CouplingModel, i: int, j: int,
                       signs: Optional[Tuple[Sequence[int], Sequence[int]]] = None) -> float:
    """
    Logical ZZ coupling between modules i and j.

    Args:
        layout: Module layout
        model: Pair coupling model
        i: First module
        j: Second module
        signs: Sign vectors of the two modules' logical subspaces (default all +1)

    Returns:
        sum over qubit pairs of f s s
    """
    layout.check_index(i)
    layout.check_index(j)
    if i == j:
        raise CouplingError("effective coupling needs two distinct modules")
    mi, mj = layout.modules[i], layout.modules[j]
    if signs is None:
        signs = (trivial_signs(mi.unit_size), trivial_signs(mj.unit_size))
    si = _check_signs(signs[0], mi.unit_size)
    sj = _check_signs(signs[1], mj.unit_size)
    f = model.J / _distances(mi, mj) ** model.gamma
    return float(si @ f @ sj)


def approx_coupling(m_i: int, m_j: int, Delta: float, model: CouplingModel) -> float:
    if Delta <= 0:
        raise CouplingError(f"distance must be positive, got {Delta}")
    return m_i * m_j * model.J / Delta ** model.gamma


def required_unit_size(target: float, Delta: float, model: CouplingModel) -> int:
    """Smallest m with m^2 J / Delta^gamma >= target."""
    if target <= 0:
        raise CouplingError(f"target coupling must be positive, got {target}")
    ratio = target * Delta ** model.gamma / model.J
    m = max(1, int(np.floor(np.sqrt(ratio))))
    while m * m < ratio * (1 - 1e-12):
        m += 1
    while m > 1 and (m - 1) ** 2 >= ratio * (1 - 1e-12):
        m -= 1
    return m


def logical_hamiltonian(layout: ModuleLayout, model: CouplingModel,
                        signs: Optional[Sequence[Sequence[int]]] = None) -> WeightedGraph:
    """Weighted graph of effective couplings between all module pairs."""
    n = layout.n_modules
    if signs is None:
        signs = [trivial_signs(m) for m in layout.unit_sizes]
    if len(signs) != n:
        raise CouplingError(f"{len(signs)} sign vectors given for {n} modules")
    w = np.zeros((n, n))
    for i, j in combinations(range(n), 2):
        w[i, j] = w[j, i] = effective_coupling(layout, model, i, j, (signs[i], signs[j]))
    return WeightedGraph(w)


def physical_hamiltonian(layout: ModuleLayout, model: CouplingModel,
                         active_modules: Optional[Sequence[int]] = None) -> WeightedGraph:
    """Pair couplings between entangling qubits of different active modules, qubits ordered module by module."""
    active = set(range(layout.n_modules) if active_modules is None else active_modules)
    offsets = np.cumsum([0] + layout.unit_sizes)
    w = np.zeros((offsets[-1], offsets[-1]))
    for a, b in combinations(range(layout.n_modules), 2):
        if a in active and b in active:
            f = model.J / _distances(layout.modules[a], layout.modules[b]) ** model.gamma
            w[offsets[a]:offsets[a + 1], offsets[b]:offsets[b + 1]] = f
            w[offsets[b]:offsets[b + 1], offsets[a]:offsets[a + 1]] = f.T
    return WeightedGraph(w)


def _z_values(n: int) -> np.ndarray:
    """Row b holds the Z eigenvalues (+1 or -1) of every qubit in basis state |b>."""
    idx = np.arange(2 ** n)
    return 1 - 2 * ((idx[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1)


def zz_energies(graph: WeightedGraph) -> np.ndarray:
    """sum_{i<j} f_ij z_i z_j for every basis index."""
    z = _z_values(graph.n)
    return 0.5 * np.einsum("bi,ij,bj->b", z, graph.weights, z)


def evolve_zz(state: StateVector, graph: WeightedGraph, t: float) -> StateVector:
    """Multiply the amplitude of |b> by e^{i t sum_{i<j} f_ij z_i z_j}."""
    if graph.n != state.n_qubits:
        raise RegisterError(f"graph on {graph.n} qubits applied to a {state.n_qubits}-qubit state")
    gate = DiagonalGate(graph.n, t * zz_energies(graph))
    return apply_diagonal(state, gate, range(graph.n))


def schedule_pattern(target: GraphSpec, layout: ModuleLayout, model: CouplingModel) -> Schedule:
    """
    Bang-bang schedule realizing prod e^{i theta_ab Z_a Z_b} on the logical qubits.

    Each step activates one edge with both modules in the trivial subspace
    and every other module idle. A negative angle is reached by moving the
    second module to the all -1 sign vector.

    Raises:
        CouplingError: If an edge has zero effective coupling
    """
    if target.vertices != layout.n_modules:
        raise CouplingError(f"graph has {target.vertices} vertices but the layout has {layout.n_modules} modules")
    steps = []
    for (a, b), theta in target.edge_angles():
        sa = trivial_signs(layout.modules[a].unit_size)
        sb = trivial_signs(layout.modules[b].unit_size)
        f = effective_coupling(layout, model, a, b, (sa, sb))
        if abs(f) < config.PROB_ZERO_TOL:
            raise CouplingError(f"edge ({a}, {b}) has zero effective coupling")
        if theta / f < 0:
            sb = tuple(-s for s in sb)
            f = -f
            log_debug(f"edge ({a}, {b}) uses flipped signs for angle {theta:.6g}", ErrorCategory.COUPLING)
        encodings = tuple(sa if k == a else sb if k == b else None for k in range(layout.n_modules))
        steps.append(ScheduleStep(encodings, theta / f, (a, b)))
    return Schedule(tuple(steps))


def step_graph(step: ScheduleStep, layout: ModuleLayout, model: CouplingModel) -> WeightedGraph:
    """Logical coupling graph active during one step (idle modules decoupled)."""
    n = layout.n_modules
    w = np.zeros((n, n))
    active = [k for k, enc in enumerate(step.encodings) if enc is not None]
    for a, b in combinations(active, 2):
        w[a, b] = w[b, a] = effective_coupling(layout, model, a, b, (step.encodings[a], step.encodings[b]))
    return WeightedGraph(w)


def run_schedule(state: StateVector, schedule: Schedule, layout: ModuleLayout,
                 model: CouplingModel) -> StateVector:
    """Execute a schedule on the logical qubits (one per module)."""
    for step in schedule.steps:
        state = evolve_zz(state, step_graph(step, layout, model), step.duration)
    return state


def verify_internal_action(m: int, rng: Optional[np.random.Generator] = None,
                           signs: Optional[Sequence[int]] = None,
                           detuning: Optional[Sequence[float]] = None) -> bool:
    """
    Check that a unit's internal Hamiltonian leaves its logical qubit untouched.

    A random logical state is written into the code space of the sign vector
    and evolved under random intra-unit ZZ couplings (plus an optional stray
    Z field). The check passes when the result is the input times one global
    phase, i.e. the code space is decoherence-free.

    Args:
        m: Unit size
        rng: Source of the couplings, the logical state and the evolution time
        signs: Sign vector selecting the code space (default all +1)
        detuning: Per-qubit Z field h_mu added to the internal Hamiltonian

    Returns:
        True when the logical state only picks up a global phase
    """
    if m < 2:
        raise CouplingError(f"internal action needs a unit of at least 2 qubits, got {m}")
    rng = np.random.default_rng(0) if rng is None else rng
    s = _check_signs(trivial_signs(m) if signs is None else signs, m)
    w = np.triu(rng.uniform(0.1, 1.0, size=(m, m)), 1)
    graph = WeightedGraph(w + w.T)
    t = float(rng.uniform(0.1, 2.0))

    k = int("".join("0" if v > 0 else "1" for v in s), 2)
    complement = k ^ (2 ** m - 1)
    logical = rng.normal(size=2) + 1j * rng.normal(size=2)
    amps = np.zeros(2 ** m, dtype=complex)
    amps[k], amps[complement] = logical / np.linalg.norm(logical)

    evolved = evolve_zz(StateVector(m, amps), graph, t)
    energies = zz_energies(graph)
    if detuning is not None:
        h = np.asarray(detuning, dtype=float)
        if h.shape != (m,):
            raise CouplingError(f"detuning needs {m} entries, got {h.size}")
        fields = _z_values(m) @ h
        evolved = apply_diagonal(evolved, DiagonalGate(m, t * fields), range(m))
        energies = energies + fields
    expected = np.exp(1j * t * energies[k]) * amps
    return bool(np.allclose(evolved.amps, expected, atol=config.CODE_SPACE_TOL))
