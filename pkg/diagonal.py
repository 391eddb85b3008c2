"""Diagonal gates, Walsh spectra, Pauli strings and resource states.

A diagonal gate on n qubits is stored as its phase vector alpha (length 2^n,
normalized to (-pi, pi]). Its Walsh spectrum theta_j is the set of angles of
the multiqubit Z rotations e^{i theta_j Z^j} whose product is the gate:

    theta_j = 2^-n sum_i (-1)^(i.j) alpha_i,    alpha_i = sum_j (-1)^(i.j) theta_j

Masks are integers with qubit 0 as the most significant bit, matching statevec.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import hadamard

import config
from error_logger import NonUnitaryError, NotCliffordError, RegisterError
from statevec import StateVector, X, Z, apply_gate, is_unitary

MaskLike = Union[int, str, Sequence[int]]

_PHASE_LABELS = {0: "", 1: "i", 2: "-", 3: "-i"}


def popcount(x: int) -> int:
    return bin(x).count("1")


def parity(x: int) -> int:
    return popcount(x) & 1


def as_mask(k: MaskLike, n: int) -> int:
    """Integer mask from an int, a bit string or a bit sequence (qubit 0 first)."""
    if isinstance(k, (int, np.integer)):
        mask = int(k)
        if not 0 <= mask < 2 ** n:
            raise RegisterError(f"mask {mask} out of range for {n} qubits")
        return mask
    bits = [int(b) for b in k]
    if len(bits) != n or any(b not in (0, 1) for b in bits):
        raise RegisterError(f"{k!r} is not a {n}-bit string")
    mask = 0
    for b in bits:
        mask = (mask << 1) | b
    return mask


def mask_bits(mask: int, n: int) -> Tuple[int, ...]:
    return tuple((mask >> (n - 1 - q)) & 1 for q in range(n))


def qubit_bit(q: int, n: int) -> int:
    """Mask with only qubit q set."""
    return 1 << (n - 1 - q)


def normalize_angles(alpha) -> np.ndarray:
    """Map angles into (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(alpha, dtype=float), 2 * np.pi)


@dataclass(frozen=True, eq=False)
class DiagonalGate:
    """Diagonal gate sum_i e^{i alpha_i} |i><i|."""

    n: int
    alpha: np.ndarray

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float).reshape(-1)
        if self.n < 1 or alpha.size != 2 ** self.n:
            raise RegisterError(f"expected {2 ** self.n} phases for a {self.n}-qubit gate, got {alpha.size}")
        alpha = normalize_angles(alpha)
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def identity(cls, n: int) -> "DiagonalGate":
        return cls(n, np.zeros(2 ** n))

    def matrix(self) -> np.ndarray:
        return np.diag(np.exp(1j * self.alpha))

    def inverse(self) -> "DiagonalGate":
        return DiagonalGate(self.n, -self.alpha)

    def compose(self, other: "DiagonalGate") -> "DiagonalGate":
        """Product self * other (diagonal gates commute)."""
        if other.n != self.n:
            raise RegisterError(f"arity mismatch: {self.n} vs {other.n}")
        return DiagonalGate(self.n, self.alpha + other.alpha)

    def equals_up_to_phase(self, other: "DiagonalGate", tol: Optional[float] = None) -> bool:
        tol = config.ANGLE_TOL if tol is None else tol
        if other.n != self.n:
            return False
        diff = normalize_angles(self.alpha - other.alpha)
        spread = normalize_angles(diff - diff[0])
        return bool(np.all(np.abs(spread) < tol))

    def __repr__(self) -> str:
        return f"DiagonalGate(n={self.n})"


@dataclass(frozen=True, eq=False)
class WalshSpectrum:
    """Multiqubit Z-rotation angles theta_j indexed by Z mask j."""

    n: int
    theta: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float).reshape(-1)
        if theta.size != 2 ** self.n:
            raise RegisterError(f"expected {2 ** self.n} Walsh angles, got {theta.size}")
        theta = theta.copy()
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)

    def terms(self, tol: Optional[float] = None) -> Dict[int, float]:
        """Nonzero rotation angles by mask, global phase excluded."""
        tol = config.ANGLE_TOL if tol is None else tol
        return {j: float(t) for j, t in enumerate(self.theta) if j and abs(t) > tol}


def walsh_spectrum(g: DiagonalGate) -> WalshSpectrum:
    return WalshSpectrum(g.n, hadamard(2 ** g.n) @ g.alpha / 2 ** g.n)


def from_rotations(s: WalshSpectrum) -> DiagonalGate:
    return DiagonalGate(s.n, hadamard(2 ** s.n) @ s.theta)


def rotation(mask: MaskLike, theta: float, n: int) -> DiagonalGate:
    """e^{i theta Z^mask}."""
    j = as_mask(mask, n)
    signs = np.array([1 - 2 * parity(i & j) for i in range(2 ** n)], dtype=float)
    return DiagonalGate(n, theta * signs)


def zz_rotation(theta: float) -> DiagonalGate:
    return rotation(0b11, theta, 2)


def projector_phase(index: MaskLike, phi: float, n: int) -> DiagonalGate:
    """e^{i phi |index><index|}."""
    alpha = np.zeros(2 ** n)
    alpha[as_mask(index, n)] = phi
    return DiagonalGate(n, alpha)


def embed(gate: DiagonalGate, targets: Sequence[int], n: int) -> DiagonalGate:
    """Lift a gate acting on `targets` to an n-qubit diagonal gate."""
    targets = list(targets)
    if len(targets) != gate.n or len(set(targets)) != len(targets) or any(not 0 <= t < n for t in targets):
        raise RegisterError(f"cannot embed a {gate.n}-qubit gate on targets {targets} of {n} qubits")
    alpha = np.empty(2 ** n)
    for i in range(2 ** n):
        sub = 0
        for t in targets:
            sub = (sub << 1) | ((i >> (n - 1 - t)) & 1)
        alpha[i] = gate.alpha[sub]
    return DiagonalGate(n, alpha)


def is_clifford(g: DiagonalGate, tol: Optional[float] = None) -> bool:
    """
    True iff g maps every X_q to a Pauli string under conjugation.

    Works on the phase differences alpha_i - alpha_{i^q}, so the answer does not
    depend on how alpha was wrapped into (-pi, pi].
    """
    tol = config.ANGLE_TOL if tol is None else tol
    for q in range(g.n):
        try:
            PauliString.from_matrix(np.diag(np.exp(1j * _xor_phase_diff(g, qubit_bit(q, g.n)))), tol)
        except NotCliffordError:
            return False
    return True


def _xor_phase_diff(g: DiagonalGate, mask: int) -> np.ndarray:
    idx = np.arange(2 ** g.n)
    return g.alpha - g.alpha[idx ^ mask]


def conjugate_by_x(g: DiagonalGate, k: MaskLike) -> DiagonalGate:
    """X^k g X^k, i.e. alpha'_i = alpha_{i xor k}."""
    mask = as_mask(k, g.n)
    return DiagonalGate(g.n, g.alpha[np.arange(2 ** g.n) ^ mask])


@dataclass(frozen=True)
class PauliString:
    """i^phase_exp X^x_mask Z^z_mask on n qubits."""

    n: int
    phase_exp: int = 0
    x_mask: int = 0
    z_mask: int = 0

    def __post_init__(self):
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)
        limit = 2 ** self.n
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise RegisterError(f"Pauli masks out of range for {self.n} qubits")

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def z_string(cls, n: int, mask: MaskLike, phase_exp: int = 0) -> "PauliString":
        return cls(n, phase_exp, 0, as_mask(mask, n))

    @classmethod
    def x_string(cls, n: int, mask: MaskLike) -> "PauliString":
        return cls(n, 0, as_mask(mask, n), 0)

    @property
    def is_identity(self) -> bool:
        """True when the string is the identity up to phase."""
        return self.x_mask == 0 and self.z_mask == 0

    def multiply(self, other: "PauliString") -> "PauliString":
        """self * other, using Z^z1 X^x2 = (-1)^(z1.x2) X^x2 Z^z1."""
        if other.n != self.n:
            raise RegisterError(f"Pauli arity mismatch: {self.n} vs {other.n}")
        phase = self.phase_exp + other.phase_exp + 2 * popcount(self.z_mask & other.x_mask)
        return PauliString(self.n, phase, self.x_mask ^ other.x_mask, self.z_mask ^ other.z_mask)

    __mul__ = multiply

    def matrix(self) -> np.ndarray:
        out = np.array([[1j ** self.phase_exp]], dtype=complex)
        for q in range(self.n):
            op = np.eye(2, dtype=complex)
            if (self.x_mask >> (self.n - 1 - q)) & 1:
                op = op @ X
            if (self.z_mask >> (self.n - 1 - q)) & 1:
                op = op @ Z
            out = np.kron(out, op)
        return out

    def apply_to(self, state: StateVector, targets: Sequence[int]) -> StateVector:
        """Apply the string to `targets` of a state (the phase is global and dropped)."""
        targets = list(targets)
        if len(targets) != self.n:
            raise RegisterError(f"{self.n}-qubit Pauli applied to {len(targets)} targets")
        for q, t in enumerate(targets):
            bit = self.n - 1 - q
            if (self.z_mask >> bit) & 1:
                state = apply_gate(state, Z, [t])
            if (self.x_mask >> bit) & 1:
                state = apply_gate(state, X, [t])
        return state

    @classmethod
    def from_matrix(cls, m: np.ndarray, tol: Optional[float] = None) -> "PauliString":
        """
        Identify a matrix as a Pauli string with quarter-turn phase.

        Raises:
            NotCliffordError: If the matrix is not i^p X^x Z^z
        """
        tol = config.UNITARY_TOL if tol is None else tol
        m = np.asarray(m, dtype=complex)
        dim = m.shape[0]
        n = int(round(np.log2(dim)))
        if m.shape != (dim, dim) or 2 ** n != dim:
            raise RegisterError(f"matrix shape {m.shape} is not a qubit operator")
        x_mask = int(np.argmax(np.abs(m[:, 0])))
        lead = m[x_mask, 0]
        quarter = np.angle(lead) / (np.pi / 2)
        phase_exp = int(np.round(quarter)) % 4
        if abs(abs(lead) - 1) > tol or abs(quarter - np.round(quarter)) > tol:
            raise NotCliffordError("matrix is not a Pauli string up to a quarter-turn phase")
        z_mask = 0
        for q in range(n):
            col = 1 << (n - 1 - q)
            if np.real(m[col ^ x_mask, col] / lead) < 0:
                z_mask |= col
        candidate = cls(n, phase_exp, x_mask, z_mask)
        if not np.allclose(candidate.matrix(), m, atol=tol):
            raise NotCliffordError("matrix is not a Pauli string up to a quarter-turn phase")
        return candidate

    def label(self) -> str:
        chars = []
        y_count = 0
        for q in range(self.n):
            bit = self.n - 1 - q
            xb, zb = (self.x_mask >> bit) & 1, (self.z_mask >> bit) & 1
            if xb and zb:
                chars.append("Y")
                y_count += 1
            else:
                chars.append("X" if xb else ("Z" if zb else "I"))
        # XZ = -iY
        return _PHASE_LABELS[(self.phase_exp - y_count) % 4] + "".join(chars)

    def __str__(self) -> str:
        return self.label()


def clifford_correction(g: DiagonalGate, k: MaskLike) -> PauliString:
    """
    Pauli correction C = g X^k g^dag X^k that turns the byproduct gate X^k g X^k back into g.

    Args:
        g: Clifford diagonal gate
        k: Byproduct mask

    Returns:
        The correction as a Z-type Pauli string with exact phase

    Raises:
        NotCliffordError: If g is not Clifford
    """
    if not is_clifford(g):
        raise NotCliffordError("correction requested for a non-Clifford diagonal gate")
    mask = as_mask(k, g.n)
    return PauliString.from_matrix(np.diag(np.exp(1j * _xor_phase_diff(g, mask))))


def gate_state(g: DiagonalGate) -> StateVector:
    """g |+>^n."""
    return StateVector(g.n, np.exp(1j * g.alpha) / np.sqrt(2 ** g.n))


@dataclass(frozen=True)
class GraphSpec:
    """Interaction graph with optional per-edge angles (default pi/4)."""

    vertices: int
    edges: Tuple[Tuple[int, int], ...] = ()
    angles: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        edges = tuple(tuple(sorted((int(a), int(b)))) for a, b in self.edges)
        for a, b in edges:
            if a == b:
                raise RegisterError(f"self-loop on vertex {a}")
            if not 0 <= a < self.vertices or not 0 <= b < self.vertices:
                raise RegisterError(f"edge ({a}, {b}) out of range for {self.vertices} vertices")
        if len(set(edges)) != len(edges):
            raise RegisterError("duplicate edges")
        object.__setattr__(self, "edges", edges)
        if self.angles is not None:
            angles = tuple(float(t) for t in self.angles)
            if len(angles) != len(edges):
                raise RegisterError(f"{len(angles)} angles given for {len(edges)} edges")
            object.__setattr__(self, "angles", angles)

    @classmethod
    def uniform(cls, vertices: int, edges: Iterable[Tuple[int, int]], theta: float) -> "GraphSpec":
        edges = tuple(edges)
        return cls(vertices, edges, tuple(theta for _ in edges))

    def angle(self, index: int) -> float:
        return np.pi / 4 if self.angles is None else self.angles[index]

    def edge_angles(self) -> List[Tuple[Tuple[int, int], float]]:
        return [(edge, self.angle(i)) for i, edge in enumerate(self.edges)]

    def active_vertices(self) -> List[int]:
        return sorted({v for edge in self.edges for v in edge})


def graph_gate(spec: GraphSpec) -> DiagonalGate:
    """prod over edges of e^{i theta_ab Z_a Z_b}."""
    n = spec.vertices
    theta = np.zeros(2 ** n)
    for (a, b), angle in spec.edge_angles():
        theta[qubit_bit(a, n) | qubit_bit(b, n)] += angle
    return from_rotations(WalshSpectrum(n, theta))


def ghz_state(n: int) -> StateVector:
    """Star graph state prod_{j>=1} CZ_{0j} |+>^n, local-Clifford equivalent to GHZ_n."""
    if n < 2:
        raise RegisterError(f"GHZ state needs at least 2 qubits, got {n}")
    rest = 2 ** (n - 1) - 1
    alpha = np.array([np.pi * ((i >> (n - 1)) & parity(i & rest)) for i in range(2 ** n)], dtype=float)
    return gate_state(DiagonalGate(n, alpha))


def choi_state(u: np.ndarray) -> StateVector:
    """2^{-n/2} sum_k |k>_M U|k>_M', M qubits first."""
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u):
        raise NonUnitaryError("Choi state requested for a non-unitary matrix")
    dim = u.shape[0]
    n = int(round(np.log2(dim)))
    if 2 ** n != dim:
        raise RegisterError(f"matrix dimension {dim} is not a power of two")
    return StateVector(2 * n, (u.T / np.sqrt(dim)).reshape(-1))


def is_clifford_unitary(u: np.ndarray, tol: Optional[float] = None) -> bool:
    """True iff U X_q U^dag and U Z_q U^dag are Pauli strings for every qubit q."""
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u):
        return False
    n = int(round(np.log2(u.shape[0])))
    for q in range(n):
        for generator in (PauliString.x_string(n, qubit_bit(q, n)), PauliString.z_string(n, qubit_bit(q, n))):
            try:
                PauliString.from_matrix(u @ generator.matrix() @ u.conj().T, tol)
            except NotCliffordError:
                return False
    return True


@dataclass(frozen=True)
class GhzPlan:
    """GHZ decomposition of a diagonal gate into multiqubit rotations."""

    n: int
    terms: Tuple[Tuple[int, float], ...]
    local_terms: Tuple[Tuple[int, float], ...] = field(default=())

    @property
    def ghz_count(self) -> int:
        return len(self.terms)

    @property
    def two_qubit_gate_count(self) -> int:
        """Intermodular two-qubit gates needed to distribute the GHZ states."""
        return sum(popcount(mask) - 1 for mask, _ in self.terms)


def ghz_plan(gate: DiagonalGate, tol: Optional[float] = None) -> GhzPlan:
    """Split the Walsh spectrum into weight>=2 (GHZ-induced) and weight-1 (local) rotations."""
    spectrum = walsh_spectrum(gate).terms(tol)
    terms = tuple((j, t) for j, t in spectrum.items() if popcount(j) >= 2)
    local = tuple((j, t) for j, t in spectrum.items() if popcount(j) == 1)
    return GhzPlan(gate.n, terms, local)
