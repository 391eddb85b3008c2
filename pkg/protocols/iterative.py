"""Quasi-deterministic iterative induction: angle doubling, edge pruning, Choi-state retries."""
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

import config
from diagonal import (
    DiagonalGate,
    GraphSpec,
    MaskLike,
    as_mask,
    choi_state,
    embed,
    gate_state,
    graph_gate,
    is_clifford_unitary,
    mask_bits,
    rotation,
)
from error_logger import RegisterError
from logger import RunLogger
from protocols.base_protocol import InductionProtocol, InductionRecord, RoundRecord, resource_ebits
from protocols.deterministic import induce_clifford_diagonal, induce_clifford_general
from protocols.routines import choi_ebits, routine_T, routine_T_tilde
from statevec import StateVector


def is_quarter_multiple(angle: float, tol: Optional[float] = None) -> bool:
    """True when the angle is an integer multiple of pi/4."""
    tol = config.ANGLE_TOL if tol is None else tol
    q = 4 * angle / np.pi
    return abs(q - np.round(q)) * np.pi / 4 < tol


class IterativeRotation(InductionProtocol):
    """e^{i theta Z^mask} by repeated routine T with the angle doubled after each failure."""

    def __init__(self, theta: float, mask: MaskLike, data: StateVector, forced=None, rng=None,
                 max_rounds: Optional[int] = None, logger: Optional[RunLogger] = None):
        super().__init__(data, forced, rng, max_rounds, logger)
        self.theta = float(theta)
        self.n = data.n_qubits
        self.support = [q for q, b in enumerate(mask_bits(as_mask(mask, self.n), self.n)) if b]
        if not self.support:
            raise RegisterError("rotation mask must select at least one qubit")
        self.angle = self.theta
        self.applied = DiagonalGate.identity(self.n)
        self.done = False

    def get_protocol_name(self) -> str:
        return "iterate-rotation"

    def is_done(self) -> bool:
        return self.done

    def accumulated_gate(self) -> DiagonalGate:
        return self.applied

    def play_round(self, forced) -> RoundRecord:
        w = len(self.support)
        local = rotation(2 ** w - 1, self.angle, w)
        metadata = {"angle": self.angle}
        if is_quarter_multiple(self.angle):
            self.state, record = induce_clifford_diagonal(local, self.state, forced, self.rng, self.support)
            self.applied = self.applied.compose(embed(local, self.support, self.n))
            self.done = True
            entry = record.rounds[0]
            return RoundRecord(entry.outcome, entry.byproduct, entry.correction, entry.ebits, entry.ebits_per_cut,
                               f"rotation {self.angle:.12g} clifford", entry.probability, True,
                               {**metadata, "deterministic": True})

        resource = gate_state(local)
        result = routine_T(resource, self.state, forced, self.rng, self.support)
        self.state = result.post_state
        sign = -1 if sum(result.outcome) % 2 else 1
        self.applied = self.applied.compose(embed(rotation(2 ** w - 1, sign * self.angle, w), self.support, self.n))
        success = sign == 1
        ebits, per_cut = resource_ebits(resource)
        entry = RoundRecord(result.outcome, result.byproduct, None, ebits, per_cut,
                            f"rotation {self.angle:.12g}", result.probability, success, metadata)
        if success:
            self.done = True
        else:
            self.angle *= 2
        return entry


def iterate_rotation(theta: float, mask: MaskLike, data: StateVector, forced=None,
                     rng: Optional[np.random.Generator] = None, max_rounds: Optional[int] = None,
                     logger: Optional[RunLogger] = None) -> Tuple[StateVector, InductionRecord]:
    """
    Induce e^{i theta Z^mask} with routine T, doubling the angle after every failed round.

    Round j targets 2^(j-1) theta; it succeeds iff the outcome parity over the
    mask is even. A round whose angle is a multiple of pi/4 finishes with a
    Clifford correction.
    """
    return IterativeRotation(theta, mask, data, forced, rng, max_rounds, logger).run()


class IterativePairwise(InductionProtocol):
    """Graph gate prod e^{i theta_ab Z_a Z_b}; edges whose outcomes agree are done, the rest retry doubled."""

    def __init__(self, spec: GraphSpec, data: StateVector, forced=None, rng=None,
                 max_rounds: Optional[int] = None, logger: Optional[RunLogger] = None):
        super().__init__(data, forced, rng, max_rounds, logger)
        if spec.vertices != data.n_qubits:
            raise RegisterError(f"graph on {spec.vertices} vertices applied to {data.n_qubits} data qubits")
        self.spec = spec
        self.remaining: Dict[Tuple[int, int], float] = dict(spec.edge_angles())
        self.applied = DiagonalGate.identity(spec.vertices)
        self.history: List[DiagonalGate] = []

    def get_protocol_name(self) -> str:
        return "iterate-pairwise"

    def is_done(self) -> bool:
        return not self.remaining

    def accumulated_gate(self) -> DiagonalGate:
        return self.applied

    def _active_outcome(self, forced, active: List[int]):
        if forced is None:
            return None
        forced = list(forced)
        if len(forced) == len(active):
            return forced
        if len(forced) == self.spec.vertices:
            return [forced[v] for v in active]
        raise RegisterError(f"forced outcome of length {len(forced)} matches neither {len(active)} active "
                            f"nor {self.spec.vertices} vertices")

    def play_round(self, forced) -> RoundRecord:
        n = self.spec.vertices
        edges = sorted(self.remaining)
        active = sorted({v for edge in edges for v in edge})
        index = {v: pos for pos, v in enumerate(active)}
        local_spec = GraphSpec(len(active), tuple((index[a], index[b]) for a, b in edges),
                               tuple(self.remaining[e] for e in edges))
        local = graph_gate(local_spec)
        outcome_forced = self._active_outcome(forced, active)
        metadata = {"edges": [list(e) for e in edges], "angles": [self.remaining[e] for e in edges],
                    "active": active}

        if all(is_quarter_multiple(self.remaining[e]) for e in edges):
            self.state, record = induce_clifford_diagonal(local, self.state, outcome_forced, self.rng, active)
            self.applied = self.applied.compose(embed(local, active, n))
            self.history.append(self.applied)
            self.remaining = {}
            entry = record.rounds[0]
            return RoundRecord(entry.outcome, entry.byproduct, entry.correction, entry.ebits, entry.ebits_per_cut,
                               f"graph[{len(edges)}] clifford", entry.probability, True,
                               {**metadata, "deterministic": True})

        resource = gate_state(local)
        result = routine_T(resource, self.state, outcome_forced, self.rng, active)
        self.state = result.post_state
        k = dict(zip(active, result.outcome))
        applied_angles = []
        still = {}
        for edge in edges:
            a, b = edge
            flipped = k[a] ^ k[b]
            applied_angles.append(-self.remaining[edge] if flipped else self.remaining[edge])
            if flipped:
                still[edge] = 2 * self.remaining[edge]
        applied_spec = GraphSpec(n, tuple(edges), tuple(applied_angles))
        self.applied = self.applied.compose(graph_gate(applied_spec))
        self.history.append(self.applied)
        self.remaining = still
        ebits, per_cut = resource_ebits(resource)
        return RoundRecord(result.outcome, result.byproduct, None, ebits, per_cut,
                           f"graph[{len(edges)}]", result.probability, not still, metadata)


def iterate_pairwise(spec: GraphSpec, data: StateVector, forced=None,
                     rng: Optional[np.random.Generator] = None, max_rounds: Optional[int] = None,
                     logger: Optional[RunLogger] = None) -> Tuple[StateVector, InductionRecord]:
    """
    Induce a graph gate with per-edge rotations by routine T and edge pruning.

    Forced outcomes of a round cover the active vertices (those touched by
    remaining edges), or all vertices with None at inactive ones.
    """
    return IterativePairwise(spec, data, forced, rng, max_rounds, logger).run()


class IterativeGeneral(InductionProtocol):
    """Arbitrary unitary by repeated Choi-state rounds targeting U (applied so far)^dag."""

    def __init__(self, u: np.ndarray, data: StateVector, forced=None, rng=None,
                 max_rounds: Optional[int] = None, logger: Optional[RunLogger] = None):
        super().__init__(data, forced, rng, max_rounds, logger)
        self.u = np.asarray(u, dtype=complex)
        self.n = int(round(np.log2(self.u.shape[0])))
        if self.n != data.n_qubits:
            raise RegisterError(f"{self.n}-qubit unitary applied to {data.n_qubits} data qubits")
        self.applied = np.eye(2 ** self.n, dtype=complex)
        self.done = False

    def get_protocol_name(self) -> str:
        return "iterate-general"

    def is_done(self) -> bool:
        return self.done

    def accumulated_gate(self) -> np.ndarray:
        return self.applied

    def play_round(self, forced) -> RoundRecord:
        target = self.u @ self.applied.conj().T
        if is_clifford_unitary(target):
            self.state, record = induce_clifford_general(target, self.state, forced, self.rng)
            self.applied = target @ self.applied
            self.done = True
            entry = record.rounds[0]
            return RoundRecord(entry.outcome, entry.byproduct, entry.correction, entry.ebits, entry.ebits_per_cut,
                               "residual clifford", entry.probability, True, {"deterministic": True})

        choi = choi_state(target)
        result = routine_T_tilde(choi, self.state, forced, self.rng)
        self.state = result.post_state
        self.applied = target @ result.byproduct.matrix() @ self.applied
        success = result.byproduct.is_identity
        self.done = success
        ebits, per_cut = choi_ebits(choi)
        return RoundRecord(result.outcome, result.byproduct, None, ebits, per_cut,
                           "residual", result.probability, success)


def iterate_general(u: np.ndarray, data: StateVector, forced=None,
                    rng: Optional[np.random.Generator] = None, max_rounds: Optional[int] = None,
                    logger: Optional[RunLogger] = None) -> Tuple[StateVector, InductionRecord]:
    """
    Induce any unitary with Choi-state rounds.

    Stops on the (0, 0) outcome or when the residual target is Clifford.
    Exhausting max_rounds returns a record with succeeded False.
    """
    return IterativeGeneral(u, data, forced, rng, max_rounds, logger).run()
