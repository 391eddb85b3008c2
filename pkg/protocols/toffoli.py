"""Iterative induction of F = e^{i pi |0...0><0...0|} (the Toffoli family up to local gates)."""
from dataclasses import dataclass
from typing import FrozenSet, Optional, Tuple

import numpy as np

from diagonal import (
    DiagonalGate,
    as_mask,
    conjugate_by_x,
    gate_state,
    is_clifford,
    projector_phase,
)
from error_logger import RegisterError
from logger import RunLogger
from protocols.base_protocol import InductionProtocol, InductionRecord, RoundRecord, resource_ebits
from protocols.deterministic import induce_clifford_diagonal
from protocols.routines import routine_T
from statevec import StateVector


@dataclass(frozen=True)
class XorSpan:
    """Set of bit masks closed under XOR, with the generators that produced it."""

    n: int
    generators: Tuple[int, ...] = ()
    span: FrozenSet[int] = frozenset({0})

    @property
    def rank(self) -> int:
        return int(np.log2(len(self.span)))

    def __contains__(self, k) -> bool:
        return as_mask(k, self.n) in self.span

    def add(self, k) -> "XorSpan":
        mask = as_mask(k, self.n)
        if mask in self.span:
            return self
        return XorSpan(self.n, self.generators + (mask,), self.span | {s ^ mask for s in self.span})


def toffoli_target(n: int) -> DiagonalGate:
    return projector_phase(0, np.pi, n)


def toffoli_ghz_gate_count(n: int) -> int:
    """Two-qubit intermodular gates for F via GHZ-induced rotations: 1 + 2^(n-1) (n-2)."""
    if n < 2:
        raise RegisterError(f"Toffoli family needs n >= 2, got {n}")
    return 1 + 2 ** (n - 1) * (n - 2)


class IterativeToffoli(InductionProtocol):
    """
    Round j consumes the gate state of the residual R_j = F A^dag (A = gate applied so far).

    R_j carries phase pi on the span Xi_{j-1} of earlier outcomes; the round
    succeeds natively iff k_j lies in that span. Once R_j is Clifford the round
    is finished with a Pauli correction.
    """

    def __init__(self, n: int, data: StateVector, forced=None, rng=None,
                 max_rounds: Optional[int] = None, logger: Optional[RunLogger] = None):
        super().__init__(data, forced, rng, max_rounds, logger)
        if n < 2:
            raise RegisterError(f"Toffoli family needs n >= 2, got {n}")
        if data.n_qubits != n:
            raise RegisterError(f"{n}-qubit Toffoli applied to {data.n_qubits} data qubits")
        self.n = n
        self.target = toffoli_target(n)
        self.applied = DiagonalGate.identity(n)
        self.xi = XorSpan(n)
        self.done = False

    def get_protocol_name(self) -> str:
        return "iterate-toffoli"

    def is_done(self) -> bool:
        return self.done

    def accumulated_gate(self) -> DiagonalGate:
        return self.applied

    def residual(self) -> DiagonalGate:
        return self.target.compose(self.applied.inverse())

    def play_round(self, forced) -> RoundRecord:
        residual = self.residual()
        native_probability = len(self.xi.span) / 2 ** self.n
        metadata = {"span_rank": self.xi.rank, "native_success_probability": native_probability}

        if is_clifford(residual):
            self.state, record = induce_clifford_diagonal(residual, self.state, forced, self.rng)
            entry = record.rounds[0]
            in_span = entry.outcome in self.xi
            self.applied = self.applied.compose(residual)
            self.done = True
            return RoundRecord(entry.outcome, entry.byproduct, entry.correction, entry.ebits, entry.ebits_per_cut,
                               "residual clifford", entry.probability, True,
                               {**metadata, "in_span": in_span, "deterministic": True})

        resource = gate_state(residual)
        result = routine_T(resource, self.state, forced, self.rng)
        self.state = result.post_state
        in_span = result.outcome in self.xi
        self.applied = self.applied.compose(conjugate_by_x(residual, result.outcome))
        if in_span:
            self.done = True
        else:
            self.xi = self.xi.add(result.outcome)
        ebits, per_cut = resource_ebits(resource)
        return RoundRecord(result.outcome, result.byproduct, None, ebits, per_cut, "residual",
                           result.probability, in_span, {**metadata, "in_span": in_span})


def iterate_toffoli(n: int, data: StateVector, forced=None, rng: Optional[np.random.Generator] = None,
                    max_rounds: Optional[int] = None,
                    logger: Optional[RunLogger] = None) -> Tuple[StateVector, InductionRecord]:
    """
    Induce F = e^{i pi |0...0><0...0|} on n data qubits.

    Round j succeeds with probability 2^(j-1) 2^-n; round n-1 at the latest
    has a Clifford residual and ends deterministically.
    """
    return IterativeToffoli(n, data, forced, rng, max_rounds, logger).run()
