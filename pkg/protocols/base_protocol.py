"""Abstract base class and transcripts for gate-induction protocols."""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

import config
from diagonal import DiagonalGate, PauliString
from error_logger import ErrorCategory, log_warning
from logger import RunLogger
from statevec import StateVector, entanglement_entropy

Gate = Union[DiagonalGate, np.ndarray]
Outcome = Tuple[Optional[int], ...]


@dataclass(frozen=True)
class RoundRecord:
    """Bookkeeping for one protocol round."""

    outcome: Outcome
    byproduct: PauliString
    correction: Optional[PauliString]
    ebits: float
    ebits_per_cut: Tuple[float, ...]
    target: str
    probability: float
    success: bool
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "outcome": list(self.outcome),
            "byproduct": self.byproduct.label(),
            "correction": None if self.correction is None else self.correction.label(),
            "ebits": self.ebits,
            "ebits_per_cut": list(self.ebits_per_cut),
            "target": self.target,
            "probability": self.probability,
            "success": self.success,
            "metadata": self.metadata,
        }


@dataclass(frozen=True, eq=False)
class InductionRecord:
    """Immutable transcript of a protocol run."""

    protocol: str
    rounds: Tuple[RoundRecord, ...]
    accumulated_gate: Gate
    succeeded: bool

    @property
    def n_rounds(self) -> int:
        return len(self.rounds)

    @property
    def total_ebits(self) -> float:
        return float(sum(r.ebits for r in self.rounds))

    @property
    def probability(self) -> float:
        """Probability of the recorded outcome sequence."""
        return float(np.prod([r.probability for r in self.rounds])) if self.rounds else 1.0

    @property
    def outcomes(self) -> List[List[Optional[int]]]:
        return [list(r.outcome) for r in self.rounds]

    def to_dict(self) -> Dict[str, Any]:
        gate = self.accumulated_gate
        if isinstance(gate, DiagonalGate):
            gate_dict = {"kind": "diagonal", "alpha": [float(a) for a in gate.alpha]}
        else:
            gate_dict = {"kind": "unitary",
                         "real": np.real(gate).tolist(),
                         "imag": np.imag(gate).tolist()}
        return {
            "protocol": self.protocol,
            "succeeded": self.succeeded,
            "n_rounds": self.n_rounds,
            "total_ebits": self.total_ebits,
            "rounds": [r.to_dict() for r in self.rounds],
            "accumulated_gate": gate_dict,
        }


def resource_ebits(resource: StateVector, cuts: Optional[Sequence[Sequence[int]]] = None) -> Tuple[float, Tuple[float, ...]]:
    """
    Entanglement of a resource state across single-module cuts.

    Args:
        resource: Resource state
        cuts: Qubit groups, one per module (default: every qubit its own module)

    Returns:
        (largest cut entropy, entropy of every cut)
    """
    if resource.n_qubits == 1:
        return 0.0, (0.0,)
    if cuts is None:
        cuts = [[q] for q in range(resource.n_qubits)]
    per_cut = tuple(entanglement_entropy(resource, list(c)) for c in cuts)
    return max(per_cut), per_cut


def single_round_record(protocol: str, entry: RoundRecord, gate: Gate) -> InductionRecord:
    return InductionRecord(protocol, (entry,), gate, True)


class InductionProtocol(ABC):
    """Round-based protocol: play rounds until the target gate is complete."""

    def __init__(self, data: StateVector, forced: Optional[Sequence[Sequence[Optional[int]]]] = None,
                 rng: Optional[np.random.Generator] = None, max_rounds: Optional[int] = None,
                 logger: Optional[RunLogger] = None):
        """
        Initialize the protocol.

        Args:
            data: Data register the gate acts on
            forced: Per-round forced outcomes; rounds past the end are sampled
            rng: Random generator for sampled outcomes
            max_rounds: Round cap (default config.DEFAULT_MAX_ROUNDS)
            logger: Optional run logger receiving each round
        """
        self.state = data
        self.forced = list(forced) if forced is not None else []
        self.rng = rng
        self.max_rounds = config.DEFAULT_MAX_ROUNDS if max_rounds is None else max_rounds
        self.logger = logger
        self.rounds: List[RoundRecord] = []
        if self.max_rounds < 1:
            raise ValueError(f"max_rounds must be >= 1, got {self.max_rounds}")

    @abstractmethod
    def get_protocol_name(self) -> str:
        """Return the name of the protocol."""
        pass

    @abstractmethod
    def is_done(self) -> bool:
        """Return True once the target gate is fully applied."""
        pass

    @abstractmethod
    def play_round(self, forced: Optional[Sequence[Optional[int]]]) -> RoundRecord:
        """Run one round, updating self.state, and return its record."""
        pass

    @abstractmethod
    def accumulated_gate(self) -> Gate:
        """Return the gate applied to the data register so far."""
        pass

    def _forced_for(self, index: int) -> Optional[Sequence[Optional[int]]]:
        return self.forced[index] if index < len(self.forced) else None

    def run(self) -> Tuple[StateVector, InductionRecord]:
        """
        Play rounds until done or the round cap is reached.

        Returns:
            (final data state, transcript)
        """
        while not self.is_done() and len(self.rounds) < self.max_rounds:
            entry = self.play_round(self._forced_for(len(self.rounds)))
            self.rounds.append(entry)
            if self.logger is not None:
                self.logger.log_round(len(self.rounds), list(entry.outcome), entry.byproduct.label(),
                                      None if entry.correction is None else entry.correction.label(),
                                      entry.ebits, entry.success, {"target": entry.target, **entry.metadata})

        succeeded = self.is_done()
        if not succeeded:
            log_warning(f"{self.get_protocol_name()} stopped after {len(self.rounds)} rounds without success",
                        ErrorCategory.PROTOCOL, {"max_rounds": self.max_rounds})
        record = InductionRecord(self.get_protocol_name(), tuple(self.rounds), self.accumulated_gate(), succeeded)
        return self.state, record
