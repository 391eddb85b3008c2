"""Entanglement cost of two-qubit rotations: iterative gate-state route versus one Bell pair."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import bisect

import config
from error_logger import ErrorCategory, StrategyError, log_info

ITERATIVE = "iterative"
BELL_DETERMINISTIC = "bell_deterministic"


@dataclass(frozen=True)
class CostProfile:
    """Per-round and expected ebits of the iterative route for one angle."""

    theta: float
    per_round_cost: Tuple[float, ...]
    expected_cost: float
    deterministic_cost: float
    preferred: str

    def to_dict(self):
        return {
            "theta": self.theta,
            "per_round_cost": list(self.per_round_cost),
            "expected_cost": self.expected_cost,
            "deterministic_cost": self.deterministic_cost,
            "preferred": self.preferred,
        }


@dataclass(frozen=True)
class MonteCarloCost:
    trials: int
    mean_rounds: float
    mean_ebits: float
    stderr_rounds: float
    stderr_ebits: float

    @property
    def stderr(self) -> float:
        return self.stderr_ebits

    def to_dict(self):
        return {
            "trials": self.trials,
            "mean_rounds": self.mean_rounds,
            "mean_ebits": self.mean_ebits,
            "stderr_rounds": self.stderr_rounds,
            "stderr_ebits": self.stderr_ebits,
        }


def rotation_entropy(theta: float) -> float:
    """Binary entropy of x = cos^2(theta): ebits in the gate state of e^{i theta ZZ}."""
    x = float(np.cos(theta) ** 2)
    terms = [p * np.log2(p) for p in (x, 1 - x) if p > config.EIGEN_CUTOFF]
    return float(max(0.0, -sum(terms)))


def _series_length(tol: float) -> int:
    # tail after K terms is at most 2^-(K-1) * 2 since E <= 1
    k = 1
    while 2.0 ** (-(k - 1)) * 2 >= tol:
        k += 1
    return k


def per_round_costs(theta: float, tail_tol: float = config.COST_TAIL_TOL) -> List[float]:
    """E(2^(k-1) theta) for every term of the series truncated at tail_tol."""
    return [rotation_entropy(2 ** (k - 1) * theta) for k in range(1, _series_length(tail_tol) + 1)]


def expected_cost(theta: float, tail_tol: float = config.COST_TAIL_TOL) -> float:
    """sum_k (1/2)^(k-1) E(2^(k-1) theta)."""
    costs = per_round_costs(theta, tail_tol)
    return float(sum(0.5 ** k * c for k, c in enumerate(costs)))


def cost_threshold() -> float:
    """
    Smallest positive angle where the iterative route stops being cheaper than one ebit.

    Returns:
        The root of expected_cost(theta) = 1 in (0, pi/4)
    """
    def excess(t: float) -> float:
        return expected_cost(t) - 1.0

    grid = np.arange(0.01, np.pi / 4, 0.01)
    for lo, hi in zip(grid[:-1], grid[1:]):
        if excess(lo) < 0 <= excess(hi):
            return float(bisect(excess, lo, hi, xtol=config.THRESHOLD_XTOL))
    raise StrategyError("no cost crossing found in (0, pi/4)")


def fold_angle(theta: float) -> float:
    """Map theta to [0, pi/4] using the pi/2 period and the reflection about pi/4."""
    t = float(np.mod(theta, np.pi / 2))
    return np.pi / 2 - t if t > np.pi / 4 else t


def strategy_advice(theta: float) -> str:
    """'iterative' when the expected cost is below one ebit; ties go to the Bell route."""
    return ITERATIVE if expected_cost(fold_angle(theta)) < 1.0 - config.COST_TAIL_TOL else BELL_DETERMINISTIC


def cost_profile(theta: float) -> CostProfile:
    costs = per_round_costs(theta)
    return CostProfile(float(theta), tuple(costs), expected_cost(theta), 1.0, strategy_advice(theta))


def _trial(theta: float, seed: int, index: int) -> Tuple[int, float]:
    from protocols.iterative import iterate_rotation
    from statevec import plus_state

    rng = np.random.default_rng([seed, index])
    _, record = iterate_rotation(theta, 0b11, plus_state(2), rng=rng)
    return record.n_rounds, record.total_ebits


def monte_carlo_cost(theta: float, trials: int = config.DEFAULT_TRIALS,
                     rng: Optional[np.random.Generator] = None, seed: Optional[int] = None,
                     workers: int = 1) -> MonteCarloCost:
    """
    Sample iterate_rotation runs and report mean rounds and ebits.

    Trial i draws from default_rng([seed, i]), so serial and threaded runs agree.

    Args:
        theta: Rotation angle
        trials: Number of independent runs
        rng: Generator used to draw the base seed when none is given
        seed: Base seed
        workers: Worker threads
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if seed is None:
        if rng is None:
            raise ValueError("monte_carlo_cost needs a seed or a random generator")
        seed = int(rng.integers(0, 2 ** 63))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda i: _trial(theta, seed, i), range(trials)))
    else:
        results = [_trial(theta, seed, i) for i in range(trials)]
    rounds = np.array([r for r, _ in results], dtype=float)
    ebits = np.array([e for _, e in results], dtype=float)
    spread = np.sqrt(trials) if trials > 1 else np.inf
    out = MonteCarloCost(
        trials,
        float(rounds.mean()),
        float(ebits.mean()),
        float(rounds.std(ddof=1) / spread) if trials > 1 else 0.0,
        float(ebits.std(ddof=1) / spread) if trials > 1 else 0.0,
    )
    log_info(f"monte carlo theta={theta:.6g}: {out.mean_rounds:.4f} rounds, {out.mean_ebits:.4f} ebits",
             ErrorCategory.PROTOCOL, {"trials": trials, "seed": seed})
    return out
