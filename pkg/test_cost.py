"""Tests for the entanglement-cost analysis."""
import os
import sys

import numpy as np
import pytest
import hypothesis.strategies as st
from hypothesis import given, settings

# Add the project root to Python path
sys.path.insert(0, os.path.abspath('.'))

from cost import (BELL_DETERMINISTIC, ITERATIVE, cost_profile, cost_threshold, expected_cost, fold_angle,
                  monte_carlo_cost, per_round_costs, rotation_entropy, strategy_advice)


class TestEntropy:
    """Ebits in the gate state of e^{i theta ZZ}."""

    @pytest.mark.parametrize("theta,expected", [(0.0, 0.0), (np.pi / 4, 1.0), (np.pi / 2, 0.0), (-np.pi / 4, 1.0)])
    def test_known_values(self, theta, expected):
        assert rotation_entropy(theta) == pytest.approx(expected, abs=1e-12)

    @settings(max_examples=50)
    @given(theta=st.floats(-10.0, 10.0))
    def test_bounded(self, theta):
        assert 0.0 <= rotation_entropy(theta) <= 1.0


class TestExpectedCost:
    """The geometric series over doubled angles."""

    def test_quarter_turn_costs_one_ebit(self):
        assert expected_cost(np.pi / 4) == pytest.approx(1.0)

    def test_zero_angle_is_free(self):
        assert expected_cost(0.0) == pytest.approx(0.0)

    def test_per_round_doubles_angle(self):
        costs = per_round_costs(0.1)
        assert costs[0] == pytest.approx(rotation_entropy(0.1))
        assert costs[2] == pytest.approx(rotation_entropy(0.4))

    def test_threshold(self):
        threshold = cost_threshold()
        assert 0.2240 <= threshold <= 0.2250
        assert expected_cost(threshold) == pytest.approx(1.0, abs=1e-4)

    def test_continuous_on_fine_grid(self):
        grid = np.arange(1e-4, np.pi / 4, 1e-3)
        costs = np.array([expected_cost(t) for t in grid])
        assert np.max(np.abs(np.diff(costs))) < 0.05

    def test_truncation_jumps_below_tolerance(self):
        """The truncated series stays within 1e-9 of a longer one across the grid."""
        grid = np.arange(1e-4, np.pi / 4, 1e-4)[::7]
        truncation = np.array([expected_cost(t) - expected_cost(t, 1e-15) for t in grid])
        assert np.max(np.abs(truncation)) < 1e-9
        assert np.max(np.abs(np.diff(truncation))) < 1e-9

    def test_longer_series(self):
        assert len(per_round_costs(0.3, 1e-15)) > len(per_round_costs(0.3))

    @pytest.mark.parametrize("theta,expected", [(0.1, 0.1), (np.pi / 2 - 0.1, 0.1), (np.pi / 2 + 0.2, 0.2),
                                                (-0.3, 0.3)])
    def test_fold_angle(self, theta, expected):
        assert fold_angle(theta) == pytest.approx(expected)

    @pytest.mark.parametrize("theta,expected", [(0.1, ITERATIVE), (0.22, ITERATIVE), (0.23, BELL_DETERMINISTIC),
                                                (np.pi / 4, BELL_DETERMINISTIC), (np.pi / 2 - 0.1, ITERATIVE)])
    def test_strategy_advice(self, theta, expected):
        assert strategy_advice(theta) == expected

    def test_profile(self):
        profile = cost_profile(0.5)
        assert profile.preferred == BELL_DETERMINISTIC
        assert profile.deterministic_cost == 1.0
        assert profile.to_dict()["per_round_cost"][0] == pytest.approx(rotation_entropy(0.5))


class TestMonteCarlo:
    """Sampled runs of the iterative rotation protocol."""

    def test_mean_rounds_near_two(self):
        result = monte_carlo_cost(0.3, 4000, seed=1234)
        assert 1.85 <= result.mean_rounds <= 2.15
        assert abs(result.mean_ebits - expected_cost(0.3)) < 6 * result.stderr_ebits + 1e-9

    def test_quarter_turn_is_one_round(self):
        result = monte_carlo_cost(np.pi / 4, 20, seed=0)
        assert result.mean_rounds == 1.0
        assert result.mean_ebits == pytest.approx(1.0)
        assert result.stderr_rounds == 0.0

    def test_threads_match_serial(self):
        serial = monte_carlo_cost(0.2, 200, seed=99)
        threaded = monte_carlo_cost(0.2, 200, seed=99, workers=4)
        assert serial == threaded

    def test_seed_from_generator(self):
        a = monte_carlo_cost(0.2, 50, rng=np.random.default_rng(5))
        b = monte_carlo_cost(0.2, 50, rng=np.random.default_rng(5))
        assert a == b

    def test_requires_seed(self):
        with pytest.raises(ValueError):
            monte_carlo_cost(0.2, 10)
        with pytest.raises(ValueError):
            monte_carlo_cost(0.2, 0, seed=1)
