"""Tests for routines T and T-tilde and the deterministic induction protocols."""
import itertools
import os
import sys

import numpy as np
import pytest
import hypothesis.strategies as st
from hypothesis import given, settings
from scipy.stats import unitary_group

# Add the project root to Python path
sys.path.insert(0, os.path.abspath('.'))

from diagonal import (DiagonalGate, PauliString, choi_state, conjugate_by_x, embed, gate_state, projector_phase,
                      rotation, zz_rotation)
from error_logger import CodeSpaceError, NotCliffordError, RegisterError
from protocols.base_protocol import resource_ebits
from protocols.deterministic import (induce_clifford_diagonal, induce_clifford_general, induce_diagonal_ghz,
                                     induce_rotation_bell, induce_rotation_ghz)
from protocols.routines import choi_ebits, routine_T, routine_T_tilde
from statevec import (CX, CZ, H, S, apply_diagonal, apply_gate, fidelity_up_to_phase, from_amplitudes,
                      plus_state, random_state)
from verification import random_clifford_diagonal, random_clifford_unitary


def bits(n: int):
    return itertools.product((0, 1), repeat=n)


def same_state(a, b) -> bool:
    return fidelity_up_to_phase(a, b) >= 1 - 1e-9


class TestRoutineT:
    """Gate-state teleportation with an X^k byproduct."""

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 3))
    def test_outcomes_uniform_and_byproduct_law(self, seed, n):
        """Every k has probability 2^-n and leaves X^k L X^k |psi>."""
        rng = np.random.default_rng(seed)
        gate = DiagonalGate(n, rng.uniform(-np.pi, np.pi, 2 ** n))
        data = random_state(n, rng)
        for k in bits(n):
            result = routine_T(gate_state(gate), data, k)
            assert abs(result.probability - 2.0 ** -n) < 1e-12
            mask = int("".join(map(str, k)), 2)
            expected = apply_diagonal(data, conjugate_by_x(gate, mask), range(n))
            assert same_state(result.post_state, expected)
            assert result.byproduct == PauliString.x_string(n, mask)

    def test_targets_subset(self):
        """A 2-qubit gate state acts on the listed data qubits only."""
        rng = np.random.default_rng(1)
        data = random_state(3, rng)
        gate = zz_rotation(0.4)
        result = routine_T(gate_state(gate), data, (0, 0), targets=[2, 0])
        assert same_state(result.post_state, apply_diagonal(data, gate, [2, 0]))

    def test_forced_length_checked(self):
        with pytest.raises(RegisterError):
            routine_T(gate_state(zz_rotation(0.1)), plus_state(2), (0,))

    def test_target_count_checked(self):
        with pytest.raises(RegisterError):
            routine_T(gate_state(zz_rotation(0.1)), plus_state(3), (0, 0))

    def test_sampled_run_reproducible(self):
        data = random_state(2, np.random.default_rng(0))
        a = routine_T(gate_state(zz_rotation(0.3)), data, rng=np.random.default_rng(42))
        b = routine_T(gate_state(zz_rotation(0.3)), data, rng=np.random.default_rng(42))
        assert a.outcome == b.outcome
        assert np.array_equal(a.post_state.amps, b.post_state.amps)


class TestRoutineTTilde:
    """Choi-state teleportation with an X^i Z^j byproduct."""

    @pytest.mark.parametrize("n", [1, 2])
    def test_byproduct_law(self, n):
        rng = np.random.default_rng(10 + n)
        u = unitary_group.rvs(2 ** n, random_state=rng)
        data = random_state(n, rng)
        for outcome in bits(2 * n):
            result = routine_T_tilde(choi_state(u), data, outcome)
            assert abs(result.probability - 4.0 ** -n) < 1e-12
            expected = apply_gate(data, u @ result.byproduct.matrix(), range(n))
            assert same_state(result.post_state, expected)

    def test_forced_as_pair(self):
        """Forced outcomes may be given as an (i, j) pair."""
        data = random_state(1, np.random.default_rng(2))
        flat = routine_T_tilde(choi_state(H), data, [1, 0])
        paired = routine_T_tilde(choi_state(H), data, [[1], [0]])
        assert flat.i == paired.i == (1,)
        assert np.array_equal(flat.post_state.amps, paired.post_state.amps)

    def test_malformed_choi_state(self):
        with pytest.raises(CodeSpaceError):
            routine_T_tilde(plus_state(2), plus_state(1), [0, 0])

    def test_choi_ebits(self):
        """A 2-qubit unitary costs two ebits."""
        assert choi_ebits(choi_state(CX))[0] == pytest.approx(2.0)
        assert choi_ebits(choi_state(H))[0] == pytest.approx(1.0)


class TestResourceEbits:
    """Entanglement accounting across module cuts."""

    def test_cz_state_is_one_ebit(self):
        ebits, per_cut = resource_ebits(gate_state(DiagonalGate(2, [0, 0, 0, np.pi])))
        assert ebits == pytest.approx(1.0)
        assert per_cut == pytest.approx((1.0, 1.0))

    def test_single_qubit_is_free(self):
        assert resource_ebits(plus_state(1)) == (0.0, (0.0,))

    def test_grouped_cuts(self):
        """Qubits of the same module count as one party."""
        state = gate_state(embed(zz_rotation(np.pi / 4), [0, 1], 3))
        ebits, _ = resource_ebits(state, [[0, 1], [2]])
        assert ebits == pytest.approx(0.0)


class TestCliffordInduction:
    """Deterministic induction of Clifford gates."""

    @settings(max_examples=15, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 4))
    def test_every_branch_gives_the_gate(self, seed, n):
        rng = np.random.default_rng(seed)
        gate = random_clifford_diagonal(n, rng)
        data = random_state(n, rng)
        expected = apply_diagonal(data, gate, range(n))
        for k in bits(n):
            post, record = induce_clifford_diagonal(gate, data, k)
            assert same_state(post, expected)
            assert record.succeeded and record.n_rounds == 1

    def test_cz_costs_one_ebit(self):
        post, record = induce_clifford_diagonal(DiagonalGate(2, [0, 0, 0, np.pi]), plus_state(2), (1, 1))
        assert record.total_ebits == pytest.approx(1.0)
        assert same_state(post, apply_gate(plus_state(2), CZ, [0, 1]))
        assert record.rounds[0].correction is not None

    def test_non_clifford_rejected(self):
        with pytest.raises(NotCliffordError):
            induce_clifford_diagonal(projector_phase("11", np.pi / 2, 2), plus_state(2), (0, 0))

    @pytest.mark.parametrize("n", [1, 2])
    def test_choi_route_every_branch(self, n):
        rng = np.random.default_rng(20 + n)
        u = random_clifford_unitary(n, rng)
        data = random_state(n, rng)
        expected = apply_gate(data, u, range(n))
        for outcome in bits(2 * n):
            post, record = induce_clifford_general(u, data, outcome)
            assert same_state(post, expected)
            assert record.protocol == "clifford-choi"

    def test_choi_route_needs_clifford(self):
        with pytest.raises(NotCliffordError):
            induce_clifford_general(unitary_group.rvs(2, random_state=np.random.default_rng(0)), plus_state(1))


class TestRotationInduction:
    """GHZ- and Bell-assisted rotations."""

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_ghz_rotation_every_branch(self, n):
        rng = np.random.default_rng(n)
        theta = float(rng.uniform(-np.pi, np.pi))
        data = random_state(n, rng)
        expected = apply_diagonal(data, rotation(2 ** n - 1, theta, n), range(n))
        for outcome in bits(n):
            post, record = induce_rotation_ghz(theta, 2 ** n - 1, data, outcome)
            assert same_state(post, expected)
            assert record.total_ebits == pytest.approx(1.0)

    def test_ghz_rotation_on_submask(self):
        rng = np.random.default_rng(7)
        data = random_state(3, rng)
        post, _ = induce_rotation_ghz(0.7, "101", data, (1, 0))
        assert same_state(post, apply_diagonal(data, rotation("101", 0.7, 3), range(3)))

    def test_weight_one_mask_rejected(self):
        with pytest.raises(RegisterError):
            induce_rotation_ghz(0.3, "01", plus_state(2), (0, 0))

    def test_bell_matches_ghz(self):
        data = random_state(2, np.random.default_rng(3))
        for outcome in bits(2):
            bell, record = induce_rotation_bell(0.9, data, outcome)
            ghz, _ = induce_rotation_ghz(0.9, 0b11, data, outcome)
            assert same_state(bell, ghz)
            assert record.protocol == "rotation-bell"

    def test_diagonal_ghz_ccz(self):
        """CCZ through weight-1 local rotations and four GHZ rounds."""
        rng = np.random.default_rng(5)
        gate = projector_phase("111", np.pi, 3)
        data = random_state(3, rng)
        post, record = induce_diagonal_ghz(gate, data, rng=rng)
        assert record.n_rounds == 4
        assert same_state(post, apply_diagonal(data, gate, range(3)))

    def test_diagonal_ghz_arity(self):
        with pytest.raises(RegisterError):
            induce_diagonal_ghz(zz_rotation(0.1), plus_state(3))


class TestGateStates:
    """Sanity of the resource states themselves."""

    def test_s_gate_state(self):
        state = gate_state(DiagonalGate(1, np.angle(np.diag(S))))
        assert np.allclose(state.amps, from_amplitudes([1, 1j]).amps)
