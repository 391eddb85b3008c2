"""Tests for diagonal gates, Walsh spectra and Pauli strings."""
import itertools
import os
import sys

import numpy as np
import pytest
import hypothesis.strategies as st
from hypothesis import given, settings

# Add the project root to Python path
sys.path.insert(0, os.path.abspath('.'))

from error_logger import NotCliffordError, RegisterError
from diagonal import (DiagonalGate, GraphSpec, PauliString, WalshSpectrum, as_mask, clifford_correction,
                      conjugate_by_x, embed, from_rotations, gate_state, ghz_plan, ghz_state, graph_gate,
                      is_clifford, is_clifford_unitary, normalize_angles, projector_phase, rotation,
                      walsh_spectrum, zz_rotation)
from statevec import CX, CZ, H, S, T, X, Y, Z, entanglement_entropy, plus_state, random_state


def x_string_matrix(n: int, mask: int) -> np.ndarray:
    return PauliString.x_string(n, mask).matrix()


class TestMasks:
    """Mask conversion and angle normalization."""

    def test_as_mask_forms(self):
        """Ints, bit strings and sequences describe the same mask."""
        assert as_mask(5, 3) == 5
        assert as_mask("101", 3) == 5
        assert as_mask([1, 0, 1], 3) == 5

    def test_as_mask_rejects_bad_input(self):
        with pytest.raises(RegisterError):
            as_mask(8, 3)
        with pytest.raises(RegisterError):
            as_mask("10", 3)

    def test_normalize_angles_range(self):
        """Angles land in (-pi, pi], with pi itself kept."""
        out = normalize_angles([np.pi, -np.pi, 3 * np.pi / 2, 0.25])
        assert np.allclose(out, [np.pi, np.pi, -np.pi / 2, 0.25])


class TestWalshSpectrum:
    """Walsh decomposition of diagonal gates."""

    def test_cz_spectrum(self):
        """CZ splits into pi/4 (global), -pi/4 Z, -pi/4 Z, pi/4 ZZ."""
        theta = walsh_spectrum(DiagonalGate(2, [0, 0, 0, np.pi])).theta
        assert np.allclose(theta, [np.pi / 4, -np.pi / 4, -np.pi / 4, np.pi / 4])

    def test_single_rotation_has_single_term(self):
        """e^{i theta Z^mask} has one nonzero Walsh angle."""
        spectrum = walsh_spectrum(rotation("101", 0.3, 3))
        assert spectrum.terms() == pytest.approx({0b101: 0.3})

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 4))
    def test_round_trip_up_to_phase(self, seed, n):
        """from_rotations inverts walsh_spectrum."""
        rng = np.random.default_rng(seed)
        gate = DiagonalGate(n, rng.uniform(-np.pi, np.pi, 2 ** n))
        assert from_rotations(walsh_spectrum(gate)).equals_up_to_phase(gate)

    def test_wrong_size(self):
        with pytest.raises(RegisterError):
            WalshSpectrum(2, [0.0, 1.0])


class TestDiagonalGate:
    """Gate algebra."""

    def test_compose_and_inverse(self):
        gate = DiagonalGate(2, [0.1, 0.2, 0.3, 0.4])
        assert gate.compose(gate.inverse()).equals_up_to_phase(DiagonalGate.identity(2))

    def test_global_phase_is_ignored(self):
        gate = DiagonalGate(2, [0.1, 0.2, 0.3, 0.4])
        assert gate.equals_up_to_phase(DiagonalGate(2, gate.alpha + 2.5))
        assert not gate.equals_up_to_phase(DiagonalGate(2, [0.1, 0.2, 0.3, 0.5]))

    def test_embed_matches_rotation(self):
        """A ZZ rotation on qubits (0, 2) of three is the mask 101 rotation."""
        lifted = embed(zz_rotation(0.7), [0, 2], 3)
        assert lifted.equals_up_to_phase(rotation("101", 0.7, 3))

    def test_embed_respects_target_order(self):
        """The first target carries the most significant bit of the small gate."""
        gate = projector_phase("10", 1.0, 2)
        lifted = embed(gate, [1, 0], 2)
        assert lifted.equals_up_to_phase(projector_phase("01", 1.0, 2))

    def test_conjugate_by_x_permutes_phases(self):
        gate = DiagonalGate(2, [0.1, 0.2, 0.3, 0.4])
        flipped = conjugate_by_x(gate, "10")
        xk = x_string_matrix(2, 0b10)
        assert np.allclose(flipped.matrix(), xk @ gate.matrix() @ xk)

    def test_graph_gate_of_one_edge(self):
        """A single pi/4 edge is CZ up to local Z rotations."""
        gate = graph_gate(GraphSpec(2, ((0, 1),)))
        assert gate.equals_up_to_phase(zz_rotation(np.pi / 4))

    def test_gate_state_of_zz_rotation_entropy(self):
        """The gate state of e^{i pi/4 ZZ} is maximally entangled."""
        assert np.isclose(entanglement_entropy(gate_state(zz_rotation(np.pi / 4)), [0]), 1)


class TestClifford:
    """Clifford detection and byproduct corrections."""

    @pytest.mark.parametrize("matrix,expected", [(Z, True), (S, True), (T, False)])
    def test_single_qubit_phases(self, matrix, expected):
        gate = DiagonalGate(1, np.angle(np.diag(matrix)))
        assert is_clifford(gate) == expected

    def test_cz_and_ccz(self):
        assert is_clifford(DiagonalGate(2, [0, 0, 0, np.pi]))
        assert not is_clifford(projector_phase("111", np.pi, 3))

    def test_wrapped_four_qubit_clifford(self):
        """Phase wrapping on four qubits does not hide a Clifford gate."""
        theta = np.zeros(16)
        for j in (0b1000, 0b0100, 0b0010, 0b0001, 0b1100):
            theta[j] = np.pi / 4
        gate = from_rotations(WalshSpectrum(4, theta))
        assert is_clifford(gate)
        assert not is_clifford(gate.compose(rotation("1111", 0.1, 4)))

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 4))
    def test_correction_restores_gate(self, seed, n):
        """C X^k g X^k equals g exactly for every byproduct k."""
        rng = np.random.default_rng(seed)
        gate = from_rotations(WalshSpectrum(n, rng.integers(0, 8, size=2 ** n) * np.pi / 4))
        for k in range(2 ** n):
            correction = clifford_correction(gate, k)
            assert correction.x_mask == 0
            xk = x_string_matrix(n, k)
            restored = correction.matrix() @ xk @ gate.matrix() @ xk
            assert np.allclose(restored, gate.matrix())

    def test_correction_of_non_clifford(self):
        with pytest.raises(NotCliffordError):
            clifford_correction(zz_rotation(0.1), 0b11)

    def test_clifford_unitaries(self):
        assert is_clifford_unitary(H)
        assert is_clifford_unitary(CX)
        assert not is_clifford_unitary(T)
        assert not is_clifford_unitary(np.array([[1, 1], [0, 1]]))


class TestPauliString:
    """Pauli string arithmetic and identification."""

    def test_multiply_matches_matrices(self):
        """The phase bookkeeping agrees with matrix multiplication."""
        paulis = [PauliString(2, p, x, z) for p, x, z in itertools.product(range(4), range(4), range(4))]
        rng = np.random.default_rng(0)
        for i, j in rng.integers(0, len(paulis), size=(40, 2)):
            a, b = paulis[i], paulis[j]
            assert np.allclose((a * b).matrix(), a.matrix() @ b.matrix())

    def test_xz_anticommute(self):
        x = PauliString.x_string(1, 1)
        z = PauliString.z_string(1, 1)
        assert (x * z).phase_exp == 0
        assert (z * x).phase_exp == 2

    def test_labels(self):
        """XZ = -iY; i X Z is Y."""
        assert PauliString(1, 0, 1, 1).label() == "-iY"
        assert PauliString(1, 1, 1, 1).label() == "Y"
        assert PauliString(2, 2, 0b10, 0b01).label() == "-XZ"
        assert PauliString.identity(3).label() == "III"

    def test_from_matrix(self):
        assert PauliString.from_matrix(Y) == PauliString(1, 1, 1, 1)
        assert PauliString.from_matrix(-1j * np.kron(X, Z)) == PauliString(2, 3, 0b10, 0b01)
        with pytest.raises(NotCliffordError):
            PauliString.from_matrix(H)

    def test_apply_to_drops_phase(self):
        state = random_state(2, np.random.default_rng(4))
        pauli = PauliString(2, 1, 0b01, 0b11)
        out = pauli.apply_to(state, [0, 1])
        expected = PauliString(2, 0, 0b01, 0b11).matrix() @ state.amps
        assert np.allclose(out.amps, expected)


class TestGhz:
    """GHZ resources and GHZ decompositions."""

    def test_ghz_state_entropy(self):
        """Every cut of the star graph state carries one ebit."""
        state = ghz_state(4)
        assert np.isclose(entanglement_entropy(state, [0]), 1)
        assert np.isclose(entanglement_entropy(state, [1]), 1)
        assert np.isclose(entanglement_entropy(state, [0, 1]), 1)

    def test_ghz_plan_of_ccz(self):
        """CCZ has three weight-2 terms and one weight-3 term."""
        plan = ghz_plan(projector_phase("111", np.pi, 3))
        weights = sorted(bin(mask).count("1") for mask, _ in plan.terms)
        assert weights == [2, 2, 2, 3]
        assert len(plan.local_terms) == 3
        assert plan.two_qubit_gate_count == 5

    def test_ghz_plan_of_product(self):
        plan = ghz_plan(rotation("100", 0.2, 3))
        assert plan.ghz_count == 0
