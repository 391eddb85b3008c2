"""Tests for the module coupling model and bang-bang schedules."""
import os
import sys

import numpy as np
import pytest
import hypothesis.strategies as st
from hypothesis import given, settings

# Add the project root to Python path
sys.path.insert(0, os.path.abspath('.'))

from coupling import (CouplingModel, Module, ModuleLayout, WeightedGraph, approx_coupling, effective_coupling,
                      evolve_zz, logical_hamiltonian, physical_hamiltonian, required_unit_size, run_schedule,
                      schedule_pattern, step_graph, verify_internal_action, zz_energies)
from diagonal import GraphSpec, gate_state, graph_gate
from error_logger import CouplingError, RegisterError
from statevec import fidelity_up_to_phase, plus_state


def row_layout(unit_sizes, spacing=1.0) -> ModuleLayout:
    return ModuleLayout.point_like([(spacing * k, 0, 0) for k in range(len(unit_sizes))], unit_sizes)


class TestModel:
    """Validation of layouts and coupling parameters."""

    def test_non_positive_parameters(self):
        with pytest.raises(CouplingError):
            CouplingModel(J=0.0)
        with pytest.raises(CouplingError):
            CouplingModel(gamma=-1.0)

    def test_coincident_modules(self):
        with pytest.raises(CouplingError):
            ModuleLayout.point_like([(0, 0, 0), (0, 0, 0)], [1, 1])

    def test_offsets_must_match_unit(self):
        with pytest.raises(CouplingError):
            Module((0, 0, 0), 2, ((0, 0, 0),))

    def test_module_index_checked(self):
        with pytest.raises(RegisterError):
            effective_coupling(row_layout([1, 1]), CouplingModel(), 0, 2)


class TestAmplification:
    """Quadratic growth of the logical coupling with unit size."""

    @pytest.mark.parametrize("m_i,m_j", [(1, 1), (2, 3), (5, 5), (4, 1)])
    def test_point_like_matches_formula(self, m_i, m_j):
        model = CouplingModel(J=1.3, gamma=3.0)
        layout = ModuleLayout.point_like([(0, 0, 0), (0, 2.0, 0)], [m_i, m_j])
        f = effective_coupling(layout, model, 0, 1)
        assert abs(f - approx_coupling(m_i, m_j, 2.0, model)) < 1e-12

    def test_formula_example(self):
        assert approx_coupling(3, 3, 2.0, CouplingModel(1.0, 2.0)) == pytest.approx(2.25)

    def test_extended_modules_approach_formula(self):
        """Far-apart modules with small extent agree with the point-like formula within 1%."""
        model = CouplingModel()
        offsets = ((0.0, 0.0, 0.0), (0.1, 0.0, 0.0), (0.0, 0.1, 0.0))
        layout = ModuleLayout((Module((0, 0, 0), 3, offsets), Module((10, 0, 0), 3, offsets)))
        f = effective_coupling(layout, model, 0, 1)
        approx = approx_coupling(3, 3, 10.0, model)
        assert abs(f - approx) / approx < 0.01

    def test_flipped_signs_reverse_coupling(self):
        layout = row_layout([2, 2])
        model = CouplingModel()
        f = effective_coupling(layout, model, 0, 1)
        assert effective_coupling(layout, model, 0, 1, ((1, 1), (-1, -1))) == pytest.approx(-f)
        assert effective_coupling(layout, model, 0, 1, ((1, -1), (1, 1))) == pytest.approx(0.0)

    @pytest.mark.parametrize("target,delta,gamma,expected", [
        (1.0, 1.0, 2.0, 1),
        (1.0, 4.0, 2.0, 4),
        (1.0, 3.0, 6.0, 27),
    ])
    def test_required_unit_size(self, target, delta, gamma, expected):
        assert required_unit_size(target, delta, CouplingModel(1.0, gamma)) == expected

    @settings(max_examples=40, deadline=None)
    @given(target=st.floats(0.01, 50.0), delta=st.floats(0.5, 4.0), gamma=st.floats(0.5, 4.0))
    def test_required_unit_size_is_minimal(self, target, delta, gamma):
        """Brute-force scan agrees with the closed form."""
        model = CouplingModel(1.0, gamma)
        m = required_unit_size(target, delta, model)
        ratio = target * delta ** gamma
        assert m * m >= ratio * (1 - 1e-12)
        assert m == 1 or (m - 1) ** 2 < ratio * (1 - 1e-12)


class TestHamiltonians:
    """Logical and physical coupling graphs."""

    def test_logical_hamiltonian_weights(self):
        layout = row_layout([1, 2, 1])
        model = CouplingModel()
        graph = logical_hamiltonian(layout, model)
        assert graph.weight(0, 1) == pytest.approx(2.0)
        assert graph.weight(0, 2) == pytest.approx(0.25)
        assert graph.weight(1, 0) == graph.weight(0, 1)

    def test_physical_hamiltonian_idles_modules(self):
        layout = row_layout([1, 1, 1])
        graph = physical_hamiltonian(layout, CouplingModel(), active_modules=[0, 2])
        assert graph.weight(0, 1) == 0
        assert graph.weight(0, 2) == pytest.approx(0.25)

    def test_weighted_graph_validation(self):
        with pytest.raises(CouplingError):
            WeightedGraph(np.array([[0, 1], [2, 0]]))

    def test_zz_energies(self):
        """|00> gains +f, |01> gains -f."""
        energies = zz_energies(WeightedGraph(np.array([[0, 0.5], [0.5, 0]])))
        assert np.allclose(energies, [0.5, -0.5, -0.5, 0.5])

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_internal_action_is_trivial(self, m):
        assert verify_internal_action(m, np.random.default_rng(m))
        assert verify_internal_action(m, np.random.default_rng(m), signs=[1] + [-1] * (m - 1))

    @pytest.mark.parametrize("m", [2, 3])
    def test_stray_field_breaks_internal_action(self, m):
        """A Z field on one unit qubit dephases the logical qubit."""
        assert not verify_internal_action(m, np.random.default_rng(m), detuning=[0.3] + [0.0] * (m - 1))

    def test_balanced_field_keeps_internal_action(self):
        """Fields summing to zero along the sign vector give both code words the same phase."""
        assert verify_internal_action(2, np.random.default_rng(1), detuning=[0.4, -0.4])
        assert verify_internal_action(2, np.random.default_rng(1), signs=[1, -1], detuning=[0.4, 0.4])

    def test_detuning_length_checked(self):
        with pytest.raises(CouplingError):
            verify_internal_action(3, detuning=[0.1, 0.2])


class TestSchedule:
    """Bang-bang schedules on the logical qubits."""

    def test_one_step_per_edge(self):
        layout = row_layout([1, 1, 1])
        target = GraphSpec(3, ((0, 1), (1, 2)))
        schedule = schedule_pattern(target, layout, CouplingModel())
        assert len(schedule) == 2
        assert schedule.steps[0].encodings[2] is None
        assert schedule.total_time == pytest.approx(np.pi / 4 + np.pi / 4)

    def test_negative_angle_flips_signs(self):
        layout = row_layout([2, 2])
        target = GraphSpec(2, ((0, 1),), (-0.3,))
        step = schedule_pattern(target, layout, CouplingModel()).steps[0]
        assert step.duration > 0
        assert step.encodings[1] == (-1, -1)
        assert step_graph(step, layout, CouplingModel()).weight(0, 1) < 0

    def test_vertex_count_must_match(self):
        with pytest.raises(CouplingError):
            schedule_pattern(GraphSpec(3, ((0, 1),)), row_layout([1, 1]), CouplingModel())

    @settings(max_examples=15, deadline=None)
    @given(angles=st.lists(st.floats(-1.5, 1.5), min_size=3, max_size=3))
    def test_schedule_realizes_graph_gate(self, angles):
        """Running the schedule on |+>^n gives the gate state of the target graph."""
        layout = ModuleLayout.point_like([(0, 0, 0), (1, 0, 0), (0, 1.5, 0)], [1, 2, 1])
        model = CouplingModel()
        target = GraphSpec(3, ((0, 1), (1, 2), (0, 2)), tuple(angles))
        state = run_schedule(plus_state(3), schedule_pattern(target, layout, model), layout, model)
        assert fidelity_up_to_phase(state, gate_state(graph_gate(target))) > 1 - 1e-9

    def test_evolve_checks_size(self):
        with pytest.raises(RegisterError):
            evolve_zz(plus_state(3), WeightedGraph(np.zeros((2, 2))), 1.0)
