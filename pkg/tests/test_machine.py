import math

import numpy as np
import pytest

from uncompute_sim.errors import (
    CapacityExceeded, DeadQubit, InvalidArity, InvariantViolation, NonFiniteAngle, OutOfQubits,
    OverlappingRegisters,
)
from uncompute_sim.machine import GateKind, Machine, new_machine, resolve_gate, rotation
from tests.conftest import random_state, loaded_machine

S = 1 / math.sqrt(2)


class TestAllocation:

    def test_initial_state_is_all_zeros(self):
        m = new_machine(2, 7)
        np.testing.assert_allclose(m.amplitudes, [1, 0, 0, 0])
        assert m.query_count == 0
        assert m.free_qubits == (0, 1)

    def test_empty_machine(self):
        np.testing.assert_allclose(new_machine(0, 0).amplitudes, [1])

    def test_capacity(self):
        with pytest.raises(CapacityExceeded):
            new_machine(27, 0)

    def test_allocate_leaves_state_unchanged(self):
        m = new_machine(3, 0)
        register = m.allocate(2)
        assert register.width == 2
        assert m.free_qubits == (2,)
        np.testing.assert_allclose(m.amplitudes[0], 1)

    def test_allocate_zero_width(self):
        with pytest.raises(InvalidArity):
            new_machine(3, 0).allocate(0)

    def test_successive_registers_are_disjoint(self):
        m = new_machine(3, 0)
        a, b = m.allocate(1), m.allocate(1)
        assert set(a.qubits).isdisjoint(b.qubits)

    def test_out_of_qubits(self):
        m = new_machine(2, 0)
        m.allocate(2)
        with pytest.raises(OutOfQubits):
            m.allocate(1)

    def test_gate_on_free_qubit(self):
        m = new_machine(2, 0)
        with pytest.raises(DeadQubit):
            m.apply_h(1)


class TestSingleQubitGates:

    def test_hadamard(self):
        m = new_machine(1, 0)
        q = m.allocate(1)
        m.apply_h(q[0])
        np.testing.assert_allclose(m.amplitudes, [S, S], atol=1e-12)

    def test_hadamard_is_self_inverse(self, rng):
        m, q = loaded_machine(random_state(rng, 3))
        before = m.amplitudes.copy()
        m.apply_h(q[1])
        m.apply_h(q[1])
        np.testing.assert_allclose(m.amplitudes, before, atol=1e-12)

    def test_hadamard_on_low_bit_of_basis_state(self):
        m = new_machine(2, 0)
        q = m.allocate(2)
        m.apply_x(q[1])
        m.apply_h(q[0])
        np.testing.assert_allclose(m.amplitudes, [0, 0, S, S], atol=1e-12)

    def test_paulis(self):
        m = new_machine(1, 0)
        q = m.allocate(1)
        m.apply_x(q[0])
        np.testing.assert_allclose(m.amplitudes, [0, 1])

        m = new_machine(1, 0)
        q = m.allocate(1)
        m.apply_y(q[0])
        np.testing.assert_allclose(m.amplitudes, [0, 1j])

        m = new_machine(1, 0)
        q = m.allocate(1)
        m.apply_h(q[0])
        m.apply_z(q[0])
        np.testing.assert_allclose(m.amplitudes, [S, -S], atol=1e-12)

    def test_rot_y_pi_flips(self):
        m = new_machine(1, 0)
        q = m.allocate(1)
        m.apply_rot_y(q[0], math.pi)
        np.testing.assert_allclose(m.amplitudes, [0, 1], atol=1e-12)

    def test_rot_y_third(self):
        m = new_machine(1, 0)
        q = m.allocate(1)
        m.apply_rot_y(q[0], 2 * math.acos(math.sqrt(1 / 3)))
        np.testing.assert_allclose(m.amplitudes, [math.sqrt(1 / 3), math.sqrt(2 / 3)], atol=1e-12)

    def test_rot_x_pi(self):
        m = new_machine(1, 0)
        q = m.allocate(1)
        m.apply_rot_x(q[0], math.pi)
        np.testing.assert_allclose(m.amplitudes, [0, -1j], atol=1e-12)

    def test_rot_x_half(self):
        m = new_machine(1, 0)
        q = m.allocate(1)
        m.apply_rot_x(q[0], math.pi / 2)
        np.testing.assert_allclose(m.amplitudes, [S, -1j * S], atol=1e-12)

    def test_rot_z(self):
        theta = 0.7
        m = new_machine(1, 0)
        q = m.allocate(1)
        m.apply_h(q[0])
        m.apply_rot_z(q[0], theta)
        expected = [S * np.exp(-0.5j * theta), S * np.exp(0.5j * theta)]
        np.testing.assert_allclose(m.amplitudes, expected, atol=1e-12)

    def test_rot_z_on_basis_state_is_phase(self):
        m = new_machine(1, 0)
        q = m.allocate(1)
        m.apply_x(q[0])
        m.apply_rot_z(q[0], math.pi)
        np.testing.assert_allclose(m.amplitudes, [0, 1j], atol=1e-12)

    @pytest.mark.parametrize('axis', ['X', 'Y', 'Z'])
    def test_rotation_inverse(self, rng, axis):
        m, q = loaded_machine(random_state(rng, 2))
        before = m.amplitudes.copy()
        gate = rotation(axis, 0.7321)
        m.apply_gate(gate, q[0])
        m.apply_gate(gate.inverse(), q[0])
        np.testing.assert_allclose(m.amplitudes, before, atol=1e-12)

    def test_non_finite_angle(self):
        m = new_machine(1, 0)
        q = m.allocate(1)
        with pytest.raises(NonFiniteAngle):
            m.apply_rot_y(q[0], float('nan'))
        with pytest.raises(NonFiniteAngle):
            m.apply_global_phase(float('inf'))

    def test_rotation_kinds(self):
        assert rotation('Y', math.pi).kind is GateKind.PERMUTATION
        assert rotation('Y', 2 * math.pi).kind is GateKind.DIAGONAL
        assert rotation('Y', 0.3).kind is GateKind.SUPERPOSING
        assert rotation('Z', 0.3).kind is GateKind.DIAGONAL


class TestControlledGates:

    def test_cnot(self):
        m = new_machine(2, 0)
        q = m.allocate(2)
        m.apply_x(q[0])
        m.apply_controlled([q[0]], 'X', q[1])
        np.testing.assert_allclose(m.amplitudes, [0, 0, 0, 1])

    def test_control_not_satisfied(self):
        m = new_machine(2, 0)
        q = m.allocate(2)
        m.apply_controlled([q[0]], 'H', q[1])
        np.testing.assert_allclose(m.amplitudes, [1, 0, 0, 0])

    def test_anti_controlled_hadamard(self):
        m = new_machine(2, 0)
        q = m.allocate(2)
        m.apply_h(q[1])
        m.apply_controlled([q[1]], 'H', q[0], polarity=0)
        np.testing.assert_allclose(m.amplitudes, [0.5, 0.5, S, 0], atol=1e-12)

    def test_controlled_rotation(self):
        m = new_machine(2, 0)
        q = m.allocate(2)
        m.apply_x(q[0])
        m.apply_controlled([q[0]], rotation('Y', math.pi), q[1])
        np.testing.assert_allclose(m.amplitudes, [0, 0, 0, 1], atol=1e-12)

    def test_target_in_controls(self):
        m = new_machine(2, 0)
        q = m.allocate(2)
        with pytest.raises(OverlappingRegisters):
            m.apply_controlled([q[0]], 'X', q[0])

    def test_repeated_control(self):
        m = new_machine(3, 0)
        q = m.allocate(3)
        with pytest.raises(OverlappingRegisters):
            m.apply_controlled([q[0], q[0]], 'X', q[1])


class TestPhase:

    def test_global_phase_pi_negates(self, rng):
        m, _ = loaded_machine(random_state(rng, 2))
        before = m.amplitudes.copy()
        m.apply_global_phase(math.pi)
        np.testing.assert_allclose(m.amplitudes, -before, atol=1e-12)

    def test_global_phase_zero(self, rng):
        m, _ = loaded_machine(random_state(rng, 2))
        before = m.amplitudes.copy()
        m.apply_global_phase(0)
        np.testing.assert_allclose(m.amplitudes, before)

    def test_controlled_phase_matches_diagonal(self, rng):
        amps = random_state(rng, 3)
        m, q = loaded_machine(amps)
        m.apply_global_phase(math.pi, controls=[q[0], q[2]], polarity=0b01)
        diagonal = np.array([-1 if (x & 1) and not (x >> 2) & 1 else 1 for x in range(8)])
        np.testing.assert_allclose(m.amplitudes, diagonal * amps, atol=1e-12)


class TestMeasurement:

    def test_basis_state(self):
        m = new_machine(1, 0)
        q = m.allocate(1)
        m.apply_x(q[0])
        assert m.measure(q) == 1
        assert m.free_qubits == (0,)
        np.testing.assert_allclose(m.amplitudes, [1, 0])

    def test_hadamard_frequency(self):
        m = new_machine(1, 2024)
        ones = 0
        for _ in range(10000):
            q = m.allocate(1)
            m.apply_h(q[0])
            ones += m.measure(q)
        assert 0.485 <= ones / 10000 <= 0.515

    def test_bell_support(self):
        for seed in range(20):
            m = new_machine(2, seed)
            q = m.allocate(2)
            m.apply_h(q[0])
            m.apply_controlled([q[0]], 'X', q[1])
            assert m.measure(q) in (0, 3)

    def test_collapse_then_remeasure(self):
        m = new_machine(2, 5)
        a, b = m.allocate(1), m.allocate(1)
        m.apply_h(a[0])
        m.apply_controlled([a[0]], 'X', b[0])
        first = m.measure(a)
        assert m.measure(b) == first

    def test_marginals_sum_to_one(self, rng):
        m, q = loaded_machine(random_state(rng, 4))
        assert abs(m.marginal_probabilities(q[:2]).sum() - 1) < 1e-12

    def test_measured_register_is_dead(self):
        m = new_machine(1, 0)
        q = m.allocate(1)
        m.measure(q)
        with pytest.raises(DeadQubit):
            m.measure(q)


class TestInvariants:

    def test_random_circuits_preserve_norm(self):
        rng = np.random.default_rng(99)
        for _ in range(1000):
            n = int(rng.integers(1, 11))
            m = Machine(n, 0)
            q = m.allocate(n)
            for _ in range(int(rng.integers(1, 51))):
                target = int(rng.integers(n))
                choice = int(rng.integers(6))
                gate = ['H', 'X', 'Y', 'Z', rotation('Y', float(rng.uniform(-4, 4))), 'CX'][choice]
                if gate == 'CX':
                    if n < 2:
                        continue
                    control = int((target + rng.integers(1, n)) % n)
                    m.apply_controlled([q[control]], 'X', q[target], polarity=int(rng.integers(2)))
                else:
                    m.apply_gate(gate, q[target])
                assert abs(m.state.norm() - 1) < 1e-12

    def test_inverse_round_trip(self, rng):
        m, q = loaded_machine(random_state(rng, 3))
        before = m.amplitudes.copy()
        gates = [('H', 0), (rotation('Y', 1.1), 1), ('Y', 2), (rotation('X', -0.4), 0), ('Z', 1)]
        for gate, target in gates:
            m.apply_gate(gate, q[target])
        for gate, target in reversed(gates):
            m.apply_gate(resolve_gate(gate).inverse(), q[target])
        np.testing.assert_allclose(m.amplitudes, before, atol=1e-12)

    def test_check_invariants_detects_dirty_free_qubit(self):
        m = new_machine(2, 0)
        m.allocate(1)
        m.state.amps[:] = [0, 0, 1, 0]
        with pytest.raises(InvariantViolation):
            m.check_invariants()

    def test_check_invariants_clean_state(self, rng):
        m, _ = loaded_machine(random_state(rng, 2), extra_qubits=1)
        m.check_invariants()
