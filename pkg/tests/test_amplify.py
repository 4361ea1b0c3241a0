import itertools
import math

import numpy as np
import pytest

from uncompute_sim.amplify import (
    Oracle, OracleMode, amplify, apply_diffusion, apply_oracle, grover, grover_iterations, marked_probability,
    oracle_from_marks, prepare_uniform, success_probability,
)
from uncompute_sim.errors import ArityMismatch, InvalidMarks
from uncompute_sim.machine import new_machine
from tests.conftest import random_state, loaded_machine


def phase_fixed(a, b):
    """Сравнение с точностью до глобальной фазы."""
    overlap = np.vdot(a, b)
    return b * (abs(overlap) / overlap) if abs(overlap) > 0 else b


class TestPrepareUniform:

    @pytest.mark.parametrize('n', [1, 3])
    def test_uniform(self, n):
        m = new_machine(n, 0)
        q = m.allocate(n)
        prepare_uniform(m, q)
        np.testing.assert_allclose(m.amplitudes, np.full(1 << n, 1 / math.sqrt(1 << n)), atol=1e-12)

    def test_twice_returns_to_zero(self):
        m = new_machine(3, 0)
        q = m.allocate(3)
        prepare_uniform(m, q)
        prepare_uniform(m, q)
        assert abs(m.amplitudes[0] - 1) < 1e-12


class TestOracle:

    def test_single_mark(self):
        m = new_machine(2, 0)
        q = m.allocate(2)
        prepare_uniform(m, q)
        apply_oracle(m, oracle_from_marks(2, [2]), q)
        np.testing.assert_allclose(m.amplitudes, [0.5, 0.5, -0.5, 0.5], atol=1e-12)
        assert m.query_count == 1

    @pytest.mark.parametrize('mode', list(OracleMode))
    def test_involution(self, rng, mode):
        amps = random_state(rng, 3)
        m, q = loaded_machine(amps, extra_qubits=1)
        oracle = oracle_from_marks(3, [0, 5, 6], mode)
        apply_oracle(m, oracle, q)
        apply_oracle(m, oracle, q)
        np.testing.assert_allclose(m.amplitudes[:8], amps, atol=1e-12)
        assert m.query_count == 2

    def test_arity_mismatch(self):
        m = new_machine(3, 0)
        q = m.allocate(3)
        with pytest.raises(ArityMismatch):
            apply_oracle(m, oracle_from_marks(2, [1]), q)

    def test_marks(self):
        oracle = Oracle(3, lambda x: x % 3 == 0)
        assert oracle.marks == [0, 3, 6]

    def test_last_stage_must_be_flag(self):
        from uncompute_sim.amplify import LoadStage
        with pytest.raises(ValueError):
            Oracle(2, lambda x: True, OracleMode.ANCILLA, (LoadStage(2, lambda x: x),))

    def test_ancilla_matches_diagonal_random_states(self, rng):
        for _ in range(20):
            amps = random_state(rng, 3)
            marks = [x for x in range(8) if rng.random() < 0.5]
            results = []
            for mode in OracleMode:
                m, q = loaded_machine(amps, extra_qubits=1)
                apply_oracle(m, oracle_from_marks(3, marks, mode), q)
                results.append(m.amplitudes[:8].copy())
            np.testing.assert_allclose(results[0], results[1], atol=1e-12)

    @pytest.mark.parametrize('arity', [1, 2, 3])
    def test_ancilla_matches_diagonal_exhaustive(self, arity):
        rng = np.random.default_rng(arity)
        amps = random_state(rng, arity)
        for bits in itertools.product([0, 1], repeat=1 << arity):
            marks = [x for x, bit in enumerate(bits) if bit]
            diagonal = np.where(np.array(bits, dtype=bool), -amps, amps)
            m, q = loaded_machine(amps, extra_qubits=1)
            apply_oracle(m, oracle_from_marks(arity, marks, OracleMode.ANCILLA), q)
            np.testing.assert_allclose(m.amplitudes[:1 << arity], diagonal, atol=1e-12)
            assert m.free_qubits == (arity,)

    @pytest.mark.slow
    def test_ancilla_matches_diagonal_arity_four(self):
        rng = np.random.default_rng(4)
        amps = random_state(rng, 4)
        m, q = loaded_machine(amps, extra_qubits=1)
        for bits in itertools.product([0, 1], repeat=16):
            marked = np.array(bits, dtype=bool)
            m.state.amps[:] = 0
            m.state.amps[:16] = amps
            apply_oracle(m, oracle_from_marks(4, np.flatnonzero(marked), OracleMode.ANCILLA), q)
            np.testing.assert_allclose(m.amplitudes[:16], np.where(marked, -amps, amps), atol=1e-12)
        assert m.free_qubits == (4,)


class TestDiffusion:

    def test_uniform_is_fixed(self):
        m = new_machine(3, 0)
        q = m.allocate(3)
        prepare_uniform(m, q)
        before = m.amplitudes.copy()
        apply_diffusion(m, q)
        np.testing.assert_allclose(phase_fixed(before, m.amplitudes), before, atol=1e-12)

    def test_zero_state(self):
        m = new_machine(2, 0)
        q = m.allocate(2)
        apply_diffusion(m, q)
        expected = np.array([-0.5, 0.5, 0.5, 0.5])
        np.testing.assert_allclose(phase_fixed(expected, m.amplitudes), expected, atol=1e-12)

    def test_involution(self, rng):
        amps = random_state(rng, 3)
        m, q = loaded_machine(amps)
        apply_diffusion(m, q)
        apply_diffusion(m, q)
        np.testing.assert_allclose(m.amplitudes, amps, atol=1e-12)


class TestGroverIterations:

    @pytest.mark.parametrize('n_states, marks, expected', [(4, 1, 1), (16, 1, 3), (16, 4, 1), (16, 16, 0)])
    def test_formula(self, n_states, marks, expected):
        assert grover_iterations(n_states, marks) == expected

    @pytest.mark.parametrize('marks', [0, 17])
    def test_invalid_marks(self, marks):
        with pytest.raises(InvalidMarks):
            grover_iterations(16, marks)


class TestGrover:

    def test_exact_two_qubit_search(self):
        for seed in range(10):
            m = new_machine(2, seed)
            assert grover(m, oracle_from_marks(2, [3]), 1) == 3
            assert m.query_count == 1

    def test_four_qubit_probability(self):
        m = new_machine(4, 0)
        q = m.allocate(4)
        oracle = oracle_from_marks(4, [11])
        prepare_uniform(m, q)
        amplify(m, oracle, q, grover_iterations(16, 1))
        p = marked_probability(m, oracle, q)
        assert abs(p - math.sin(7 * math.asin(0.25)) ** 2) < 1e-9
        assert abs(p - 0.9613) < 1e-4

    def test_all_marked_is_uniform(self):
        counts = np.zeros(4)
        for seed in range(400):
            m = new_machine(2, seed)
            counts[grover(m, oracle_from_marks(2, range(4)), 4)] += 1
            assert m.query_count == 0
        assert np.all(counts > 60)

    def test_query_count_equals_iterations(self):
        m = new_machine(5, 3)
        grover(m, oracle_from_marks(5, [1, 9]), 2)
        assert m.query_count == grover_iterations(32, 2)

    def test_ancilla_mode_search(self):
        hits = 0
        for seed in range(40):
            m = new_machine(4, seed)
            hits += grover(m, oracle_from_marks(3, [6], OracleMode.ANCILLA), 1) == 6
            assert m.query_count == grover_iterations(8, 1)
            assert m.free_qubits == (0, 1, 2, 3)
        assert hits >= 32

    def test_marked_probability_matches_closed_form(self):
        rng = np.random.default_rng(11)
        for n_states in (4, 8, 16, 32):
            n = int(math.log2(n_states))
            for marks in (1, 2, 4):
                placement = rng.choice(n_states, size=marks, replace=False)
                oracle = oracle_from_marks(n, placement)
                for iterations in range(6):
                    m = new_machine(n, 0)
                    q = m.allocate(n)
                    prepare_uniform(m, q)
                    amplify(m, oracle, q, iterations)
                    expected = success_probability(n_states, marks, iterations)
                    assert abs(marked_probability(m, oracle, q) - expected) < 1e-9

    def test_single_iteration_four_states_is_certain(self):
        m = new_machine(2, 0)
        q = m.allocate(2)
        oracle = oracle_from_marks(2, [1])
        prepare_uniform(m, q)
        amplify(m, oracle, q, 1)
        assert abs(marked_probability(m, oracle, q) - 1.0) < 1e-12
