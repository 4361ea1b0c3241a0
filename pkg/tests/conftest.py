import numpy as np
import pytest

from uncompute_sim.machine import Machine


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: долгие полные переборы (pytest -m \"not slow\" для быстрого прогона)")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_state(rng, n_qubits: int, support=None) -> np.ndarray:
    """Нормированный случайный вектор; вне support амплитуды нулевые."""
    size = 1 << n_qubits
    amps = np.zeros(size, dtype=complex)
    idx = np.arange(size) if support is None else np.asarray(support)
    amps[idx] = rng.normal(size=len(idx)) + 1j * rng.normal(size=len(idx))
    return amps / np.linalg.norm(amps)


def loaded_machine(amps: np.ndarray, extra_qubits: int = 0, seed: int = 0):
    """Машина, в которой первый регистр уже находится в состоянии amps."""
    n = int(np.log2(len(amps)))
    m = Machine(n + extra_qubits, seed)
    register = m.allocate(n)
    m.state.amps[:len(amps)] = amps
    return m, register


def undetermined_groups(indices, x_qubits) -> bool:
    """Перебором: есть ли конфигурация окружения с двумя разными значениями x."""
    mask = sum(1 << q for q in x_qubits)
    groups = {}
    for i in indices:
        i = int(i)
        groups.setdefault(i & ~mask, set()).add(i & mask)
    return any(len(values) > 1 for values in groups.values())
