import math
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from config import MAX_QUBITS
from .errors import InvalidM
from .machine import Machine, Register, Gate, rotation
from .uncompute import dup, forget_conditional

logger = logging.getLogger(__name__)


@dataclass
class SuperpositionPlan:
    """
    Разложение M для подготовки равномерной суперпозиции.

    Attributes:
        M (int): Число состояний.
        n (int): ⌈log₂M⌉ кубитов.
        bits (List[int]): Двоичные цифры M, младшая первой.
        locs (List[int]): Позиции единичных битов, старшая первой.
        k (int): Число единичных битов.
        m_running (int): Начальное значение накопителя M_m (младшая степень двойки в M).
    """
    M: int
    n: int
    bits: List[int]
    locs: List[int]
    k: int
    m_running: int

    @property
    def is_power_of_two(self) -> bool:
        return self.k == 1


def plan_for(M: int) -> SuperpositionPlan:
    if M < 2:
        raise InvalidM(f"M должно быть не меньше 2, получено {M}")
    n = (M - 1).bit_length()
    if n > MAX_QUBITS:
        raise InvalidM(f"M={M} требует {n} кубитов, максимум {MAX_QUBITS}")
    bits = [(M >> i) & 1 for i in range(M.bit_length())]
    locs = [i for i in reversed(range(len(bits))) if bits[i]]
    return SuperpositionPlan(M, n, bits, locs, len(locs), 1 << locs[-1])


class _Conditioner:
    """Применяет гейт к целям при нулевом управляющем кубите."""

    def __init__(self, m: Machine, with_forget: bool):
        self.m = m
        self.with_forget = with_forget

    def apply(self, control: int, gate: Gate, targets) -> None:
        if not self.with_forget:
            for t in targets:
                self.m.apply_controlled([control], gate, t, polarity=0)
            return
        # условие проверяется на копии, которая сразу же забывается
        copy = dup(self.m, [control])
        for t in targets:
            self.m.apply_controlled(copy, gate, t, polarity=0)
        forget_conditional(self.m, copy, [control])


def _prepare(m: Machine, M: int, with_forget: bool) -> Register:
    plan = plan_for(M)
    q = m.allocate(plan.n)
    if plan.is_power_of_two:
        for qubit in q:
            m.apply_h(qubit)
        return q

    cond = _Conditioner(m, with_forget)
    hadamard = 'H'
    locs = plan.locs[::-1]
    for loc in locs[1:]:
        m.apply_x(q[loc])
    for i in range(locs[0]):
        m.apply_h(q[i])

    mm = plan.m_running
    theta = -2 * math.acos(math.sqrt(mm / M))
    m.apply_rot_y(q[locs[1]], theta)
    cond.apply(q[locs[1]], hadamard, [q[i] for i in range(locs[0], locs[1])])

    for j in range(1, plan.k - 1):
        theta = -2 * math.acos(math.sqrt((1 << locs[j]) / (M - mm)))
        cond.apply(q[locs[j]], rotation('Y', theta), [q[locs[j + 1]]])
        cond.apply(q[locs[j + 1]], hadamard, [q[i] for i in range(locs[j], locs[j + 1])])
        mm += 1 << locs[j]

    logger.debug(f"Равномерная суперпозиция M={M}: {q}, M_m={mm}")
    return q


def prepare_uniform_m(m: Machine, M: int) -> Register:
    """
    Готовит (1/√M)·Σ_{j<M}|j⟩ на новом регистре из ⌈log₂M⌉ кубитов.

    Для M = 2ⁿ это H на каждом кубите. Иначе единицы M (кроме младшей)
    выставляются X, младший блок кубитов получает H, а затем для каждой
    следующей единицы поворот RY отщепляет нужную долю амплитуды и
    анти-управляемые H раскрывают блок.

    Args:
        m (Machine): Машина с ⌈log₂M⌉ свободными кубитами.
        M (int): Число состояний, M ≥ 2.

    Returns:
        Register: Регистр с подготовленным состоянием.
    """
    return _prepare(m, M, with_forget=False)


def prepare_uniform_m_with_forget(m: Machine, M: int) -> Register:
    """
    То же состояние, что prepare_uniform_m, но каждое условие проверяется на
    dup-копии управляющего кубита, которая освобождается через forget_conditional.

    Требует одного дополнительного свободного кубита.
    """
    return _prepare(m, M, with_forget=True)


def target_amplitudes(M: int, n: Optional[int] = None) -> np.ndarray:
    if n is None:
        n = (M - 1).bit_length()
    target = np.zeros(1 << n, dtype=complex)
    target[:M] = 1 / math.sqrt(M)
    return target


def max_deviation(amps: np.ndarray, M: int) -> float:
    """Максимальное поэлементное отклонение от целевого вектора с точностью до глобальной фазы."""
    amps = np.asarray(amps, dtype=complex)
    target = target_amplitudes(M, int(math.log2(len(amps))))
    overlap = np.vdot(target, amps)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1
    return float(np.max(np.abs(amps / phase - target)))


if __name__ == "__main__":
    # Тестовый код для проверки работы модуля
    logging.basicConfig(level=logging.DEBUG)

    for M in (3, 5, 6, 7, 11):
        plan = plan_for(M)
        machine = Machine(plan.n + 1, seed=0)
        register = prepare_uniform_m_with_forget(machine, M)
        amps = machine.register_amplitudes(register)
        print(f"M={M}: locs={plan.locs}, отклонение {max_deviation(amps, M):.2e}")
