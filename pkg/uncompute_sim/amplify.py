import math
import logging
from contextlib import ExitStack
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Callable, Iterable, List, Sequence, Tuple

import numpy as np

from .errors import ArityMismatch, InvalidArity, InvalidMarks
from .machine import Machine
from .uncompute import ancilla

logger = logging.getLogger(__name__)


class OracleMode(Enum):
    DIAGONAL = 'diagonal'
    ANCILLA = 'ancilla'


@dataclass(frozen=True)
class LoadStage:
    """
    Этап анкилльного оракула.

    В новую анкиллу ширины width загружается compute(x, *v), где v: значения,
    загруженные предыдущими этапами. Последний этап: однобитовый флаг, по
    которому меняется фаза.
    """
    width: int
    compute: Callable[..., int]
    name: str = ''


@dataclass(eq=False)
class Oracle:
    """
    Фазовый оракул U_F = I − 2P_f над регистром из arity кубитов.

    predicate задает помеченные базисные состояния. В режиме ANCILLA фаза
    меняется через цепочку загрузок в анкиллы (stages) с автоматическим
    развычислением; по умолчанию это один этап, вычисляющий сам predicate.
    """
    arity: int
    predicate: Callable[[int], bool]
    mode: OracleMode = OracleMode.DIAGONAL
    stages: Tuple[LoadStage, ...] = ()
    name: str = 'oracle'

    def __post_init__(self):
        if self.arity < 1:
            raise InvalidArity(f"Арность оракула должна быть положительной, получено {self.arity}")
        self.mode = OracleMode(self.mode)
        if not self.stages:
            predicate = self.predicate
            self.stages = (LoadStage(1, lambda x: int(bool(predicate(x))), 'flag'),)
        self.stages = tuple(self.stages)
        if self.stages[-1].width != 1:
            raise ValueError("Последний этап оракула должен загружать один бит")

    @cached_property
    def marked(self) -> np.ndarray:
        return np.array([bool(self.predicate(x)) for x in range(1 << self.arity)], dtype=bool)

    @property
    def marks(self) -> List[int]:
        return [int(x) for x in np.flatnonzero(self.marked)]

    @cached_property
    def stage_tables(self) -> List[np.ndarray]:
        """
        Таблицы загрузки для xor_load каждого этапа.

        Заполняются только адреса, согласованные с предыдущими загрузками;
        остальные адреса в ходе оракула имеют нулевую амплитуду.
        """
        tables = []
        address_width = self.arity
        for stage in self.stages:
            tables.append(np.zeros(1 << address_width, dtype=np.int64))
            address_width += stage.width

        for x in range(1 << self.arity):
            loaded = []
            address = x
            shift = self.arity
            for stage, table in zip(self.stages, tables):
                value = int(stage.compute(x, *loaded))
                if not 0 <= value < 1 << stage.width:
                    raise ValueError(f"Этап {stage.name or '?'}: значение {value} для x={x} "
                                     f"не помещается в {stage.width} бит")
                table[address] = value
                loaded.append(value)
                address |= value << shift
                shift += stage.width
        return tables


def oracle_from_marks(arity: int, marks: Iterable[int], mode: OracleMode = OracleMode.DIAGONAL) -> Oracle:
    marked = frozenset(int(x) for x in marks)
    return Oracle(arity, lambda x: x in marked, mode, name=f"marks{sorted(marked)}")


def prepare_uniform(m: Machine, register: Sequence) -> None:
    """H^⊗n на регистре из |0⟩ⁿ."""
    for q in m.check_qubits(register):
        m.apply_h(q)


def _apply_with_ancillas(m: Machine, oracle: Oracle, qubits: Tuple[int, ...]) -> None:
    with ExitStack() as stack:
        address = list(qubits)
        for stage, table in zip(oracle.stages, oracle.stage_tables):
            work = stack.enter_context(ancilla(m, stage.width))
            m.xor_load(address, work, table)
            address.extend(work)
        m.apply_z(address[-1])


def apply_oracle(m: Machine, oracle: Oracle, register: Sequence) -> None:
    """
    Меняет знак амплитуд помеченных состояний и увеличивает счетчик запросов на 1.

    Args:
        m (Machine): Машина.
        oracle (Oracle): Оракул.
        register (Sequence): Регистр ширины oracle.arity.
    """
    qubits = m.check_qubits(register)
    if len(qubits) != oracle.arity:
        raise ArityMismatch(f"Оракул арности {oracle.arity} применен к регистру ширины {len(qubits)}")
    m.query_count += 1
    if oracle.mode is OracleMode.DIAGONAL:
        m.apply_phase_flip(qubits, oracle.marked)
    else:
        _apply_with_ancillas(m, oracle, qubits)


def apply_diffusion(m: Machine, register: Sequence) -> None:
    """Отражение 2|ψ⟩⟨ψ| − I относительно равномерной суперпозиции."""
    qubits = m.check_qubits(register)
    for q in qubits:
        m.apply_h(q)
    nonzero = np.ones(1 << len(qubits), dtype=bool)
    nonzero[0] = False
    m.apply_phase_flip(qubits, nonzero)
    for q in qubits:
        m.apply_h(q)


def grover_iterations(n_states: int, marks: int) -> int:
    """
    Число итераций Гровера floor(π/4·√(N/t)).

    Args:
        n_states (int): Размер пространства поиска N.
        marks (int): Число помеченных состояний t, 1 ≤ t ≤ N.

    Returns:
        int: Число итераций.
    """
    if n_states < 1:
        raise InvalidMarks(f"Размер пространства поиска должен быть положительным, получено {n_states}")
    if not 1 <= marks <= n_states:
        raise InvalidMarks(f"Число меток {marks} вне диапазона [1, {n_states}]")
    return int(math.floor(math.pi / 4 * math.sqrt(n_states / marks)))


def success_probability(n_states: int, marks: int, iterations: int) -> float:
    """Вероятность измерить помеченное состояние: sin²((2j+1)·arcsin√(t/N))."""
    return math.sin((2 * iterations + 1) * math.asin(math.sqrt(marks / n_states))) ** 2


def amplify(m: Machine, oracle: Oracle, register: Sequence, iterations: int) -> None:
    for _ in range(iterations):
        apply_oracle(m, oracle, register)
        apply_diffusion(m, register)


def marked_probability(m: Machine, oracle: Oracle, register: Sequence) -> float:
    probs = m.marginal_probabilities(register)
    return float(probs[oracle.marked].sum())


def grover(m: Machine, oracle: Oracle, marks: int) -> int:
    """
    Поиск Гровера с известным числом меток.

    Args:
        m (Machine): Машина со свободными кубитами для регистра и анкилл оракула.
        oracle (Oracle): Оракул.
        marks (int): Число помеченных состояний t (для неизвестного t передавать 1).

    Returns:
        int: Измеренный индекс.
    """
    register = m.allocate(oracle.arity)
    prepare_uniform(m, register)
    iterations = grover_iterations(1 << oracle.arity, marks)
    amplify(m, oracle, register, iterations)
    outcome = m.measure(register)
    logger.debug(f"grover({oracle.name}, t={marks}): {iterations} итераций, результат {outcome}")
    return outcome
