import logging
from contextlib import contextmanager
from typing import Callable, Iterator, List, Sequence, Tuple, Union

import numpy as np

from .errors import ForgetMismatch, ForgetUndetermined, NotQfree, InvalidExpectedValue, OverlappingRegisters
from .machine import Machine, Register, GateKind, gather_bits, scatter_bits

logger = logging.getLogger(__name__)


def dup(m: Machine, src: Sequence) -> Register:
    """
    Копирует значение регистра в базисе: Σα_x|x⟩|0⟩ → Σα_x|x⟩|x⟩.

    Это запутывающая копия (веер CNOT), а не клонирование состояния.

    Args:
        m (Machine): Машина.
        src (Sequence): Живые кубиты источника.

    Returns:
        Register: Новый регистр той же ширины.
    """
    qubits = m.check_qubits(src)
    copy = m.allocate(len(qubits))
    for s, d in zip(qubits, copy):
        m.apply_controlled([s], 'X', d)
    return copy


def _discard(m: Machine, x: Register, support: np.ndarray) -> None:
    # амплитуды ниже допуска обнуляются, чтобы не сложиться с соседними ветвями
    amps = m.state.amps
    dust = np.ones(len(amps), dtype=bool)
    dust[support] = False
    amps[dust] = 0
    m.clear_bits(x.qubits)
    m.state.amps /= np.linalg.norm(m.state.amps)
    m.release(x)


def forget_conditional(m: Machine, x: Register, expected: Union[int, Sequence]) -> None:
    """
    Забывает регистр x, если он равен expected во всех ветвях суперпозиции.

    Args:
        m (Machine): Машина.
        x (Register): Забываемый регистр.
        expected (Union[int, Sequence]): Классическое значение или кубиты
            другого регистра той же ширины.

    Raises:
        ForgetMismatch: Какое-то базисное состояние с ненулевой амплитудой нарушает равенство.
    """
    m.check_register(x)
    support = m.support()
    x_values = x.values(support)
    if isinstance(expected, (int, np.integer)):
        if not 0 <= expected < 1 << x.width:
            raise InvalidExpectedValue(f"Значение {expected} не помещается в {x.width} бит")
        expected_values = np.full_like(x_values, int(expected))
        source = f"значению {expected}"
    else:
        partner = m.check_qubits(expected)
        if len(partner) != x.width:
            raise InvalidExpectedValue(f"Ширина {len(partner)} не совпадает с шириной {x}")
        if set(partner) & set(x.qubits):
            raise OverlappingRegisters(f"{x} пересекается с {list(partner)}")
        expected_values = gather_bits(support, partner)
        source = f"кубитам {list(partner)}"

    bad = np.flatnonzero(x_values != expected_values)
    if len(bad):
        witness = int(support[bad[0]])
        value = int(x_values[bad[0]])
        raise ForgetMismatch(
            f"{x} не равен {source}: базисное состояние {witness} содержит x={value}",
            witness=witness, value=value,
        )
    _discard(m, x, support)
    logger.debug(f"forget({x}) по {source}")


def forget_unconditional(m: Machine, x: Register) -> None:
    """
    Забывает регистр x, если его значение определяется остальными кубитами.

    Строже, чем forget(x) в Silq: ветви группируются по битам вне x, и в каждой
    группе должно быть ровно одно значение x. Иначе удаление было бы неявным
    измерением.

    Raises:
        ForgetUndetermined: Есть конфигурация окружения с двумя значениями x.
    """
    m.check_register(x)
    support = m.support()
    x_values = x.values(support)
    env = support & ~x.mask
    pairs = np.unique(np.stack([env, x_values], axis=1), axis=0)
    repeated = np.flatnonzero(pairs[1:, 0] == pairs[:-1, 0])
    if len(repeated):
        i = repeated[0]
        env_bits, a, b = pairs[i, 0], pairs[i, 1], pairs[i + 1, 1]
        first, second = (int(env_bits | bits) for bits in scatter_bits(np.array([a, b]), x.qubits))
        raise ForgetUndetermined(
            f"{x} не определяется окружением: состояния {first} и {second} отличаются только в x",
            witnesses=(first, second),
        )
    _discard(m, x, support)
    logger.debug(f"forget({x}) без условия")


class AncillaTape:
    """
    Запись операций, которые тело блока with ancilla(...) применило к анкилле.

    Разрешены только перестановки базиса (X, управляемый X, загрузка значений)
    и диагональные гейты; гейт, создающий суперпозицию на анкилле, отклоняется
    до применения.
    """

    def __init__(self, register: Register):
        self.register = register
        self._qubits = frozenset(register.qubits)
        self._undo: List[Tuple[str, Callable[[], None]]] = []

    def __len__(self) -> int:
        return len(self._undo)

    def observe(self, touched: Tuple[int, ...], kind: GateKind, label: str,
                undo: Callable[[], None]) -> None:
        if self._qubits.isdisjoint(touched):
            return
        if kind is GateKind.SUPERPOSING:
            raise NotQfree(f"Гейт {label} создает суперпозицию на анкилле {self.register}")
        if kind is GateKind.PERMUTATION:
            self._undo.append((label, undo))

    def rewind(self) -> None:
        while self._undo:
            _, undo = self._undo.pop()
            undo()


@contextmanager
def ancilla(m: Machine, width: int) -> Iterator[Register]:
    """
    Выделяет анкиллу и автоматически развычисляет ее при выходе из блока.

    При выходе записанные перестановки применяются в обратном порядке, после
    чего анкилла забывается условно (должна вернуться в |0⟩).
    """
    register = m.allocate(width)
    tape = AncillaTape(register)
    m.add_watcher(tape)
    try:
        yield register
    except BaseException:
        m.remove_watcher(tape)
        tape.rewind()
        try:
            forget_conditional(m, register, 0)
        except ForgetMismatch as e:
            logger.warning(f"Анкилла {register} не освобождена после ошибки: {e}")
        raise
    m.remove_watcher(tape)
    logger.debug(f"Развычисление {len(tape)} операций над {register}")
    tape.rewind()
    forget_conditional(m, register, 0)


def with_ancilla(m: Machine, width: int, body: Callable[[Register], None]) -> None:
    with ancilla(m, width) as register:
        body(register)
