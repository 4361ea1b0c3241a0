import math
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Protocol, Tuple, Union

import numpy as np

from config import MAX_QUBITS, AMPLITUDE_TOLERANCE, NORM_TOLERANCE, STRICT_CHECKS
from .errors import (
    CapacityExceeded, OutOfQubits, InvalidArity, DeadQubit, NonFiniteAngle,
    OverlappingRegisters, ArityMismatch, InvariantViolation,
)

logger = logging.getLogger(__name__)

SQRT1_2 = 1 / math.sqrt(2)


class GateKind(Enum):
    """Как гейт действует на вычислительный базис."""
    PERMUTATION = 'permutation'  # переставляет базисные состояния (возможно, с фазой)
    DIAGONAL = 'diagonal'
    SUPERPOSING = 'superposing'


@dataclass(frozen=True, eq=False)
class Gate:
    name: str
    matrix: np.ndarray
    kind: GateKind
    theta: Optional[float] = None

    def inverse(self) -> 'Gate':
        theta = -self.theta if self.theta is not None else None
        return Gate(self.name, self.matrix.conj().T, self.kind, theta)

    def __repr__(self) -> str:
        if self.theta is None:
            return f"Gate({self.name})"
        return f"Gate({self.name}, θ={self.theta:.6g})"


HADAMARD = Gate('H', np.array([[SQRT1_2, SQRT1_2], [SQRT1_2, -SQRT1_2]], dtype=complex), GateKind.SUPERPOSING)
PAULI_X = Gate('X', np.array([[0, 1], [1, 0]], dtype=complex), GateKind.PERMUTATION)
PAULI_Y = Gate('Y', np.array([[0, -1j], [1j, 0]], dtype=complex), GateKind.PERMUTATION)
PAULI_Z = Gate('Z', np.array([[1, 0], [0, -1]], dtype=complex), GateKind.DIAGONAL)

FIXED_GATES = {'H': HADAMARD, 'X': PAULI_X, 'Y': PAULI_Y, 'Z': PAULI_Z}


def _rotation_kind(theta: float) -> GateKind:
    # R(0) и R(2π) диагональны, R(π) переставляет |0⟩ и |1⟩
    half_turns = theta / math.pi
    nearest = round(half_turns)
    if abs(half_turns - nearest) > 1e-12:
        return GateKind.SUPERPOSING
    return GateKind.DIAGONAL if nearest % 2 == 0 else GateKind.PERMUTATION


def rotation(axis: str, theta: float) -> Gate:
    """
    Строит гейт поворота вокруг оси X, Y или Z.

    Args:
        axis (str): 'X', 'Y' или 'Z'.
        theta (float): Угол в радианах.

    Returns:
        Gate: Гейт RX/RY/RZ.
    """
    if not math.isfinite(theta):
        raise NonFiniteAngle(f"Угол поворота должен быть конечным, получено {theta}")
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    axis = axis.upper()
    if axis == 'X':
        matrix = np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
        kind = _rotation_kind(theta)
    elif axis == 'Y':
        matrix = np.array([[c, -s], [s, c]], dtype=complex)
        kind = _rotation_kind(theta)
    elif axis == 'Z':
        matrix = np.array([[complex(c, -s), 0], [0, complex(c, s)]], dtype=complex)
        kind = GateKind.DIAGONAL
    else:
        raise ValueError(f"Неизвестная ось поворота: {axis}")
    return Gate(f"R{axis}", matrix, kind, theta)


def resolve_gate(gate: Union[str, Gate]) -> Gate:
    if isinstance(gate, Gate):
        return gate
    try:
        return FIXED_GATES[gate.upper()]
    except KeyError:
        raise ValueError(f"Неизвестный гейт: {gate}") from None


# Битовые операции над массивами базисных индексов

def qubit_mask(qubits: Sequence) -> int:
    mask = 0
    for q in qubits:
        mask |= 1 << q
    return mask


def gather_bits(indices: np.ndarray, qubits: Sequence) -> np.ndarray:
    """Значение регистра (бит 0 младший) для каждого базисного индекса."""
    values = np.zeros_like(indices)
    for i, q in enumerate(qubits):
        values |= ((indices >> q) & 1) << i
    return values


def scatter_bits(values: np.ndarray, qubits: Sequence) -> np.ndarray:
    """Обратная к gather_bits: раскладывает биты значений по позициям кубитов."""
    values = np.asarray(values, dtype=np.int64)
    out = np.zeros_like(values)
    for i, q in enumerate(qubits):
        out |= ((values >> i) & 1) << q
    return out


@dataclass(frozen=True, eq=False)
class Register(Sequence):
    """
    Упорядоченный набор кубитов, рассматриваемый как беззнаковое целое.

    Кубит qubits[0] соответствует младшему биту. Равенство регистров
    определяется идентичностью объекта: после измерения или forget регистр
    считается мертвым, даже если его кубиты выделены заново.
    """
    qubits: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.qubits)

    def __getitem__(self, item):
        return self.qubits[item]

    @property
    def width(self) -> int:
        return len(self.qubits)

    @property
    def mask(self) -> int:
        return qubit_mask(self.qubits)

    def values(self, indices: np.ndarray) -> np.ndarray:
        return gather_bits(indices, self.qubits)

    def __repr__(self) -> str:
        return f"Register{list(self.qubits)}"


@dataclass
class StateVector:
    n_qubits: int
    amps: np.ndarray

    @classmethod
    def zero(cls, n_qubits: int) -> 'StateVector':
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    def __len__(self) -> int:
        return len(self.amps)

    def norm(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2


class GateWatcher(Protocol):
    """Наблюдатель за гейтами машины (см. uncompute.AncillaTape)."""

    def observe(self, touched: Tuple[int, ...], kind: GateKind, label: str,
                undo: Callable[[], None]) -> None:
        ...


class Machine:
    """
    Плотный симулятор вектора состояния с распределителем кубитов.

    Все кубиты изначально свободны и находятся в |0⟩. Вся случайность
    (измерения, классические розыгрыши алгоритмов) идет через self.rng,
    инициализированный явным seed. Машина не потокобезопасна: одна машина
    на один поток.
    """

    def __init__(self, n_qubits: int, seed: int = 0):
        if n_qubits < 0:
            raise InvalidArity(f"Число кубитов не может быть отрицательным: {n_qubits}")
        if n_qubits > MAX_QUBITS:
            raise CapacityExceeded(f"Запрошено {n_qubits} кубитов, максимум {MAX_QUBITS}")
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.state = StateVector.zero(n_qubits)
        self.query_count = 0
        self._free: List[int] = list(range(n_qubits))
        self._owner: Dict[int, Register] = {}
        self._registers: Dict[Register, None] = {}
        self._watchers: List[GateWatcher] = []
        self._indices: Optional[np.ndarray] = None
        logger.debug(f"Создана машина: {n_qubits} кубитов, seed={seed}")

    def __repr__(self) -> str:
        return (f"Machine(n_qubits={self.n_qubits}, live={list(self._registers)}, "
                f"free={self._free}, queries={self.query_count})")

    @property
    def n_qubits(self) -> int:
        return self.state.n_qubits

    @property
    def amplitudes(self) -> np.ndarray:
        return self.state.amps

    @property
    def free_qubits(self) -> Tuple[int, ...]:
        return tuple(self._free)

    @property
    def indices(self) -> np.ndarray:
        if self._indices is None:
            self._indices = np.arange(1 << self.n_qubits, dtype=np.int64)
        return self._indices

    # Распределение кубитов

    def allocate(self, k: int) -> Register:
        """
        Выделяет регистр из k свободных кубитов в состоянии |0⟩.

        Args:
            k (int): Ширина регистра.

        Returns:
            Register: Новый живой регистр.
        """
        if k < 1:
            raise InvalidArity(f"Ширина регистра должна быть положительной, получено {k}")
        if len(self._free) < k:
            raise OutOfQubits(f"Запрошено {k} кубитов, свободно {len(self._free)}")
        qubits = tuple(self._free[:k])
        del self._free[:k]
        register = Register(qubits)
        self._registers[register] = None
        for q in qubits:
            self._owner[q] = register
        logger.debug(f"Выделен {register}")
        return register

    def release(self, register: Register) -> None:
        """Возвращает кубиты регистра в пул. Вызывающий гарантирует, что они в |0⟩."""
        self.check_register(register)
        del self._registers[register]
        for q in register.qubits:
            del self._owner[q]
        self._free.extend(register.qubits)
        self._free.sort()
        logger.debug(f"Освобожден {register}")

    def is_live(self, register: Register) -> bool:
        return register in self._registers

    def check_register(self, register: Register) -> None:
        if register not in self._registers:
            raise DeadQubit(f"{register} не является живым регистром этой машины")

    def check_qubits(self, qubits: Sequence) -> Tuple[int, ...]:
        qubits = tuple(qubits)
        for q in qubits:
            if q not in self._owner:
                raise DeadQubit(f"Кубит {q} не выделен")
        if len(set(qubits)) != len(qubits):
            raise OverlappingRegisters(f"Кубиты повторяются: {qubits}")
        return qubits

    # Наблюдатели

    def add_watcher(self, watcher: GateWatcher) -> None:
        self._watchers.append(watcher)

    def remove_watcher(self, watcher: GateWatcher) -> None:
        self._watchers.remove(watcher)

    def _notify(self, touched: Tuple[int, ...], kind: GateKind, label: str,
                undo: Callable[[], None]) -> None:
        for watcher in list(self._watchers):
            watcher.observe(touched, kind, label, undo)

    # Ядра

    def _apply_matrix(self, matrix: np.ndarray, target: int, mask: Optional[np.ndarray] = None) -> None:
        amps = self.state.amps
        if mask is None:
            # шаг 2^target: средняя ось отвечает биту target
            view = amps.reshape(-1, 2, 1 << target)
            a0 = view[:, 0, :].copy()
            a1 = view[:, 1, :].copy()
            view[:, 0, :] = matrix[0, 0] * a0 + matrix[0, 1] * a1
            view[:, 1, :] = matrix[1, 0] * a0 + matrix[1, 1] * a1
        else:
            idx = self.indices
            idx0 = idx[mask & (((idx >> target) & 1) == 0)]
            idx1 = idx0 | (1 << target)
            a0 = amps[idx0]
            a1 = amps[idx1]
            amps[idx0] = matrix[0, 0] * a0 + matrix[0, 1] * a1
            amps[idx1] = matrix[1, 0] * a0 + matrix[1, 1] * a1

    def _control_mask(self, controls: Tuple[int, ...], polarity: int) -> np.ndarray:
        idx = self.indices
        mask = np.ones(len(idx), dtype=bool)
        for i, c in enumerate(controls):
            mask &= ((idx >> c) & 1) == ((polarity >> i) & 1)
        return mask

    def _after_operation(self) -> None:
        if STRICT_CHECKS:
            self.check_invariants()

    # Гейты

    def apply_gate(self, gate: Union[str, Gate], target: int) -> None:
        gate = resolve_gate(gate)
        self.check_qubits((target,))
        self._notify((target,), gate.kind, gate.name,
                     lambda: self.apply_gate(gate.inverse(), target))
        self._apply_matrix(gate.matrix, target)
        self._after_operation()

    def apply_h(self, q: int) -> None:
        self.apply_gate(HADAMARD, q)

    def apply_x(self, q: int) -> None:
        self.apply_gate(PAULI_X, q)

    def apply_y(self, q: int) -> None:
        self.apply_gate(PAULI_Y, q)

    def apply_z(self, q: int) -> None:
        self.apply_gate(PAULI_Z, q)

    def apply_rot_x(self, q: int, theta: float) -> None:
        self.check_qubits((q,))
        self.apply_gate(rotation('X', theta), q)

    def apply_rot_y(self, q: int, theta: float) -> None:
        self.check_qubits((q,))
        self.apply_gate(rotation('Y', theta), q)

    def apply_rot_z(self, q: int, theta: float) -> None:
        self.check_qubits((q,))
        self.apply_gate(rotation('Z', theta), q)

    def apply_controlled(self, controls: Sequence, gate: Union[str, Gate], target: int,
                         polarity: Optional[int] = None) -> None:
        """
        Применяет гейт к target на базисных состояниях, где controls совпадают с polarity.

        Args:
            controls (Sequence): Управляющие кубиты (Register или список индексов).
            gate (Union[str, Gate]): 'H', 'X', 'Y', 'Z' или Gate (например, rotation('Y', θ)).
            target (int): Целевой кубит.
            polarity (Optional[int]): Битовый шаблон; бит i относится к controls[i].
                По умолчанию все единицы; 0 означает анти-управление.
        """
        gate = resolve_gate(gate)
        controls = tuple(controls)
        if target in controls:
            raise OverlappingRegisters(f"Целевой кубит {target} входит в управляющие {controls}")
        self.check_qubits(controls + (target,))
        if polarity is None:
            polarity = (1 << len(controls)) - 1
        if not 0 <= polarity < 1 << len(controls):
            raise ValueError(f"Полярность {polarity} не помещается в {len(controls)} управляющих кубитов")
        mask = self._control_mask(controls, polarity)
        self._notify((target,), gate.kind, f"C{gate.name}",
                     lambda: self.apply_controlled(controls, gate.inverse(), target, polarity))
        self._apply_matrix(gate.matrix, target, mask)
        self._after_operation()

    def apply_global_phase(self, r: float, controls: Sequence = (), polarity: Optional[int] = None) -> None:
        """
        Умножает амплитуды на e^{ir}; с controls только там, где они совпадают с polarity.
        """
        if not math.isfinite(r):
            raise NonFiniteAngle(f"Фаза должна быть конечной, получено {r}")
        factor = complex(math.cos(r), math.sin(r))
        controls = self.check_qubits(controls)
        if not controls:
            self.state.amps *= factor
        else:
            if polarity is None:
                polarity = (1 << len(controls)) - 1
            mask = self._control_mask(controls, polarity)
            self.state.amps[mask] *= factor
        self._after_operation()

    def apply_phase_flip(self, register: Sequence, table: np.ndarray) -> None:
        """Меняет знак амплитуд, у которых table[значение регистра] истинно."""
        qubits = self.check_qubits(register)
        table = np.asarray(table, dtype=bool)
        if len(table) != 1 << len(qubits):
            raise ArityMismatch(f"Таблица длины {len(table)} не подходит регистру ширины {len(qubits)}")
        flip = table[gather_bits(self.indices, qubits)]
        self.state.amps[flip] *= -1
        self._after_operation()

    def xor_load(self, src: Sequence, dst: Sequence, table: np.ndarray) -> None:
        """
        Классическая загрузка |s⟩|d⟩ → |s⟩|d ⊕ table[s]⟩.

        Перестановка базиса, обратная самой себе.

        Args:
            src (Sequence): Кубиты адреса.
            dst (Sequence): Кубиты, в которые загружается значение.
            table (np.ndarray): Значения для каждого адреса, длина 2^len(src).
        """
        src = tuple(src)
        dst = tuple(dst)
        if set(src) & set(dst):
            raise OverlappingRegisters(f"Адрес {src} и приемник {dst} пересекаются")
        self.check_qubits(src + dst)
        table = np.asarray(table, dtype=np.int64)
        if len(table) != 1 << len(src):
            raise ArityMismatch(f"Таблица длины {len(table)} не подходит адресу ширины {len(src)}")
        if np.any(table < 0) or np.any(table >> len(dst)):
            raise ValueError(f"Значения таблицы не помещаются в {len(dst)} бит")
        self._notify(dst, GateKind.PERMUTATION, 'LOAD', lambda: self.xor_load(src, dst, table))
        idx = self.indices
        delta = table[gather_bits(idx, src)]
        target = idx ^ scatter_bits(delta, dst)
        old = self.state.amps.copy()
        self.state.amps[target] = old
        self._after_operation()

    # Измерение и сброс

    def marginal_probabilities(self, register: Sequence) -> np.ndarray:
        """Распределение P(v) значений регистра."""
        qubits = self.check_qubits(register)
        values = gather_bits(self.indices, qubits)
        probs = np.bincount(values, weights=self.state.probabilities(), minlength=1 << len(qubits))
        return probs / probs.sum()

    def register_amplitudes(self, register: Sequence) -> np.ndarray:
        """Амплитуды состояний регистра при нулевых остальных кубитах."""
        qubits = self.check_qubits(register)
        return self.state.amps[scatter_bits(np.arange(1 << len(qubits)), qubits)].copy()

    def clear_bits(self, qubits: Sequence) -> None:
        """
        Переносит амплитуду каждого базисного состояния на состояние с нулевыми битами qubits.

        Корректно, только если значение этих битов определяется остальными
        кубитами (иначе ветви складываются). Проверку делает вызывающий.
        """
        mask = qubit_mask(qubits)
        amps = self.state.amps
        support = np.flatnonzero(amps)
        cleared = np.zeros_like(amps)
        np.add.at(cleared, support & ~mask, amps[support])
        self.state.amps = cleared

    def measure(self, register: Register) -> int:
        """
        Измеряет регистр и поглощает его.

        Состояние схлопывается на выпавшее значение и перенормируется, кубиты
        регистра сбрасываются в |0⟩ и возвращаются в пул.

        Args:
            register (Register): Живой регистр.

        Returns:
            int: Результат измерения.
        """
        self.check_register(register)
        probs = self.marginal_probabilities(register)
        outcome = int(self.rng.choice(len(probs), p=probs))
        amps = self.state.amps
        amps[register.values(self.indices) != outcome] = 0
        amps /= np.linalg.norm(amps)
        self.clear_bits(register.qubits)
        self.release(register)
        logger.debug(f"Измерение {register}: {outcome} (p={probs[outcome]:.6f})")
        self._after_operation()
        return outcome

    # Инварианты

    def support(self, tolerance: float = AMPLITUDE_TOLERANCE) -> np.ndarray:
        return np.flatnonzero(np.abs(self.state.amps) > tolerance)

    def check_invariants(self) -> None:
        amps = self.state.amps
        if not np.all(np.isfinite(amps)):
            raise InvariantViolation("Вектор состояния содержит NaN/Inf")
        norm = self.state.norm()
        if abs(norm - 1) > NORM_TOLERANCE * max(1, self.n_qubits):
            raise InvariantViolation(f"Норма состояния {norm!r} отличается от 1")
        free_mask = qubit_mask(self._free)
        dirty = self.support() & free_mask
        if np.any(dirty):
            raise InvariantViolation(f"Свободные кубиты не в |0⟩: маска {free_mask:b}")


def new_machine(n_qubits: int, seed: int = 0) -> Machine:
    return Machine(n_qubits, seed)


if __name__ == "__main__":
    # Тестовый код для проверки работы модуля
    logging.basicConfig(level=logging.DEBUG)

    m = new_machine(2, seed=7)
    pair = m.allocate(2)
    m.apply_h(pair[0])
    m.apply_controlled([pair[0]], 'X', pair[1])
    print(f"Состояние Белла: {np.round(m.amplitudes, 4)}")
    print(f"Распределение: {m.marginal_probabilities(pair)}")
    print(f"Измерено: {m.measure(pair)}")
