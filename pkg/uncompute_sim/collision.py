import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

from config import RANDOM_INT_MAX_BITS
from .amplify import Oracle, OracleMode, LoadStage, grover
from .errors import BoundTooLarge, InvalidCardinality, NoCollisionFound
from .machine import Machine
from .minima import index_width, value_width

logger = logging.getLogger(__name__)

Function = Callable[[int], int]


@dataclass
class CollisionInstance:
    """Таблица T, функция F и r (F r-к-одному; 0 или 1: произвольная F)."""
    table: List[int]
    function: Function
    r: int = 0


@dataclass
class SubsetTables:
    inputs: List[int]
    outputs: List[int]

    @property
    def k(self) -> int:
        return len(self.inputs)


@dataclass
class CollisionResult:
    pair: Tuple[int, int]
    k: int
    marks: int
    queries: int
    classical_evaluations: int
    early_exit: bool
    k_clamped: bool
    index: Optional[int] = None


def random_int(m: Machine, bound: int) -> int:
    """
    Случайное целое из [0, bound) через измерение кубитов после H.

    Биты разыгрываются порциями не больше числа свободных кубитов машины;
    результат ≥ bound отбрасывается и розыгрыш повторяется.

    Args:
        m (Machine): Машина хотя бы с одним свободным кубитом (если bound > 1).
        bound (int): Верхняя граница, ⌈log₂ bound⌉ ≤ 30.

    Returns:
        int: Случайное значение.
    """
    if bound < 1:
        raise ValueError(f"Граница должна быть положительной, получено {bound}")
    bits = (bound - 1).bit_length()
    if bits > RANDOM_INT_MAX_BITS:
        raise BoundTooLarge(f"Граница {bound} требует {bits} бит, максимум {RANDOM_INT_MAX_BITS}")
    if bits == 0:
        return 0
    while True:
        value = 0
        drawn = 0
        while drawn < bits:
            chunk = max(1, min(bits - drawn, len(m.free_qubits)))
            register = m.allocate(chunk)
            for q in register:
                m.apply_h(q)
            value |= m.measure(register) << drawn
            drawn += chunk
        if value < bound:
            return value


def _ceil_cube_root(n_items: int, r: int) -> int:
    # целочисленно, чтобы ∛27 не округлялся вверх до 4
    k = max(1, round((n_items / r) ** (1 / 3)))
    while k ** 3 * r < n_items:
        k += 1
    while k > 1 and (k - 1) ** 3 * r >= n_items:
        k -= 1
    return k


def _subset_cardinality(n_items: int, r: int, m: Machine) -> Tuple[int, bool]:
    if r >= 2:
        raw = _ceil_cube_root(n_items, r)
    else:
        raw = 1 + random_int(m, n_items)
    k = min(max(raw, 2), n_items)
    return k, k != raw


def subset_cardinality(n_items: int, r: int, m: Machine) -> int:
    """
    Размер подмножества k: ⌈∛(N/r)⌉ при r ≥ 2, иначе случайный из [1, N].

    Подмножество из одного элемента не может содержать коллизию, поэтому k не
    меньше 2.
    """
    if n_items < 2:
        raise InvalidCardinality(f"Нужно хотя бы 2 элемента, получено {n_items}")
    return _subset_cardinality(n_items, r, m)[0]


def generate_subset(m: Machine, table: Sequence[int], k: int) -> List[int]:
    """
    Выбирает k значений таблицы на различных позициях (частичная перетасовка Фишера-Йетса).

    Значения могут совпадать по F; это ловит check_doubles.
    """
    size = len(table)
    if not 2 <= k <= size:
        raise InvalidCardinality(f"Размер подмножества {k} вне диапазона [2, {size}]")
    positions = list(range(size))
    for i in range(k):
        j = i + random_int(m, size - i)
        positions[i], positions[j] = positions[j], positions[i]
    return [table[p] for p in positions[:k]]


def generate_lists(subset: Sequence[int], k: int, function: Function) -> SubsetTables:
    """
    Строит списки входов S и выходов Y' = [F(s₁), …, F(s_k)].

    Args:
        subset (Sequence[int]): Подмножество S.
        k (int): Его мощность.
        function (Function): Классическая F.

    Returns:
        SubsetTables: Входы и выходы.
    """
    if len(subset) != k:
        raise InvalidCardinality(f"Подмножество длины {len(subset)}, ожидалось {k}")
    inputs = [int(v) for v in subset]
    return SubsetTables(inputs, [int(function(v)) for v in inputs])


def check_doubles(tables: SubsetTables) -> Optional[Tuple[int, int]]:
    """Первая пара i < j с равными выходами и различными входами."""
    for i in range(tables.k):
        for j in range(i + 1, tables.k):
            if tables.outputs[i] == tables.outputs[j] and tables.inputs[i] != tables.inputs[j]:
                return tables.inputs[i], tables.inputs[j]
    return None


def output_width(table: Sequence[int], function: Function) -> int:
    # F(0) нужен для индексов дополнения, куда загружается 0
    return max(1, max(int(function(v)) for v in list(table) + [0]).bit_length())


def collision_oracle(tables: SubsetTables, table: Sequence[int], function: Function,
                     mode: OracleMode = OracleMode.ANCILLA) -> Oracle:
    """
    Оракул H над индексами T: H(x) = 1, если F(T[x]) = outputs[i] и T[x] ≠ inputs[i] для некоторого i.

    В режиме ANCILLA: T[x] загружается в анкиллу, к ней применяется F,
    результат сравнивается с Y'; все три анкиллы развычисляются.
    """
    table = tuple(int(v) for v in table)
    size = len(table)
    pairs = tuple(zip(tables.inputs, tables.outputs))

    def hit(v: int, fv: int) -> bool:
        return any(o == fv and i != v for i, o in pairs)

    def predicate(x: int) -> bool:
        return x < size and hit(table[x], int(function(table[x])))

    stages = (
        LoadStage(value_width(table), lambda x: table[x] if x < size else 0, 'T[x]'),
        LoadStage(output_width(table, function), lambda x, v: int(function(v)), 'F(T[x])'),
        LoadStage(1, lambda x, v, fv: int(x < size and hit(v, fv)), 'F(T[x]) in Y\''),
    )
    return Oracle(index_width(size), predicate, mode, stages, name='H')


def required_qubits(table: Sequence[int], function: Function, mode: OracleMode = OracleMode.ANCILLA) -> int:
    width = index_width(len(table))
    if OracleMode(mode) is OracleMode.ANCILLA:
        width += value_width(table) + output_width(table, function) + 1
    return width


def is_collision(pair: Tuple[int, int], function: Function) -> bool:
    a, b = pair
    return a != b and function(a) == function(b)


def brute_force_collisions(table: Sequence[int], function: Function) -> List[Tuple[int, int]]:
    found = []
    for i, a in enumerate(table):
        for b in table[i + 1:]:
            if is_collision((a, b), function):
                found.append((a, b))
    return found


def find_collision(m: Machine, instance: CollisionInstance,
                   mode: OracleMode = OracleMode.ANCILLA) -> CollisionResult:
    """
    Поиск коллизии: классическая фаза на подмножестве, затем Гровер по оракулу H.

    Args:
        m (Machine): Машина с не менее чем required_qubits(...) кубитами.
        instance (CollisionInstance): Задача.
        mode (OracleMode): Реализация оракула H.

    Returns:
        CollisionResult: Пара различных входов с равными значениями F.

    Raises:
        NoCollisionFound: Измеренный индекс не прошел проверку.
    """
    table = [int(v) for v in instance.table]
    size = len(table)
    if size < 2:
        raise InvalidCardinality(f"Нужно хотя бы 2 элемента, получено {size}")
    function = instance.function
    queries_before = m.query_count

    k, clamped = _subset_cardinality(size, instance.r, m)
    if clamped:
        logger.debug(f"Размер подмножества приведен к {k}")
    subset = generate_subset(m, table, k)

    evaluations = 0

    def counted(v: int) -> int:
        nonlocal evaluations
        evaluations += 1
        return function(v)

    tables = generate_lists(subset, k, counted)

    pair = check_doubles(tables)
    if pair is not None:
        logger.debug(f"Коллизия найдена в подмножестве: {pair}")
        return CollisionResult(pair, k, 0, 0, evaluations, True, clamped)

    oracle = collision_oracle(tables, table, function, mode)
    marks = (instance.r - 1) * k if instance.r >= 2 else 1
    marks = min(max(marks, 1), 1 << oracle.arity)
    y = grover(m, oracle, marks)
    queries = m.query_count - queries_before

    if y < size:
        v = table[y]
        fv = function(v)
        for i in range(k):
            if fv == tables.outputs[i] and v != tables.inputs[i]:
                pair = (v, tables.inputs[i])
                logger.debug(f"Коллизия {pair}: индекс {y}, запросов {queries}")
                return CollisionResult(pair, k, marks, queries, evaluations, False, clamped, y)
    raise NoCollisionFound(f"Индекс {y} не дает коллизии с подмножеством {subset} "
                           f"(запросов {queries})")
