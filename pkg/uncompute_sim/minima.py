import math
import logging
from dataclasses import dataclass, field
from typing import List, Sequence

from config import SCHEDULE_GROWTH
from .amplify import Oracle, OracleMode, LoadStage, apply_oracle, apply_diffusion
from .errors import DuplicateEntries
from .machine import Machine

logger = logging.getLogger(__name__)


@dataclass
class MinimaRun:
    """Состояние поиска минимума; после durr_hoyer содержит результат."""
    table: List[int]
    solution: int
    solution_index: int
    budget: int
    n: int
    stage: int = 0
    rt: int = 0
    rounds: int = 0
    queries: int = 0
    history: List[int] = field(default_factory=list)


def runtime_budget(n_items: int) -> int:
    """
    Глобальный бюджет шагов ⌈22.5√N + 1.4(log₂N)²⌉.

    Args:
        n_items (int): Длина таблицы N ≥ 1.

    Returns:
        int: Максимальное число шагов (H подготовки и итераций Гровера).
    """
    if n_items < 1:
        raise ValueError(f"Длина таблицы должна быть положительной, получено {n_items}")
    return math.ceil(22.5 * math.sqrt(n_items) + 1.4 * math.log2(n_items) ** 2)


def index_width(n_items: int) -> int:
    """⌈log₂N⌉ кубитов индекса, но не меньше одного."""
    return max(1, (n_items - 1).bit_length())


def validate_table(table: Sequence[int]) -> List[int]:
    table = [int(v) for v in table]
    if not table:
        raise ValueError("Таблица не может быть пустой")
    if any(v < 0 for v in table):
        raise ValueError("Значения таблицы должны быть неотрицательными")
    if len(set(table)) != len(table):
        raise DuplicateEntries(f"Значения таблицы должны быть различными: {table}")
    return table


def value_width(table: Sequence[int]) -> int:
    return max(1, max(table).bit_length())


def minima_oracle(solution: int, table: Sequence[int], mode: OracleMode = OracleMode.DIAGONAL) -> Oracle:
    """
    Оракул f(x) = T[x] ≤ solution над индексами таблицы.

    Индексы x ≥ N (дополнение до степени двойки) не помечаются. В режиме
    ANCILLA в анкиллу загружается T[x], затем флаг сравнения.

    Args:
        solution (int): Текущий порог.
        table (Sequence[int]): Таблица T.
        mode (OracleMode): Реализация оракула.

    Returns:
        Oracle: Оракул арности ⌈log₂N⌉.
    """
    if not table:
        raise ValueError("Таблица не может быть пустой")
    table = tuple(int(v) for v in table)
    size = len(table)

    def predicate(x: int) -> bool:
        return x < size and table[x] <= solution

    stages = (
        LoadStage(value_width(table), lambda x: table[x] if x < size else 0, 'T[x]'),
        LoadStage(1, lambda x, v: int(x < size and v <= solution), 'T[x] <= solution'),
    )
    return Oracle(index_width(size), predicate, mode, stages, name=f"T[x] <= {solution}")


def required_qubits(table: Sequence[int], mode: OracleMode = OracleMode.DIAGONAL) -> int:
    width = index_width(len(table))
    if OracleMode(mode) is OracleMode.ANCILLA:
        width += value_width(table) + 1
    return width


def _draw_iterations(m: Machine, schedule: float) -> int:
    return int(m.rng.integers(1, math.ceil(schedule) + 1))


def _update(run: MinimaRun, y: int) -> bool:
    # измеренный индекс дополнения просто не проходит проверку
    if y < len(run.table) and run.table[y] < run.solution:
        logger.debug(f"Улучшение: {run.solution} -> {run.table[y]} (индекс {y}, rt={run.rt})")
        run.solution = run.table[y]
        run.solution_index = y
        run.history.append(run.solution)
        return True
    return False


def durr_hoyer(m: Machine, table: Sequence[int], mode: OracleMode = OracleMode.DIAGONAL) -> MinimaRun:
    """
    Поиск минимума неупорядоченной таблицы с глобальным бюджетом шагов.

    Каждый проход цикла делает не больше одного шага: H на очередной кубит
    (стадия < n) или одну итерацию Гровера. После iterations итераций регистр
    измеряется, порог и оракул обновляются при строгом улучшении, регистр
    выделяется заново. Число итераций раунда берется равномерно из
    {1, …, ⌈λ⌉}; λ растет в 8/7 раза после неудачного раунда (не выше √N) и
    сбрасывается в 1 после улучшения.

    Args:
        m (Machine): Машина с не менее чем required_qubits(table, mode) свободными кубитами.
        table (Sequence[int]): Различные неотрицательные значения.
        mode (OracleMode): Реализация оракула.

    Returns:
        MinimaRun: Итоговое состояние; минимум в поле solution.
    """
    table = validate_table(table)
    size = len(table)
    n = index_width(size)
    budget = runtime_budget(size)

    start = int(m.rng.integers(size))
    run = MinimaRun(table, table[start], start, budget, n, history=[table[start]])
    oracle = minima_oracle(run.solution, table, mode)
    queries_before = m.query_count

    schedule = 1.0
    iterations = _draw_iterations(m, schedule)
    q = m.allocate(n)
    while run.rt < budget:
        if run.stage < n:
            m.apply_h(q[run.stage])
            run.stage += 1
            run.rt += 1
        elif run.stage < n + iterations:
            apply_oracle(m, oracle, q)
            apply_diffusion(m, q)
            run.stage += 1
            run.rt += 1

        if run.stage == n + iterations:
            y = m.measure(q)
            run.rounds += 1
            if _update(run, y):
                oracle = minima_oracle(run.solution, table, mode)
                schedule = 1.0
            else:
                schedule = min(schedule * SCHEDULE_GROWTH, math.sqrt(size))
            q = m.allocate(n)
            run.stage = 0
            iterations = _draw_iterations(m, schedule)

    _update(run, m.measure(q))
    run.queries = m.query_count - queries_before
    logger.info(f"Минимум найден: {run.solution} (индекс {run.solution_index}), "
                f"rt={run.rt}/{budget}, раундов {run.rounds}, запросов {run.queries}")
    return run
