import time
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

from config import DEFAULT_SEED, DEFAULT_TRIALS, MAX_QUBITS, RANDOM_INT_MAX_BITS, UNIFSUP_TOLERANCE, WORKERS
from .amplify import OracleMode, amplify, grover, oracle_from_marks, prepare_uniform
from .collision import CollisionInstance, find_collision, is_collision, random_int, required_qubits as collision_qubits
from .errors import ConfigurationError, QuantumSimError
from .machine import Machine
from .minima import durr_hoyer, required_qubits as minima_qubits
from .unifsup import max_deviation, plan_for, prepare_uniform_m, prepare_uniform_m_with_forget

logger = logging.getLogger(__name__)

ALGORITHMS = ('minima', 'collision', 'unifsup', 'grover', 'randint')


@dataclass
class RunConfig:
    """Параметры одного запуска серии испытаний."""
    algorithm: str
    seed: int = DEFAULT_SEED
    trials: int = DEFAULT_TRIALS
    workers: int = WORKERS
    json: bool = False
    out_path: Optional[str] = None
    db_path: Optional[str] = None
    log_level: Optional[str] = None
    table: Optional[List[int]] = None
    modulus: Optional[int] = None
    r: int = 0
    M: Optional[int] = None
    dump_amps: bool = False
    n: Optional[int] = None
    marks: int = 1
    target: int = 0
    iterations: Optional[int] = None
    bound: Optional[int] = None
    oracle_mode: Optional[OracleMode] = None
    with_forget: bool = False

    @property
    def mode(self) -> OracleMode:
        if self.oracle_mode is not None:
            return OracleMode(self.oracle_mode)
        return OracleMode.ANCILLA if self.algorithm == 'collision' else OracleMode.DIAGONAL

    def grover_marks(self) -> List[int]:
        size = 1 << self.n
        return sorted({(self.target + i) % size for i in range(self.marks)})

    def collision_function(self) -> Callable[[int], int]:
        modulus = self.modulus
        return lambda x: x % modulus

    def machine_size(self) -> int:
        """Число кубитов машины одного испытания."""
        if self.algorithm == 'minima':
            return minima_qubits(self.table, self.mode)
        if self.algorithm == 'collision':
            return collision_qubits(self.table, self.collision_function(), self.mode)
        if self.algorithm == 'unifsup':
            return plan_for(self.M).n + int(self.with_forget)
        if self.algorithm == 'grover':
            return self.n
        return max(1, (self.bound - 1).bit_length())

    def validate(self) -> None:
        """
        Проверяет параметры до построения машин.

        Raises:
            ConfigurationError: Параметры недопустимы для алгоритма.
        """
        if self.algorithm not in ALGORITHMS:
            raise ConfigurationError(f"Неизвестный алгоритм: {self.algorithm}")
        if self.trials < 1:
            raise ConfigurationError(f"Число испытаний должно быть положительным, получено {self.trials}")
        if self.seed < 0:
            raise ConfigurationError(f"seed должен быть неотрицательным, получено {self.seed}")
        if self.workers < 1:
            raise ConfigurationError(f"Число потоков должно быть положительным, получено {self.workers}")

        if self.algorithm in ('minima', 'collision'):
            if not self.table:
                raise ConfigurationError("Нужна таблица: --table или --random-table")
            if any(v < 0 for v in self.table):
                raise ConfigurationError("Значения таблицы должны быть неотрицательными")
        if self.algorithm == 'minima':
            if len(set(self.table)) != len(self.table):
                raise ConfigurationError(f"Значения таблицы должны быть различными: {self.table}")
        elif self.algorithm == 'collision':
            if len(self.table) < 2:
                raise ConfigurationError("Для поиска коллизии нужно хотя бы 2 значения")
            if self.modulus is None or self.modulus < 1:
                raise ConfigurationError(f"Модуль должен быть положительным, получено {self.modulus}")
            if self.r < 0:
                raise ConfigurationError(f"r должно быть неотрицательным, получено {self.r}")
        elif self.algorithm == 'unifsup':
            if self.M is None or self.M < 2:
                raise ConfigurationError(f"M должно быть не меньше 2, получено {self.M}")
            if (self.M - 1).bit_length() + int(self.with_forget) > MAX_QUBITS:
                raise ConfigurationError(f"M={self.M} не помещается в {MAX_QUBITS} кубитов")
        elif self.algorithm == 'grover':
            if self.n is None or not 1 <= self.n <= MAX_QUBITS:
                raise ConfigurationError(f"Число кубитов должно быть в [1, {MAX_QUBITS}], получено {self.n}")
            if not 1 <= self.marks <= 1 << self.n:
                raise ConfigurationError(f"Число меток {self.marks} вне диапазона [1, {1 << self.n}]")
            if self.target < 0:
                raise ConfigurationError(f"Цель должна быть неотрицательной, получено {self.target}")
            if self.iterations is not None and self.iterations < 0:
                raise ConfigurationError(f"Число итераций не может быть отрицательным: {self.iterations}")
        elif self.algorithm == 'randint':
            if self.bound is None or self.bound < 1:
                raise ConfigurationError(f"Граница должна быть положительной, получено {self.bound}")
            if (self.bound - 1).bit_length() > RANDOM_INT_MAX_BITS:
                raise ConfigurationError(f"Граница {self.bound} больше 2^{RANDOM_INT_MAX_BITS}")

        size = self.machine_size()
        if size > MAX_QUBITS:
            raise ConfigurationError(f"Для {self.algorithm} нужно {size} кубитов, максимум {MAX_QUBITS}")


@dataclass
class TrialRecord:
    index: int
    seed: int
    outcome: Any = None
    success: bool = False
    queries: int = 0
    steps: Optional[int] = None
    error: Optional[str] = None
    details: Dict[str, Any] = field(default_factory=dict)


@dataclass
class AlgorithmReport:
    algorithm: str
    seed: int
    trials: int
    results: List[TrialRecord]
    ms: float = 0.0

    @property
    def success_rate(self) -> float:
        if not self.results:
            return 0.0
        return sum(r.success for r in self.results) / len(self.results)

    @property
    def mean_queries(self) -> float:
        if not self.results:
            return 0.0
        return sum(r.queries for r in self.results) / len(self.results)


# Испытания. Каждая функция заполняет запись по готовой машине.

def _minima_trial(cfg: RunConfig, m: Machine, record: TrialRecord) -> None:
    run = durr_hoyer(m, cfg.table, cfg.mode)
    record.outcome = run.solution
    record.success = run.solution == min(cfg.table)
    record.queries = run.queries
    record.steps = run.rt
    record.details = {'index': run.solution_index, 'rounds': run.rounds}


def _collision_trial(cfg: RunConfig, m: Machine, record: TrialRecord) -> None:
    function = cfg.collision_function()
    result = find_collision(m, CollisionInstance(cfg.table, function, cfg.r), cfg.mode)
    a, b = result.pair
    record.outcome = [a, b]
    # проверка перебором, независимая от алгоритма
    record.success = a in cfg.table and b in cfg.table and is_collision(result.pair, function)
    record.queries = result.queries
    record.details = {
        'k': result.k,
        'marks': result.marks,
        'classicalEvaluations': result.classical_evaluations,
        'earlyExit': result.early_exit,
        'kClamped': result.k_clamped,
        'index': result.index,
    }


def _unifsup_trial(cfg: RunConfig, m: Machine, record: TrialRecord) -> None:
    prepare = prepare_uniform_m_with_forget if cfg.with_forget else prepare_uniform_m
    register = prepare(m, cfg.M)
    amps = m.register_amplitudes(register)
    deviation = max_deviation(amps, cfg.M)
    record.success = deviation < UNIFSUP_TOLERANCE
    record.details = {'qubits': register.width, 'maxDeviation': deviation}
    if cfg.dump_amps:
        record.outcome = [[float(a.real), float(a.imag)] for a in amps]


def _grover_trial(cfg: RunConfig, m: Machine, record: TrialRecord) -> None:
    marks = cfg.grover_marks()
    oracle = oracle_from_marks(cfg.n, marks)
    if cfg.iterations is None:
        outcome = grover(m, oracle, len(marks))
    else:
        register = m.allocate(cfg.n)
        prepare_uniform(m, register)
        amplify(m, oracle, register, cfg.iterations)
        outcome = m.measure(register)
    record.outcome = outcome
    record.success = outcome in marks
    record.queries = m.query_count


def _randint_trial(cfg: RunConfig, m: Machine, record: TrialRecord) -> None:
    value = random_int(m, cfg.bound)
    record.outcome = value
    record.success = 0 <= value < cfg.bound


TRIALS = {
    'minima': _minima_trial,
    'collision': _collision_trial,
    'unifsup': _unifsup_trial,
    'grover': _grover_trial,
    'randint': _randint_trial,
}


class TrialRunner:
    """
    Выполняет серию независимых испытаний одного алгоритма.

    Каждое испытание получает свою машину с seed = cfg.seed + index. Ошибки
    алгоритма записываются в испытание и не прерывают серию.
    """

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.trial = TRIALS[cfg.algorithm]
        self.size = cfg.machine_size()
        self.logger = logging.getLogger(__name__)

    def run_trial(self, index: int) -> TrialRecord:
        seed = self.cfg.seed + index
        record = TrialRecord(index, seed)
        m = None
        try:
            m = Machine(self.size, seed)
            self.trial(self.cfg, m, record)
        except QuantumSimError as e:
            self.logger.warning(f"Испытание {index} (seed={seed}) не удалось: {e}")
            record.error = f"{type(e).__name__}: {e}"
            record.success = False
        except Exception as e:
            self.logger.error(f"Непредвиденная ошибка в испытании {index} (seed={seed}): {e}", exc_info=True)
            record.error = f"{type(e).__name__}: {e}"
            record.success = False
        if record.error and m is not None:
            record.queries = m.query_count
        return record

    def run(self) -> List[TrialRecord]:
        indices = range(self.cfg.trials)
        if self.cfg.workers == 1:
            return [self.run_trial(i) for i in indices]
        with ThreadPoolExecutor(max_workers=self.cfg.workers) as executor:
            return list(executor.map(self.run_trial, indices))


def run_and_report(cfg: RunConfig) -> AlgorithmReport:
    """
    Запускает серию испытаний и собирает отчет.

    Args:
        cfg (RunConfig): Проверенная конфигурация.

    Returns:
        AlgorithmReport: Записи испытаний в порядке индексов и агрегаты.
    """
    cfg.validate()
    logger.info(f"Запуск {cfg.algorithm}: {cfg.trials} испытаний, seed={cfg.seed}, "
                f"потоков {cfg.workers}, кубитов {cfg.machine_size()}")
    started = time.perf_counter()
    results = TrialRunner(cfg).run()
    ms = round((time.perf_counter() - started) * 1000, 3)
    report = AlgorithmReport(cfg.algorithm, cfg.seed, cfg.trials, results, ms)
    logger.info(f"{cfg.algorithm} завершен: успех {report.success_rate:.3f}, "
                f"среднее число запросов {report.mean_queries:.2f}, {ms} мс")
    return report
