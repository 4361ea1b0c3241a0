import sys
import logging
import argparse
from typing import List, Optional, Sequence

from config import DEFAULT_SEED, DEFAULT_TRIALS, WORKERS
from .amplify import OracleMode
from .database import add_run
from .errors import ConfigurationError, UsageError
from .publisher import publish_report
from .runner import RunConfig, run_and_report
from .utils import parse_int_list, random_table

logger = logging.getLogger(__name__)

LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')


class _ArgumentParser(argparse.ArgumentParser):
    """argparse без sys.exit: ошибки разбора поднимают UsageError."""

    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: ошибка: {message}")


def _non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"ожидалось целое число, получено {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"ожидалось неотрицательное число, получено {value}")
    return value


def _positive_int(text: str) -> int:
    value = _non_negative_int(text)
    if value == 0:
        raise argparse.ArgumentTypeError("ожидалось положительное число, получено 0")
    return value


def _table(text: str) -> List[int]:
    try:
        values = parse_int_list(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"некорректная таблица: {e}") from None
    if any(v < 0 for v in values):
        raise argparse.ArgumentTypeError("значения таблицы должны быть неотрицательными")
    return values


def _common_options() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument('--seed', type=_non_negative_int, default=DEFAULT_SEED, help="начальный seed (по умолчанию 0)")
    common.add_argument('--trials', type=_positive_int, default=DEFAULT_TRIALS, help="число испытаний")
    common.add_argument('--json', action='store_true', help="вывести отчет в JSON на stdout")
    common.add_argument('--out', dest='out_path', help="сохранить JSON-отчет в файл")
    common.add_argument('--workers', type=_positive_int, default=WORKERS, help="число потоков для испытаний")
    common.add_argument('--db', dest='db_path', help="добавить отчет в SQLite-историю запусков")
    common.add_argument('--log-level', type=str.upper, choices=LOG_LEVELS, help="уровень логирования")
    return common


def _table_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument('--table', type=_table, help="значения через запятую, например 5,3,7,1")
    group.add_argument('--random-table', type=_positive_int, metavar='N', help="случайная таблица из N значений")


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _ArgumentParser(prog='uncompute_sim', description="Симулятор квантовых алгоритмов с развычислением")
    commands = parser.add_subparsers(dest='algorithm', required=True, metavar='{minima,collision,unifsup,grover,randint}')
    modes = [mode.value for mode in OracleMode]

    minima = commands.add_parser('minima', parents=[common], help="поиск минимума (Дюрр-Хёйер)")
    _table_options(minima)
    minima.add_argument('--oracle-mode', choices=modes, default=OracleMode.DIAGONAL.value)

    collision = commands.add_parser('collision', parents=[common], help="поиск коллизии F(x) = x mod m")
    _table_options(collision)
    collision.add_argument('--mod', dest='modulus', type=_positive_int, required=True, help="модуль m")
    collision.add_argument('--r', type=_non_negative_int, default=0, help="F r-к-одному (0: неизвестно)")
    collision.add_argument('--oracle-mode', choices=modes, default=OracleMode.ANCILLA.value)

    unifsup = commands.add_parser('unifsup', parents=[common], help="равномерная суперпозиция M состояний")
    unifsup.add_argument('--m', dest='M', type=_positive_int, required=True)
    unifsup.add_argument('--dump-amps', action='store_true', help="включить амплитуды в отчет")
    unifsup.add_argument('--with-forget', action='store_true', help="условия через dup и forget")

    grover = commands.add_parser('grover', parents=[common], help="поиск Гровера")
    grover.add_argument('--n', type=_positive_int, required=True, help="число кубитов")
    grover.add_argument('--marks', type=_positive_int, default=1, help="число помеченных состояний t")
    grover.add_argument('--target', type=_non_negative_int, default=0, help="первое помеченное состояние")
    grover.add_argument('--iterations', type=_non_negative_int, help="число итераций вместо floor(π/4·√(N/t))")

    randint = commands.add_parser('randint', parents=[common], help="квантовое случайное число")
    randint.add_argument('--bound', type=_positive_int, required=True)

    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """
    Разбирает аргументы командной строки.

    Args:
        argv (Optional[Sequence[str]]): Аргументы без имени программы.

    Returns:
        RunConfig: Конфигурация запуска.

    Raises:
        UsageError: Некорректный флаг или значение.
    """
    args = build_parser().parse_args(argv)
    values = vars(args)
    random_size = values.pop('random_table', None)
    if random_size is not None:
        values['table'] = random_table(random_size, args.seed)
    if 'oracle_mode' in values:
        values['oracle_mode'] = OracleMode(values['oracle_mode'])
    return RunConfig(**values)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Точка входа командной строки.

    Returns:
        int: 0 при завершении серии, 1 при ошибке использования, 2 при ошибке конфигурации.
    """
    try:
        cfg = parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return 1

    if cfg.log_level:
        logging.getLogger().setLevel(cfg.log_level)

    try:
        report = run_and_report(cfg)
    except ConfigurationError as e:
        logger.error(f"Ошибка конфигурации: {e}")
        print(f"Ошибка конфигурации: {e}", file=sys.stderr)
        return 2

    publish_report(report, cfg.json, cfg.out_path)
    if cfg.db_path:
        add_run(cfg.db_path, report)
    return 0
