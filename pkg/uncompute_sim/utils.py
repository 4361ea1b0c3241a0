import logging
from typing import List, Optional

import numpy as np

from config import LOG_LEVEL, LOG_FILE, RANDOM_TABLE_SPREAD

logger = logging.getLogger(__name__)


def setup_logging(level: Optional[str] = None, log_file: Optional[str] = LOG_FILE):
    """Настраивает логирование симулятора (stderr и, если задан, файл)."""
    handlers = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding='utf-8'))
    logging.basicConfig(
        level=(level or LOG_LEVEL).upper(),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )
    # Поэлементные логи машины слишком подробны даже для DEBUG всего пакета
    logging.getLogger('uncompute_sim.machine').setLevel(logging.INFO)


def parse_int_list(text: str) -> List[int]:
    """
    Разбирает список целых через запятую.

    Args:
        text (str): Строка вида "5,3,7,1".

    Returns:
        List[int]: Значения.

    Raises:
        ValueError: Пустой элемент или не целое число.
    """
    items = [item.strip() for item in text.split(',')]
    if not text.strip() or any(not item for item in items):
        raise ValueError(f"Пустой элемент в списке: {text!r}")
    return [int(item) for item in items]


def random_table(size: int, seed: int, spread: int = RANDOM_TABLE_SPREAD) -> List[int]:
    """
    Различные случайные значения из [0, spread·size).

    Таблица зависит только от seed, поэтому повтор запуска дает ту же таблицу.
    """
    if size < 1:
        raise ValueError(f"Размер таблицы должен быть положительным, получено {size}")
    rng = np.random.default_rng(seed)
    return [int(v) for v in rng.choice(spread * size, size=size, replace=False)]


if __name__ == "__main__":
    # Тестовый код для проверки работы модуля
    setup_logging()
    logger.info("Тестирование модуля utils.py")
    print(f"Список: {parse_int_list('5, 3,7,1')}")
    print(f"Случайная таблица: {random_table(8, seed=42)}")
