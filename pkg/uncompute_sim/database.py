import sqlite3
import logging
from datetime import datetime
from typing import List, Optional, Tuple

from .runner import AlgorithmReport

logger = logging.getLogger(__name__)


def get_db_connection(path: str):
    """Создает соединение с базой данных истории запусков."""
    return sqlite3.connect(path)


def create_db(path: str):
    """Создает необходимые таблицы в базе данных."""
    with get_db_connection(path) as conn:
        c = conn.cursor()

        # Таблица запусков
        c.execute('''CREATE TABLE IF NOT EXISTS runs
                     (id INTEGER PRIMARY KEY AUTOINCREMENT,
                     algorithm TEXT,
                     seed INTEGER,
                     trials INTEGER,
                     success_rate REAL,
                     mean_queries REAL,
                     ms REAL,
                     created TEXT)''')

        # Таблица испытаний
        c.execute('''CREATE TABLE IF NOT EXISTS trials
                     (run_id INTEGER REFERENCES runs(id),
                     trial_index INTEGER,
                     seed INTEGER,
                     outcome TEXT,
                     success INTEGER,
                     queries INTEGER,
                     steps INTEGER,
                     error TEXT,
                     PRIMARY KEY (run_id, trial_index))''')

        conn.commit()
    logger.debug(f"База данных {path} инициализирована")


def add_run(path: str, report: AlgorithmReport) -> int:
    """
    Сохраняет отчет и его испытания.

    Returns:
        int: id запуска.
    """
    create_db(path)
    with get_db_connection(path) as conn:
        c = conn.cursor()
        c.execute('''INSERT INTO runs (algorithm, seed, trials, success_rate, mean_queries, ms, created)
                     VALUES (?, ?, ?, ?, ?, ?, ?)''',
                  (report.algorithm, report.seed, report.trials, report.success_rate,
                   report.mean_queries, report.ms, datetime.now().strftime('%Y-%m-%d %H:%M:%S')))
        run_id = c.lastrowid
        c.executemany('''INSERT INTO trials VALUES (?, ?, ?, ?, ?, ?, ?, ?)''',
                      [(run_id, r.index, r.seed, repr(r.outcome), int(r.success), r.queries, r.steps, r.error)
                       for r in report.results])
        conn.commit()
    logger.info(f"Запуск {report.algorithm} сохранен в {path} (id={run_id})")
    return run_id


def get_runs(path: str, algorithm: Optional[str] = None) -> List[Tuple]:
    """Возвращает запуски, при необходимости только одного алгоритма."""
    with get_db_connection(path) as conn:
        c = conn.cursor()
        if algorithm is None:
            c.execute("SELECT * FROM runs ORDER BY id")
        else:
            c.execute("SELECT * FROM runs WHERE algorithm = ? ORDER BY id", (algorithm,))
        return c.fetchall()


def get_trials(path: str, run_id: int) -> List[Tuple]:
    with get_db_connection(path) as conn:
        c = conn.cursor()
        c.execute("SELECT * FROM trials WHERE run_id = ? ORDER BY trial_index", (run_id,))
        return c.fetchall()
