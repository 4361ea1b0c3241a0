import json
import logging
from typing import Any, Dict, Optional

from .runner import AlgorithmReport, TrialRecord

logger = logging.getLogger(__name__)


def record_to_dict(record: TrialRecord) -> Dict[str, Any]:
    data = {
        'trial': record.index,
        'seed': record.seed,
        'outcome': record.outcome,
        'success': record.success,
        'queries': record.queries,
        'steps': record.steps,
    }
    data.update(record.details)
    if record.error is not None:
        data['error'] = record.error
    return data


def report_to_dict(report: AlgorithmReport, include_timing: bool = True) -> Dict[str, Any]:
    """
    Преобразует отчет в JSON-совместимый словарь.

    Args:
        report (AlgorithmReport): Отчет серии испытаний.
        include_timing (bool): Включать ли поле ms (время выполнения).

    Returns:
        Dict[str, Any]: Словарь с фиксированным порядком ключей.
    """
    data = {
        'algorithm': report.algorithm,
        'seed': report.seed,
        'trials': report.trials,
        'results': [record_to_dict(r) for r in report.results],
        'aggregate': {
            'successRate': report.success_rate,
            'meanQueries': report.mean_queries,
        },
    }
    if include_timing:
        data['ms'] = report.ms
    return data


def dumps_report(report: AlgorithmReport, include_timing: bool = True) -> str:
    return json.dumps(report_to_dict(report, include_timing), indent=2, ensure_ascii=False)


def format_summary(report: AlgorithmReport) -> str:
    """
    Форматирует краткую сводку отчета для консоли.

    Args:
        report (AlgorithmReport): Отчет серии испытаний.

    Returns:
        str: Многострочный текст.
    """
    failed = [r for r in report.results if r.error]
    message = f"{report.algorithm}: {report.trials} испытаний, seed={report.seed}\n"
    message += f"Успех: {report.success_rate:.1%}\n"
    message += f"Среднее число запросов к оракулу: {report.mean_queries:.2f}\n"
    if report.trials == 1:
        message += f"Результат: {report.results[0].outcome}\n"
    if failed:
        message += f"Ошибок: {len(failed)} (первая: {failed[0].error})\n"
    message += f"Время: {report.ms} мс"
    return message


def publish_report(report: AlgorithmReport, as_json: bool = False, out_path: Optional[str] = None) -> str:
    """
    Выводит отчет: JSON или сводку в stdout, JSON в файл при out_path.

    Returns:
        str: Напечатанный текст.
    """
    text = dumps_report(report) if as_json else format_summary(report)
    print(text)
    if out_path:
        with open(out_path, 'w', encoding='utf-8') as f:
            f.write(dumps_report(report) + '\n')
        logger.info(f"Отчет сохранен в {out_path}")
    return text
