import os
import logging
from dotenv import load_dotenv

# Загрузка переменных окружения из файла .env
load_dotenv()

# Ограничения симулятора
MAX_QUBITS = 26  # ~1 ГиБ амплитуд complex128
AMPLITUDE_TOLERANCE = 1e-12  # амплитуды меньше считаются нулевыми
NORM_TOLERANCE = 1e-12

# Проверка нормы и чистоты свободных кубитов после каждого гейта (медленно)
STRICT_CHECKS = os.getenv('QSIM_STRICT_CHECKS', '0') == '1'

# Квантовый генератор случайных чисел
RANDOM_INT_MAX_BITS = 30

# Поиск минимума
SCHEDULE_GROWTH = 8 / 7  # рост числа итераций Гровера при неудачном раунде

# Равномерная суперпозиция
UNIFSUP_TOLERANCE = 1e-10

# Настройки запуска
DEFAULT_SEED = 0
DEFAULT_TRIALS = 1
RANDOM_TABLE_SPREAD = 4  # --random-table N берет значения из [0, 4N)
WORKERS = int(os.getenv('QSIM_WORKERS', '1'))

# Логирование
LOG_LEVEL = os.getenv('QSIM_LOG_LEVEL', 'INFO').upper()
LOG_FILE = os.getenv('QSIM_LOG_FILE', 'qsim.log')

# Проверка значений из окружения
if WORKERS < 1:
    raise ValueError(f"QSIM_WORKERS должен быть >= 1, получено {WORKERS}")
if not isinstance(logging.getLevelName(LOG_LEVEL), int):
    raise ValueError(f"Неизвестный уровень логирования QSIM_LOG_LEVEL: {LOG_LEVEL}")
