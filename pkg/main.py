import sys
import logging
from uncompute_sim.cli import main as cli_main
from uncompute_sim.utils import setup_logging


def main() -> int:
    setup_logging()
    try:
        return cli_main(sys.argv[1:])
    except KeyboardInterrupt:
        logging.info("Получен сигнал завершения. Останавливаем серию испытаний...")
        return 130
    except Exception as e:
        logging.error(f"Произошла непредвиденная ошибка: {e}")
        logging.exception("Полный стек вызовов:")
        return 3


if __name__ == '__main__':
    sys.exit(main())
