"""
Централизованная система логирования для Parabolab.

Настраивает три потока логов:
1. Console (stdout) - INFO, DEBUG с --verbose, WARNING с --quiet
2. logs/app.log - полная история (DEBUG)
3. logs/error.log - только ошибки (ERROR+)

Плюс на время запуска эксперимента - run.log внутри выходной директории.
Записи процессов-исполнителей приходят в родительские хендлеры через очередь.
"""

import logging
import multiprocessing
import sys
from contextlib import contextmanager
from logging.handlers import QueueHandler, QueueListener, RotatingFileHandler
from pathlib import Path
from typing import Any, Iterator, Union

LOG_FORMAT = "[%(asctime)s] %(levelname)-8s %(name)s:%(lineno)d - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
MAX_LOG_BYTES = 5 * 1024 * 1024
BACKUP_COUNT = 3
RUN_LOG_NAME = "run.log"


class SafeConsoleHandler(logging.StreamHandler):
    """
    StreamHandler с защитой от UnicodeEncodeError на консолях с узкой кодировкой.
    При ошибке кодировки заменяет эмодзи и другие символы на '?' вместо краша.
    """

    def emit(self, record):
        try:
            msg = self.format(record)
            self.stream.write(msg + self.terminator)
            self.flush()
        except UnicodeEncodeError:
            try:
                encoding = self.stream.encoding or "utf-8"
                safe_msg = self.format(record).encode(encoding, errors="replace").decode(encoding)
                self.stream.write(safe_msg + self.terminator)
                self.flush()
            except Exception:
                self.handleError(record)
        except Exception:
            self.handleError(record)


def _rotating(path: Path, level: int, formatter: logging.Formatter) -> RotatingFileHandler:
    handler = RotatingFileHandler(
        path, maxBytes=MAX_LOG_BYTES, backupCount=BACKUP_COUNT, encoding="utf-8"
    )
    handler.setLevel(level)
    handler.setFormatter(formatter)
    return handler


def setup_logging(verbose: bool = False, log_dir: str = "logs", quiet: bool = False):
    """
    Настраивает глобальный логгер приложения.

    Args:
        verbose: Если True, выводит DEBUG в консоль (по умолчанию только INFO)
        log_dir: Директория для файлов логов (по умолчанию "logs")
        quiet: Если True, в консоль идут только предупреждения и ошибки

    Структура:
        - Console: INFO (DEBUG при verbose, WARNING при quiet)
        - logs/app.log: DEBUG (ротация 5MB × 3)
        - logs/error.log: ERROR (ротация 5MB × 3)
    """
    log_path = Path(log_dir)
    log_path.mkdir(parents=True, exist_ok=True)

    formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT)
    console_formatter_simple = logging.Formatter("%(levelname)-8s %(message)s")

    root_logger = logging.getLogger()
    root_logger.setLevel(logging.DEBUG)
    root_logger.handlers.clear()

    console_handler = SafeConsoleHandler(sys.stdout)
    if verbose:
        console_handler.setLevel(logging.DEBUG)
        console_handler.setFormatter(formatter)
    else:
        console_handler.setLevel(logging.WARNING if quiet else logging.INFO)
        console_handler.setFormatter(console_formatter_simple)
    root_logger.addHandler(console_handler)

    root_logger.addHandler(_rotating(log_path / "app.log", logging.DEBUG, formatter))
    root_logger.addHandler(_rotating(log_path / "error.log", logging.ERROR, formatter))

    # RuntimeWarning от numpy/scipy попадают в лог, а не в stderr
    logging.captureWarnings(True)

    logging.info("⚙️ Система логирования инициализирована")
    logging.debug(f"📂 Логи сохраняются в: {log_path.resolve()}")


def attach_run_log(output_dir: Union[str, Path]) -> logging.Handler:
    """
    Добавляет DEBUG-лог run.log в выходную директорию запуска.

    Returns:
        Хендлер; после запуска его нужно передать в detach_run_log.
    """
    path = Path(output_dir)
    path.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(path / RUN_LOG_NAME, mode="w", encoding="utf-8")
    handler.setLevel(logging.DEBUG)
    handler.setFormatter(logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT))
    logging.getLogger().addHandler(handler)
    return handler


def detach_run_log(handler: logging.Handler) -> None:
    """Снимает и закрывает хендлер, добавленный attach_run_log."""
    logging.getLogger().removeHandler(handler)
    handler.close()


@contextmanager
def worker_log_relay() -> Iterator[Any]:
    """
    Очередь для записей процессов-исполнителей.

    Пока контекст открыт, QueueListener передаёт записи из очереди всем
    текущим хендлерам корневого логгера (включая run.log). Очередь
    передаётся в init_worker_logging через initargs пула.

    Example:
        >>> with worker_log_relay() as queue:
        ...     ProcessPoolExecutor(initializer=init_worker_logging, initargs=(queue,))
    """
    queue = multiprocessing.Queue(-1)
    listener = QueueListener(queue, *logging.getLogger().handlers, respect_handler_level=True)
    listener.start()
    try:
        yield queue
    finally:
        listener.stop()
        queue.close()
        queue.join_thread()


def init_worker_logging(queue: Any) -> None:
    """Инициализатор процесса пула: все записи уходят в очередь родителя."""
    root_logger = logging.getLogger()
    for handler in list(root_logger.handlers):
        root_logger.removeHandler(handler)
    root_logger.addHandler(QueueHandler(queue))
    root_logger.setLevel(logging.DEBUG)
    logging.captureWarnings(True)
