#!/usr/bin/env python3
"""
Parabolab: спектры биллиарда с параболическими стенками.

Точка входа CLI: run, validate, stats, classical.
Справка: python main.py help
"""

import logging
import sys
from typing import List, Optional, Tuple

from cli import parse_args
from core import setup_logging
from config import DEFAULT_LOG_DIR, VERSION


def _logging_mode(argv: List[str]) -> Tuple[bool, bool]:
    """(verbose, quiet) из флагов; сами флаги отбрасывает parse_args."""
    verbose = "--verbose" in argv or "-v" in argv
    quiet = not verbose and ("--quiet" in argv or "-q" in argv)
    return verbose, quiet


def main(argv: Optional[List[str]] = None) -> int:
    """
    Настраивает логирование и выполняет команду.

    Returns:
        Exit code команды; 130 при прерывании, 1 при необработанном исключении.
    """
    argv = sys.argv[1:] if argv is None else argv
    verbose, quiet = _logging_mode(argv)
    setup_logging(verbose=verbose, log_dir=DEFAULT_LOG_DIR, quiet=quiet)

    logger = logging.getLogger(__name__)
    logger.debug(f"🚀 Parabolab {VERSION}, аргументы: {argv}")

    try:
        return parse_args(argv)
    except KeyboardInterrupt:
        logger.warning("⚠️ Прервано пользователем")
        return 130
    except Exception as e:
        logger.critical(f"💥 Необработанное исключение на верхнем уровне: {e}", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
