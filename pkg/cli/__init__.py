"""
Интерфейс командной строки Parabolab.

Этот пакет содержит CLI команды для:
- Полного эксперимента (run)
- Проверки конфигурации (validate)
- Пересчёта статистики по сохранённым спектрам (stats)
- Классической проверки хаоса (classical)
"""

from .commands import (
    cmd_run,
    cmd_validate,
    cmd_stats,
    cmd_classical,
    cmd_help,
    parse_args,
)

__all__ = [
    "cmd_run",
    "cmd_validate",
    "cmd_stats",
    "cmd_classical",
    "cmd_help",
    "parse_args",
]
