"""
Обработчики ввода-вывода Parabolab.

Этот пакет содержит компоненты для:
- Загрузки и валидации JSON конфигураций
- Разрешения путей (выходная директория, пути артефактов)
- Чтения и записи текстовых таблиц спектров
- Записи отчётов и манифеста запуска
"""

from .path_resolver import PathResolver, relative_artifact
from .config_loader import ConfigLoader, default_registry
from .spectrum_io import (
    read_eigenvectors,
    read_spectrum,
    spectrum_kind,
    write_eigenvectors,
    write_operator_scatter,
    write_perturbed,
    write_spectrum,
)
from .report_writer import (
    read_spacings,
    write_collisions,
    write_fit_report,
    write_json,
    write_manifest,
    write_rows,
    write_spacings,
)

__all__ = [
    "PathResolver",
    "relative_artifact",
    "ConfigLoader",
    "default_registry",
    "read_eigenvectors",
    "read_spectrum",
    "spectrum_kind",
    "write_eigenvectors",
    "write_operator_scatter",
    "write_perturbed",
    "write_spectrum",
    "read_spacings",
    "write_collisions",
    "write_fit_report",
    "write_json",
    "write_manifest",
    "write_rows",
    "write_spacings",
]
