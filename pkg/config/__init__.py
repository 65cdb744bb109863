"""
Конфигурация проекта Parabolab.

Этот пакет содержит настройки по умолчанию, константы и регистрацию форм.
"""

from .settings import (
    register_default_shapes,
    VERSION,
    DEFAULT_SHAPE_PRESETS,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_LOG_DIR,
    MANIFEST_NAME,
    SPECTRUM_H0_NAME,
    SPECTRUM_HEPS_NAME,
    EIGENVECTORS_NAME,
    OPERATOR_SCATTER_NAME,
    SPACINGS_H0_NAME,
    SPACINGS_HEPS_NAME,
    FIT_REPORT_NAME,
    EPSILON_SWEEP_NAME,
    COLLISIONS_NAME,
    CLASSICAL_REPORT_NAME,
    POOLED_DIR,
)

__all__ = [
    "register_default_shapes",
    "VERSION",
    "DEFAULT_SHAPE_PRESETS",
    "DEFAULT_OUTPUT_DIR",
    "DEFAULT_LOG_DIR",
    "MANIFEST_NAME",
    "SPECTRUM_H0_NAME",
    "SPECTRUM_HEPS_NAME",
    "EIGENVECTORS_NAME",
    "OPERATOR_SCATTER_NAME",
    "SPACINGS_H0_NAME",
    "SPACINGS_HEPS_NAME",
    "FIT_REPORT_NAME",
    "EPSILON_SWEEP_NAME",
    "COLLISIONS_NAME",
    "CLASSICAL_REPORT_NAME",
    "POOLED_DIR",
]
