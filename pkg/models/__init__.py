"""
Модели данных Parabolab.

Этот пакет содержит dataclass-модели для:
- Формы биллиарда и реестра пресетов
- Спектров, операторов и параметров возмущения
- Классической траектории и оценки Ляпунова
- Выборок расстояний и отчётов о подгонке
- Конфигурации запуска и манифеста
"""

from .shape import BilliardShape, Wall, shape_violations
from .shape_registry import ShapeRegistry
from .spectra import (
    BasisSpec,
    Spectrum,
    StabilityReport,
    StabilityCriterion,
    OperatorMatrix,
    EpsilonRule,
    PerturbParams,
    EpsilonChoice,
    PerturbedSpectrum,
)
from .dynamics import TrajectoryState, LyapunovEstimate
from .statistics import SpacingSample, FitReport
from .config_schema import (
    RunConfig,
    PerturbSettings,
    StatsSettings,
    ClassicalSettings,
)
from .manifest import ShapeOutcome, RunManifest

__all__ = [
    # Геометрия
    "BilliardShape",
    "Wall",
    "shape_violations",
    "ShapeRegistry",
    # Спектры и возмущение
    "BasisSpec",
    "Spectrum",
    "StabilityReport",
    "StabilityCriterion",
    "OperatorMatrix",
    "EpsilonRule",
    "PerturbParams",
    "EpsilonChoice",
    "PerturbedSpectrum",
    # Классика
    "TrajectoryState",
    "LyapunovEstimate",
    # Статистика
    "SpacingSample",
    "FitReport",
    # Конфигурация и манифест
    "RunConfig",
    "PerturbSettings",
    "StatsSettings",
    "ClassicalSettings",
    "ShapeOutcome",
    "RunManifest",
]
