"""
Настройки и константы по умолчанию для Parabolab.

Этот модуль содержит регистрацию стандартных форм биллиарда
и имена артефактов отчёта.
"""

from models import BilliardShape, ShapeRegistry

VERSION = "1.0.0"


def register_default_shapes(registry: ShapeRegistry) -> None:
    """
    Регистрирует стандартные формы в реестре.

    Три хаотические формы стандартного ансамбля имеют заметно разные пары
    кривизн и смещений; прямоугольник служит интегрируемым эталоном и
    доступен только в тестовом режиме.

    Args:
        registry: Реестр форм для регистрации.

    Example:
        >>> registry = ShapeRegistry()
        >>> register_default_shapes(registry)
        >>> print(registry.list_all())
        ['ensemble_a', 'ensemble_b', 'ensemble_c', 'reference_box']
    """

    # Форма 1: слабая правая, средняя верхняя кривизна
    registry.register(
        BilliardShape(
            width=1.0, height=1.13,
            curvature1=0.20, offset1=0.40,
            curvature2=0.30, offset2=0.60,
            name="ensemble_a",
        )
    )

    # Форма 2: обе кривизны сильнее, верхняя вершина смещена влево
    registry.register(
        BilliardShape(
            width=1.0, height=1.13,
            curvature1=0.25, offset1=0.70,
            curvature2=0.35, offset2=0.35,
            name="ensemble_b",
        )
    )

    # Форма 3: правая кривизна больше верхней
    registry.register(
        BilliardShape(
            width=1.0, height=1.13,
            curvature1=0.30, offset1=0.45,
            curvature2=0.22, offset2=0.70,
            name="ensemble_c",
        )
    )

    # Интегрируемый эталон: прямоугольник без разрезов
    registry.register(
        BilliardShape(
            width=1.0, height=1.13,
            curvature1=0.0, offset1=0.565,
            curvature2=0.0, offset2=0.5,
            name="reference_box",
            test_mode=True,
        )
    )


DEFAULT_SHAPE_PRESETS = ["ensemble_a", "ensemble_b", "ensemble_c"]
DEFAULT_OUTPUT_DIR = "runs/default"
DEFAULT_LOG_DIR = "logs"

# Имена артефактов внутри директории запуска
MANIFEST_NAME = "manifest.json"
SPECTRUM_H0_NAME = "spectrum_H0.txt"
SPECTRUM_HEPS_NAME = "spectrum_Heps.txt"
EIGENVECTORS_NAME = "eigenvectors_H0.txt"
OPERATOR_SCATTER_NAME = "operator_diagonal.csv"
SPACINGS_H0_NAME = "spacings_H0.csv"
SPACINGS_HEPS_NAME = "spacings_Heps.csv"
FIT_REPORT_NAME = "fit_report.json"
EPSILON_SWEEP_NAME = "epsilon_sweep.csv"
COLLISIONS_NAME = "collisions.txt"
CLASSICAL_REPORT_NAME = "classical.csv"
POOLED_DIR = "pooled"
