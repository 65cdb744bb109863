"""
Ядро вычислений Parabolab.

Этот пакет содержит:
- Иерархию исключений
- Систему логирования
- Геометрию биллиарда и классическую динамику
- Сборку и диагонализацию квантового гамильтониана
- Построение возмущения H(eps)
- Статистику расстояний между уровнями

Оркестратор запуска импортируется явно: from core.experiment_runner import ExperimentRunner.
"""

from .errors import (
    ParabolabError,
    GeometryError,
    NoIntersectionError,
    PointOffWallError,
    CollisionError,
    QuadratureError,
    NonSymmetricError,
    EigensolverError,
    MissingEigenvectorsError,
    DegeneracyError,
    WindowError,
    StatisticsError,
    ConfigError,
)
from .logger import setup_logging, attach_run_log, detach_run_log
from .geometry import area, boundary_distance, boundary_normal, contains, perimeter
from .classical import (
    advance,
    classical_hamiltonian,
    evolve,
    finite_tau_average,
    lyapunov,
    random_start,
    time_average_O,
)
from .quantum_spectrum import build_hamiltonian, compute_spectrum, eigensolve, stability_check
from .perturb import (
    build_H_eps,
    build_H_eps_tau,
    choose_epsilon,
    delta_O,
    large_tau_deviation,
    operator_matrix,
    sweep_epsilon,
)
from .spectral_stats import (
    fit_report,
    goe2x2_sample,
    ks_distance,
    pool,
    poisson_cdf,
    poisson_pdf,
    unfold,
    weyl_check,
    wigner_cdf,
    wigner_pdf,
)

__all__ = [
    "ParabolabError",
    "GeometryError",
    "NoIntersectionError",
    "PointOffWallError",
    "CollisionError",
    "QuadratureError",
    "NonSymmetricError",
    "EigensolverError",
    "MissingEigenvectorsError",
    "DegeneracyError",
    "WindowError",
    "StatisticsError",
    "ConfigError",
    "setup_logging",
    "attach_run_log",
    "detach_run_log",
    "area",
    "boundary_distance",
    "boundary_normal",
    "contains",
    "perimeter",
    "advance",
    "classical_hamiltonian",
    "evolve",
    "finite_tau_average",
    "lyapunov",
    "random_start",
    "time_average_O",
    "build_hamiltonian",
    "compute_spectrum",
    "eigensolve",
    "stability_check",
    "build_H_eps",
    "build_H_eps_tau",
    "choose_epsilon",
    "delta_O",
    "large_tau_deviation",
    "operator_matrix",
    "sweep_epsilon",
    "fit_report",
    "goe2x2_sample",
    "ks_distance",
    "pool",
    "poisson_cdf",
    "poisson_pdf",
    "unfold",
    "weyl_check",
    "wigner_cdf",
    "wigner_pdf",
]
