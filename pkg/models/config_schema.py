"""
Модели конфигурации запуска.

Этот модуль определяет структуру JSON конфигурации эксперимента
и проверяет её инварианты.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from .shape import BilliardShape
from .spectra import BasisSpec, EpsilonRule, PerturbParams, StabilityCriterion


@dataclass
class PerturbSettings:
    """
    Настройки построения H(eps).

    Attributes:
        epsilon_rule: explicit или sqrt-Ebar-Delta.
        epsilon: Явное значение eps (для explicit).
        tau: Время усреднения (inf - предел tau -> inf).
        delta_window: Число разностей N в delta_O.
        sweep_factors: Множители f для перебора eps = f * sqrt(Ebar * Delta).
        consistency_window: Число уровней для проверки большого tau.
        consistency_tau_factor: tau = factor / Delta в проверке большого tau.
    """

    epsilon_rule: EpsilonRule = EpsilonRule.SQRT_EBAR_DELTA
    epsilon: Optional[float] = None
    tau: float = math.inf
    delta_window: int = 50
    sweep_factors: List[float] = field(default_factory=lambda: [0.05, 0.2, 1.0, 3.0])
    consistency_window: int = 200
    consistency_tau_factor: float = 1e4

    def __post_init__(self):
        """Валидация после инициализации."""
        self.epsilon_rule = EpsilonRule(self.epsilon_rule)
        if self.delta_window < 1:
            raise ValueError("perturb.delta_window должен быть >= 1")
        if self.consistency_window < 2:
            raise ValueError("perturb.consistency_window должен быть >= 2")
        if any(factor <= 0 for factor in self.sweep_factors):
            raise ValueError("perturb.sweep_factors должны быть > 0")
        self.params()

    def params(self) -> PerturbParams:
        return PerturbParams(epsilon=self.epsilon, tau=self.tau, epsilon_rule=self.epsilon_rule)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilon_rule": self.epsilon_rule.value,
            "epsilon": self.epsilon,
            "tau": None if math.isinf(self.tau) else self.tau,
            "delta_window": self.delta_window,
            "sweep_factors": list(self.sweep_factors),
            "consistency_window": self.consistency_window,
            "consistency_tau_factor": self.consistency_tau_factor,
        }


@dataclass
class StatsSettings:
    """
    Настройки статистики уровней.

    Attributes:
        unfold_window: Полуширина w окна локального среднего расстояния.
        histogram_bins: Число бинов гистограммы.
        histogram_max: Правая граница гистограммы (в единицах Delta).
    """

    unfold_window: int = 25
    histogram_bins: int = 25
    histogram_max: float = 4.0

    def __post_init__(self):
        """Валидация после инициализации."""
        if self.unfold_window < 1:
            raise ValueError("stats.unfold_window должен быть >= 1")
        if self.histogram_bins < 1:
            raise ValueError("stats.histogram_bins должен быть >= 1")
        if self.histogram_max <= 0:
            raise ValueError("stats.histogram_max должен быть > 0")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "unfold_window": self.unfold_window,
            "histogram_bins": self.histogram_bins,
            "histogram_max": self.histogram_max,
        }


@dataclass
class ClassicalSettings:
    """
    Настройки классической проверки хаоса.

    Attributes:
        n_collisions: Длина траекторий для усреднения O_class.
        lyapunov_collisions: Горизонт оценки показателя Ляпунова.
        trajectories: Число случайных стартов на форму.
        speed: Модуль импульса |p|.
    """

    n_collisions: int = 10_000
    lyapunov_collisions: int = 8_192
    trajectories: int = 2
    speed: float = 1.0

    def __post_init__(self):
        """Валидация после инициализации."""
        if self.n_collisions < 1000:
            raise ValueError("classical.n_collisions должен быть >= 1000")
        if self.lyapunov_collisions < 1000:
            raise ValueError("classical.lyapunov_collisions должен быть >= 1000")
        if self.trajectories < 1:
            raise ValueError("classical.trajectories должен быть >= 1")
        if self.speed <= 0:
            raise ValueError("classical.speed должен быть > 0")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_collisions": self.n_collisions,
            "lyapunov_collisions": self.lyapunov_collisions,
            "trajectories": self.trajectories,
            "speed": self.speed,
        }


@dataclass
class RunConfig:
    """
    Корневая конфигурация эксперимента.

    Attributes:
        shapes: Формы биллиарда (хотя бы одна).
        seed: Зерно генератора (обязательное поле).
        basis: Параметры синус-базиса.
        perturb: Настройки H(eps).
        stats: Настройки статистики.
        classical: Настройки классической динамики.
        output_dir: Директория отчёта.
        test_mode: Разрешить вырожденные формы.
        workers: Число процессов для форм.
        inflation: Коэффициент раздувания базиса в проверке устойчивости.
        stability: Критерий устойчивости уровней (pattern или strict).
        save_eigenvectors: Сохранять собственные векторы в отдельный файл.
        dump_collisions: Сохранять таблицу столкновений первой траектории.

    Example JSON:
        {
            "seed": 20240611,
            "output_dir": "runs/default",
            "shapes": [{"preset": "ensemble_a"}],
            "basis": {"n_max_x": 60, "n_max_y": 60, "keep_fraction": 0.25}
        }
    """

    shapes: List[BilliardShape]
    seed: int
    basis: BasisSpec = field(default_factory=BasisSpec)
    perturb: PerturbSettings = field(default_factory=PerturbSettings)
    stats: StatsSettings = field(default_factory=StatsSettings)
    classical: ClassicalSettings = field(default_factory=ClassicalSettings)
    output_dir: str = "runs/default"
    test_mode: bool = False
    workers: int = 1
    inflation: float = 1.25
    stability: StabilityCriterion = StabilityCriterion.PATTERN
    save_eigenvectors: bool = False
    dump_collisions: bool = False

    def __post_init__(self):
        """Валидация после инициализации."""
        if not self.shapes:
            raise ValueError("shapes не может быть пустым списком")
        names = [shape.name for shape in self.shapes]
        duplicates = sorted({name for name in names if names.count(name) > 1})
        if duplicates:
            raise ValueError(f"Имена форм должны быть уникальны: {', '.join(duplicates)}")
        if not self.test_mode and any(shape.test_mode for shape in self.shapes):
            raise ValueError("Вырожденные формы допустимы только при test_mode")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ValueError("seed должен быть целым числом")
        if self.workers < 1:
            raise ValueError("workers должен быть >= 1")
        if self.inflation <= 1:
            raise ValueError("inflation должен быть > 1")
        self.stability = StabilityCriterion(self.stability)

    def to_dict(self) -> Dict[str, Any]:
        """Эхо конфигурации для манифеста."""
        return {
            "seed": self.seed,
            "output_dir": self.output_dir,
            "test_mode": self.test_mode,
            "workers": self.workers,
            "inflation": self.inflation,
            "stability": self.stability.value,
            "save_eigenvectors": self.save_eigenvectors,
            "dump_collisions": self.dump_collisions,
            "shapes": [shape.to_dict() for shape in self.shapes],
            "basis": self.basis.to_dict(),
            "perturb": self.perturb.to_dict(),
            "stats": self.stats.to_dict(),
            "classical": self.classical.to_dict(),
        }
