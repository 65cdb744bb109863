"""
Модели спектров и параметров возмущения.

Единицы: m = 1/2, hbar = 1, поэтому H = p^2 + V, а кинетические элементы
в синус-базисе равны pi^2 (n_x^2/W^2 + n_y^2/H^2).
"""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from typing_extensions import TypeAlias

from .shape import BilliardShape

FloatArray: TypeAlias = np.ndarray

MIN_BASIS_DIMENSION = 400
STEP_HEIGHT_FACTOR = 100.0


@dataclass(frozen=True)
class BasisSpec:
    """
    Усечённый синус-базис Дирихле на охватывающем прямоугольнике.

    Attributes:
        n_max_x: Число мод по x.
        n_max_y: Число мод по y.
        step_height: Высота ступенчатого потенциала V0. None означает
                     "выбрать автоматически" (см. resolve_step_height).
        keep_fraction: Доля уровней, которые могут попасть в статистику.
        allow_small: Разрешить размерность < 400 (только для тестов ядра).
    """

    n_max_x: int = 60
    n_max_y: int = 60
    step_height: Optional[float] = None
    keep_fraction: float = 0.25
    allow_small: bool = False

    def __post_init__(self):
        """Валидация параметров базиса."""
        if self.n_max_x < 1 or self.n_max_y < 1:
            raise ValueError("n_max_x и n_max_y должны быть >= 1")
        if not self.allow_small and self.dimension < MIN_BASIS_DIMENSION:
            raise ValueError(
                f"Размерность базиса {self.dimension} меньше минимальной {MIN_BASIS_DIMENSION}"
            )
        if not 0 < self.keep_fraction <= 1:
            raise ValueError(f"keep_fraction должен лежать в (0, 1], получено {self.keep_fraction}")
        if self.step_height is not None and self.step_height <= 0:
            raise ValueError(f"step_height должен быть > 0, получено {self.step_height}")

    @property
    def dimension(self) -> int:
        return self.n_max_x * self.n_max_y

    @property
    def keep_count(self) -> int:
        return int(self.keep_fraction * self.dimension)

    def quantum_numbers(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        Квантовые числа базисных состояний в порядке индексации матриц.

        Индекс состояния (n_x, n_y) равен (n_x - 1) * n_max_y + (n_y - 1).
        """
        nx, ny = np.meshgrid(
            np.arange(1, self.n_max_x + 1), np.arange(1, self.n_max_y + 1), indexing="ij"
        )
        return nx.ravel(), ny.ravel()

    def inflated(self, factor: float) -> "BasisSpec":
        """Базис, увеличенный в factor раз по каждой оси (с тем же V0)."""
        if factor <= 1:
            raise ValueError(f"Коэффициент раздувания должен быть > 1, получено {factor}")
        return replace(
            self,
            n_max_x=int(math.ceil(self.n_max_x * factor)),
            n_max_y=int(math.ceil(self.n_max_y * factor)),
        )

    def resolve_step_height(self, area: float) -> "BasisSpec":
        """
        Фиксирует V0 = 100 x верхняя энергия окна.

        Верхняя энергия оценивается по Вейлю: N(E) = area * E / (4 pi).
        """
        if self.step_height is not None:
            return self
        top_energy = 4 * math.pi * max(self.keep_count, 1) / area
        return replace(self, step_height=STEP_HEIGHT_FACTOR * top_energy)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_max_x": self.n_max_x,
            "n_max_y": self.n_max_y,
            "step_height": self.step_height,
            "keep_fraction": self.keep_fraction,
        }


@dataclass
class Spectrum:
    """
    Упорядоченный спектр с собственными векторами в синус-базисе.

    Attributes:
        energies: Собственные значения по возрастанию.
        eigenvectors: Ортонормированная матрица (столбцы = состояния) или None.
        shape: Форма, для которой посчитан спектр.
        basis: Базис (с разрешённым V0).
        stable_count: Число уровней, прошедших проверку устойчивости.
        degenerate: Найдены вырожденные уровни (разность < 1e-12 * mean energy).
        suspect: Запуск помечен как сомнительный (см. notes).
        notes: Человекочитаемые причины пометки suspect.
    """

    energies: FloatArray
    eigenvectors: Optional[FloatArray] = None
    shape: Optional[BilliardShape] = None
    basis: Optional[BasisSpec] = None
    stable_count: Optional[int] = None
    degenerate: bool = False
    suspect: bool = False
    notes: List[str] = field(default_factory=list)

    def __post_init__(self):
        """Проверка упорядоченности и согласованности размеров."""
        self.energies = np.asarray(self.energies, dtype=float)
        if self.energies.ndim != 1:
            raise ValueError("energies должен быть одномерным массивом")
        if np.any(np.diff(self.energies) < 0):
            raise ValueError("energies должны идти по возрастанию")
        if self.eigenvectors is not None and self.eigenvectors.shape[1] != self.energies.size:
            raise ValueError(
                f"Число собственных векторов ({self.eigenvectors.shape[1]}) "
                f"не совпадает с числом уровней ({self.energies.size})"
            )
        if self.stable_count is not None and not 0 <= self.stable_count <= self.energies.size:
            raise ValueError(f"stable_count={self.stable_count} вне диапазона уровней")

    @property
    def size(self) -> int:
        return int(self.energies.size)

    @property
    def stable_energies(self) -> FloatArray:
        """Уровни, допущенные в статистику (все, если устойчивость не проверялась)."""
        if self.stable_count is None:
            return self.energies
        return self.energies[: self.stable_count]

    def flag(self, note: str) -> None:
        """Помечает спектр как сомнительный."""
        self.suspect = True
        self.notes.append(note)


class StabilityCriterion(str, Enum):
    """
    Что считается дрейфом уровня при раздувании базиса.

    STRICT - полный сдвиг |E_k - E'_k|. PATTERN - сдвиг за вычетом его
    скользящей медианы по соседним уровням: гладкая часть сдвига (эффективное
    смещение стенки, которое недоразрешённая ступенька даёт всем уровням
    сразу) поглощается развёрткой и на расстояния не влияет.
    """

    STRICT = "strict"
    PATTERN = "pattern"


@dataclass
class StabilityReport:
    """
    Результат проверки устойчивости уровней к раздуванию базиса.

    Attributes:
        stable_count: Наибольшее K, при котором уровни 1..K устойчивы по criterion.
        drift: |E_k - E'_k| в единицах локального среднего расстояния.
        pattern_drift: Тот же сдвиг за вычетом скользящей медианы.
        spectrum: Спектр исходного базиса (stable_count уже выставлен).
        inflated_dimension: Размерность раздутого базиса.
        drift_monotone: Дрейф не убывает при усреднении по окнам из 50 уровней.
        criterion: Критерий, по которому посчитан stable_count.
        strict_count: stable_count по полному сдвигу (для отчёта).
    """

    stable_count: int
    drift: FloatArray
    spectrum: Spectrum
    inflated_dimension: int
    drift_monotone: bool = True
    pattern_drift: Optional[FloatArray] = None
    criterion: StabilityCriterion = StabilityCriterion.STRICT
    strict_count: Optional[int] = None


@dataclass
class OperatorMatrix:
    """
    Матрица <n|O|m> в собственном базисе H0.

    Attributes:
        elements: Симметричная матрица (безразмерная).
        levels: Число уровней H0, на которые сжат оператор.
        spectrum: Спектр, в базисе которого записан оператор.
    """

    elements: FloatArray
    levels: int
    spectrum: Optional[Spectrum] = None

    def __post_init__(self):
        """Проверка симметрии и ограниченности диагонали."""
        self.elements = np.asarray(self.elements, dtype=float)
        if self.elements.shape != (self.levels, self.levels):
            raise ValueError(
                f"Размер матрицы {self.elements.shape} не совпадает с levels={self.levels}"
            )
        asymmetry = float(np.max(np.abs(self.elements - self.elements.T))) if self.levels else 0.0
        if asymmetry >= 1e-10:
            raise ValueError(f"Матрица оператора несимметрична: max|O - O^T| = {asymmetry:.3e}")
        diagonal = self.diagonal
        if diagonal.size and (diagonal.min() < -1e-10 or diagonal.max() > 1 + 1e-10):
            raise ValueError("Диагональ оператора выходит за [0, 1]")

    @property
    def diagonal(self) -> FloatArray:
        return np.diag(self.elements)


class EpsilonRule(str, Enum):
    """Правило выбора силы возмущения."""

    EXPLICIT = "explicit"
    SQRT_EBAR_DELTA = "sqrt-Ebar-Delta"


@dataclass(frozen=True)
class PerturbParams:
    """
    Параметры построения H(eps, tau).

    Attributes:
        epsilon: Сила возмущения (обязательна для EXPLICIT).
        tau: Время усреднения; math.inf означает предел tau -> inf.
        epsilon_rule: Как выбирать epsilon.
    """

    epsilon: Optional[float] = None
    tau: float = math.inf
    epsilon_rule: EpsilonRule = EpsilonRule.SQRT_EBAR_DELTA

    def __post_init__(self):
        """Валидация параметров возмущения."""
        if self.epsilon is not None and self.epsilon < 0:
            raise ValueError(f"epsilon должен быть >= 0, получено {self.epsilon}")
        if not self.tau > 0:
            raise ValueError(f"tau должен быть > 0 или бесконечностью, получено {self.tau}")
        if self.epsilon_rule == EpsilonRule.EXPLICIT and self.epsilon is None:
            raise ValueError("epsilon_rule=explicit требует явного значения epsilon")

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.tau)

    def with_epsilon(self, epsilon: float) -> "PerturbParams":
        return replace(self, epsilon=epsilon)

    def with_tau(self, tau: float) -> "PerturbParams":
        return replace(self, tau=tau)


@dataclass(frozen=True)
class EpsilonChoice:
    """
    Выбор eps = sqrt(Ebar * Delta) и диагностика условия E >> eps*delta_O >> Delta.

    Attributes:
        epsilon: Выбранная сила возмущения.
        mean_energy: Средняя энергия окна (Ebar).
        mean_spacing: Среднее расстояние между уровнями окна (Delta).
        delta_o: Масштаб флуктуаций <n|O|n> (None, если оператор не передан).
    """

    epsilon: float
    mean_energy: float
    mean_spacing: float
    delta_o: Optional[float] = None

    @property
    def fluctuation_to_spacing(self) -> Optional[float]:
        """eps * delta_O / Delta (должно быть >> 1)."""
        if self.delta_o is None:
            return None
        return self.epsilon * self.delta_o / self.mean_spacing

    @property
    def energy_to_fluctuation(self) -> Optional[float]:
        """Ebar / (eps * delta_O) (должно быть >> 1)."""
        if self.delta_o is None or self.delta_o == 0:
            return None
        return self.mean_energy / (self.epsilon * self.delta_o)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "mean_energy": self.mean_energy,
            "mean_spacing": self.mean_spacing,
            "delta_O": self.delta_o,
            "ratio_eps_deltaO_over_Delta": self.fluctuation_to_spacing,
            "ratio_Ebar_over_eps_deltaO": self.energy_to_fluctuation,
        }


@dataclass
class PerturbedSpectrum:
    """
    Спектр H(eps) = H0 + eps * diag(<n|O|n>).

    Attributes:
        energies: Сдвинутые уровни, заново отсортированные по возрастанию.
        order: Для каждого отсортированного уровня - индекс состояния H0.
        base: Исходный спектр H0 (собственные векторы общие).
        params: Параметры возмущения (epsilon разрешён).
    """

    energies: FloatArray
    order: np.ndarray
    base: Spectrum
    params: PerturbParams

    @property
    def eigenvectors(self) -> Optional[FloatArray]:
        """Собственные векторы H0: тот же объект, H(eps) с H0 коммутирует."""
        return self.base.eigenvectors

    @property
    def epsilon(self) -> float:
        return float(self.params.epsilon or 0.0)

    @property
    def size(self) -> int:
        return int(self.energies.size)
