"""
Модели статистики расстояний между уровнями.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np

UNFOLDED_MEAN_RTOL = 0.02


@dataclass
class SpacingSample:
    """
    Развёрнутые (unfolded) расстояния между соседними уровнями.

    Attributes:
        spacings: S_i >= 0, среднее около 1.
        source_id: Откуда выборка (система, спектр).
        window: Диапазон индексов уровней (start, stop), вошедших в выборку.
        sources: Источники после объединения (pool) - по одному на исходную выборку.
    """

    spacings: np.ndarray
    source_id: str = ""
    window: Tuple[int, int] = (0, 0)
    sources: List[str] = field(default_factory=list)

    def __post_init__(self):
        """Проверка неотрицательности."""
        self.spacings = np.asarray(self.spacings, dtype=float).ravel()
        if np.any(self.spacings < 0):
            raise ValueError("Расстояния между уровнями не могут быть отрицательными")
        if not self.sources and self.source_id:
            self.sources = [self.source_id]

    @property
    def size(self) -> int:
        return int(self.spacings.size)

    @property
    def mean(self) -> float:
        return float(self.spacings.mean()) if self.size else float("nan")

    def is_unfolded(self, rtol: float = UNFOLDED_MEAN_RTOL) -> bool:
        """Среднее расстояние равно 1 с точностью rtol."""
        return self.size > 0 and abs(self.mean - 1.0) <= rtol


@dataclass
class FitReport:
    """
    Сравнение выборки с распределениями Пуассона и Вигнера.

    Attributes:
        ks_poisson: Расстояние Колмогорова-Смирнова до 1 - exp(-s).
        ks_wigner: Расстояние Колмогорова-Смирнова до 1 - exp(-pi s^2 / 4).
        chi2_poisson, chi2_wigner: Вторичная статистика хи-квадрат по гистограмме.
        bin_edges, densities: Гистограмма (нормирована на 1).
        sample_size: Размер выборки.
        small_spacing_fraction: Доля расстояний s < 0.1 (маркер отталкивания уровней).
        source_id: Имя выборки.
    """

    ks_poisson: float
    ks_wigner: float
    chi2_poisson: float
    chi2_wigner: float
    bin_edges: np.ndarray
    densities: np.ndarray
    sample_size: int
    small_spacing_fraction: float
    source_id: str = ""

    @property
    def preferred_model(self) -> str:
        return "wigner" if self.ks_wigner < self.ks_poisson else "poisson"

    def to_dict(self) -> Dict[str, Any]:
        """Словарь для JSON-отчёта."""
        return {
            "source_id": self.source_id,
            "sample_size": self.sample_size,
            "ks_poisson": self.ks_poisson,
            "ks_wigner": self.ks_wigner,
            "chi2_poisson": self.chi2_poisson,
            "chi2_wigner": self.chi2_wigner,
            "small_spacing_fraction": self.small_spacing_fraction,
            "preferred_model": self.preferred_model,
            "bin_edges": [float(edge) for edge in self.bin_edges],
            "densities": [float(value) for value in self.densities],
        }
