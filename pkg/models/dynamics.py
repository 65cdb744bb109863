"""
Модели классической динамики биллиарда.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .shape import Wall


@dataclass(frozen=True)
class TrajectoryState:
    """
    Точка фазового пространства (q, p) с учётом столкновений.

    Attributes:
        position: Положение (2-вектор).
        momentum: Импульс (2-вектор), |p| сохраняется вдоль траектории.
        elapsed: Время, прошедшее от старта.
        collisions: Число столкновений от старта.
        wall: Стенка последнего столкновения (None для внутренней точки).
    """

    position: np.ndarray
    momentum: np.ndarray
    elapsed: float = 0.0
    collisions: int = 0
    wall: Optional[Wall] = None

    def __post_init__(self):
        """Приведение к float-массивам и проверка размерности."""
        position = np.asarray(self.position, dtype=float)
        momentum = np.asarray(self.momentum, dtype=float)
        if position.shape != (2,) or momentum.shape != (2,):
            raise ValueError("position и momentum должны быть 2-векторами")
        object.__setattr__(self, "position", position)
        object.__setattr__(self, "momentum", momentum)

    @property
    def speed(self) -> float:
        return float(np.hypot(self.momentum[0], self.momentum[1]))

    @property
    def direction(self) -> np.ndarray:
        return self.momentum / self.speed

    def reversed(self) -> "TrajectoryState":
        """То же состояние с обращённым импульсом (отсчёт времени с нуля)."""
        return TrajectoryState(self.position, -self.momentum, 0.0, 0, self.wall)


@dataclass
class LyapunovEstimate:
    """
    Оценка старшего показателя Ляпунова.

    Attributes:
        exponent: Показатель на единицу времени.
        per_collision_exponent: exponent x среднее время свободного пробега.
        horizon: Число столкновений.
        convergence_trace: Текущая оценка (на столкновение) после каждого удвоения горизонта.
    """

    exponent: float
    per_collision_exponent: float
    horizon: int
    convergence_trace: List[float] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        """Последние две оценки трассы различаются меньше чем на 10%."""
        if len(self.convergence_trace) < 2:
            return False
        previous, last = self.convergence_trace[-2], self.convergence_trace[-1]
        if abs(last) < 1e-3 and abs(previous) < 1e-3:
            return True
        return abs(last - previous) < 0.1 * abs(last)
