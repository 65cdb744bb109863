"""
Геометрия биллиарда с двумя параболическими стенками.

Запросы принадлежности, пересечения луча со стенками, нормали и площади.
Используется и классической динамикой, и сборкой квантового гамильтониана.
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy import integrate, optimize

from models import BilliardShape, Wall
from core.errors import NoIntersectionError, PointOffWallError

logger = logging.getLogger(__name__)

# Относительный допуск "точка на стенке" (в единицах диагонали)
WALL_TOLERANCE = 1e-8
# Минимальный пробег от только что задетой стенки (в единицах диагонали)
SKIP_DISTANCE = 1e-9


def contains(shape: BilliardShape, point) -> bool:
    """
    Проверяет, лежит ли точка строго внутри биллиарда.

    Граница считается внешней (условие Дирихле).
    Принимает и массив точек формы (..., 2) - тогда возвращает массив bool.

    Example:
        >>> shape = BilliardShape(1.0, 1.13, 0.2, 0.4, 0.3, 0.6)
        >>> contains(shape, (0.01, 0.01))
        True
    """
    p = np.asarray(point, dtype=float)
    x, y = p[..., 0], p[..., 1]
    inside = (
        (x > 0)
        & (y > 0)
        & (x < shape.right_wall_x(y))
        & (y < shape.top_wall_y(x))
    )
    if np.ndim(inside) == 0:
        return bool(inside)
    return inside


def _smallest_root_above(a: float, b: float, c: float, t_min: float) -> Optional[float]:
    """Наименьший вещественный корень a t^2 + b t + c = 0, больший t_min."""
    roots = []
    if a == 0.0:
        if b != 0.0:
            roots.append(-c / b)
    else:
        disc = b * b - 4.0 * a * c
        if disc < 0.0:
            return None
        sq = math.sqrt(disc)
        q = -0.5 * (b + math.copysign(sq, b))
        if q != 0.0:
            roots.extend((q / a, c / q))
        else:
            roots.append(0.0)
    candidates = [t for t in roots if t > t_min]
    return min(candidates) if candidates else None


def boundary_distance(
    shape: BilliardShape,
    point,
    direction,
    skip_wall: Optional[Wall] = None,
) -> Tuple[float, Wall]:
    """
    Расстояние до первой стенки вдоль луча.

    Область - пересечение четырёх областей {x > 0}, {y > 0}, {F1 < 0}, {F2 < 0},
    поэтому выход из неё - первое обращение в ноль любой из четырёх функций.
    Для парабол это корни квадратного уравнения по параметру луча.

    Args:
        shape: Форма биллиарда.
        point: Стартовая точка (внутри области или на стенке skip_wall).
        direction: Единичный вектор направления.
        skip_wall: Стенка, от которой луч только что отразился; её корень
                   вблизи нуля игнорируется.

    Returns:
        (пробег, стенка).

    Raises:
        NoIntersectionError: Если не найдено ни одного положительного корня.

    Example:
        >>> boundary_distance(shape, (0.5, 0.5), (-1.0, 0.0))
        (0.5, <Wall.LEFT: 'left'>)
    """
    x, y = float(point[0]), float(point[1])
    dx, dy = float(direction[0]), float(direction[1])
    skip = SKIP_DISTANCE * shape.diagonal

    def floor(wall: Wall) -> float:
        return skip if wall == skip_wall else 0.0

    hits = []

    if dx < 0.0:
        t = -x / dx
        if t > floor(Wall.LEFT):
            hits.append((t, Wall.LEFT))
    if dy < 0.0:
        t = -y / dy
        if t > floor(Wall.BOTTOM):
            hits.append((t, Wall.BOTTOM))

    c1, a1 = shape.curvature1, shape.offset1
    t = _smallest_root_above(
        c1 * dy * dy,
        dx + 2.0 * c1 * (y - a1) * dy,
        x - shape.width + c1 * (y - a1) ** 2,
        floor(Wall.PARABOLA_RIGHT),
    )
    if t is not None:
        hits.append((t, Wall.PARABOLA_RIGHT))

    c2, a2 = shape.curvature2, shape.offset2
    t = _smallest_root_above(
        c2 * dx * dx,
        dy + 2.0 * c2 * (x - a2) * dx,
        y - shape.height + c2 * (x - a2) ** 2,
        floor(Wall.PARABOLA_TOP),
    )
    if t is not None:
        hits.append((t, Wall.PARABOLA_TOP))

    if not hits:
        raise NoIntersectionError(
            f"Луч из ({x:.6g}, {y:.6g}) в направлении ({dx:.6g}, {dy:.6g}) "
            f"не пересёк ни одной стенки формы '{shape.name}'"
        )
    return min(hits, key=lambda hit: hit[0])


def wall_residual(shape: BilliardShape, wall: Wall, point) -> float:
    """
    Расстояние (в первом порядке) от точки до стенки: |F| / |grad F|.
    """
    x, y = float(point[0]), float(point[1])
    if wall == Wall.LEFT:
        return abs(x)
    if wall == Wall.BOTTOM:
        return abs(y)
    if wall == Wall.PARABOLA_RIGHT:
        c1, a1 = shape.curvature1, shape.offset1
        value = x - shape.width + c1 * (y - a1) ** 2
        return abs(value) / math.hypot(1.0, 2.0 * c1 * (y - a1))
    c2, a2 = shape.curvature2, shape.offset2
    value = y - shape.height + c2 * (x - a2) ** 2
    return abs(value) / math.hypot(2.0 * c2 * (x - a2), 1.0)


def boundary_normal(shape: BilliardShape, wall: Wall, point) -> np.ndarray:
    """
    Внутренняя единичная нормаль к стенке в точке.

    Для параболы x = W - c1 (y - a1)^2 это -grad F / |grad F|,
    где F(x, y) = x - W + c1 (y - a1)^2 (F растёт наружу).

    Raises:
        PointOffWallError: Если точка дальше допуска от стенки.

    Example:
        >>> boundary_normal(shape, Wall.PARABOLA_RIGHT, (1.0, 0.4))
        array([-1., -0.])
    """
    tolerance = WALL_TOLERANCE * shape.diagonal
    residual = wall_residual(shape, wall, point)
    if residual > tolerance:
        raise PointOffWallError(
            f"Точка ({point[0]:.6g}, {point[1]:.6g}) удалена от стенки {wall.value} "
            f"на {residual:.3e} (допуск {tolerance:.1e})"
        )

    x, y = float(point[0]), float(point[1])
    if wall == Wall.LEFT:
        return np.array([1.0, 0.0])
    if wall == Wall.BOTTOM:
        return np.array([0.0, 1.0])
    if wall == Wall.PARABOLA_RIGHT:
        gradient = np.array([1.0, 2.0 * shape.curvature1 * (y - shape.offset1)])
    else:
        gradient = np.array([2.0 * shape.curvature2 * (x - shape.offset2), 1.0])
    return -gradient / np.linalg.norm(gradient)


def corner_overlap(shape: BilliardShape) -> Optional[Tuple[float, float, float]]:
    """
    Границы углового участка, исключённого обоими разрезами.

    На высоте y перекрытие - это x в [max(x0(y), a2 + r(y)), W], где
    x0 - правая стенка, r(y) = sqrt((H - y) / c2). Нижняя граница по x
    переключается с верхней параболы на правую в точке пересечения стенок.

    Returns:
        (y_start, y_cross, height) или None, если перекрытия нет.
    """
    if shape.curvature1 == 0 or shape.curvature2 == 0:
        return None
    y_start = shape.top_wall_y(shape.width)
    if y_start >= shape.height:
        return None

    def gap(y: float) -> float:
        return shape.right_wall_x(y) - shape.offset2 - math.sqrt(
            max(shape.height - y, 0.0) / shape.curvature2
        )

    y_cross = optimize.brentq(gap, y_start, shape.height, xtol=1e-14, rtol=1e-14)
    return y_start, y_cross, shape.height


def overlap_lower_x(shape: BilliardShape, y):
    """Левая граница углового перекрытия на высоте y (векторизовано)."""
    y = np.asarray(y, dtype=float)
    r = np.sqrt(np.maximum(shape.height - y, 0.0) / shape.curvature2)
    return np.minimum(np.maximum(shape.right_wall_x(y), shape.offset2 + r), shape.width)


def area(shape: BilliardShape) -> float:
    """
    Точная площадь биллиарда.

    Площадь прямоугольника минус два параболических сегмента (замкнутые
    полиномиальные интегралы) плюс угловое перекрытие (одномерная квадратура),
    которое иначе вычиталось бы дважды.

    Example:
        >>> area(BilliardShape(1.0, 1.0, 0.3, 0.5, 0.0, 0.5, test_mode=True))
        0.975
    """
    W, H = shape.width, shape.height
    c1, a1, c2, a2 = shape.curvature1, shape.offset1, shape.curvature2, shape.offset2

    right_segment = c1 * ((H - a1) ** 3 + a1**3) / 3.0
    top_segment = c2 * ((W - a2) ** 3 + a2**3) / 3.0

    overlap_area = 0.0
    bounds = corner_overlap(shape)
    if bounds is not None:
        y_start, y_cross, y_end = bounds
        overlap_area, _ = integrate.quad(
            lambda y: W - float(overlap_lower_x(shape, y)),
            y_start,
            y_end,
            points=[y_cross],
            epsabs=1e-14,
            epsrel=1e-12,
            limit=200,
        )

    result = W * H - right_segment - top_segment + overlap_area
    logger.debug(
        f"🔍 Площадь '{shape.name}': {result:.10f} (перекрытие {overlap_area:.3e})"
    )
    return float(result)


def _arc_length(curvature: float, vertex: float, lower: float, upper: float) -> float:
    """Длина дуги t -> c (t - a)^2 на отрезке [lower, upper] (замкнутая форма)."""
    if curvature == 0:
        return upper - lower

    def primitive(u: float) -> float:
        return 0.5 * (u * math.sqrt(1.0 + u * u) + math.asinh(u))

    scale = 2.0 * curvature
    return (primitive(scale * (upper - vertex)) - primitive(scale * (lower - vertex))) / scale


def wall_meeting(shape: BilliardShape) -> Tuple[float, float]:
    """
    Точка, где правая стенка встречает верхнюю.

    Ищется корень y - top_wall_y(right_wall_x(y)) на [0, H]: в нуле он
    отрицателен, на высоте H неотрицателен.
    """

    def gap(y: float) -> float:
        return y - float(shape.top_wall_y(shape.right_wall_x(y)))

    if gap(shape.height) <= 0:
        y_meet = shape.height
    else:
        y_meet = optimize.brentq(gap, 0.0, shape.height, xtol=1e-14, rtol=1e-14)
    return float(shape.right_wall_x(y_meet)), float(y_meet)


def perimeter(shape: BilliardShape) -> float:
    """
    Длина границы биллиарда.

    Две прямые стенки до пересечения с параболами плюс две параболические
    дуги до точки встречи (wall_meeting).

    Example:
        >>> perimeter(BilliardShape(1.0, 2.0, 0.0, 1.0, 0.0, 0.5, test_mode=True))
        6.0
    """
    x_meet, y_meet = wall_meeting(shape)
    bottom = float(shape.right_wall_x(0.0))
    left = float(shape.top_wall_y(0.0))
    right = _arc_length(shape.curvature1, shape.offset1, 0.0, y_meet)
    top = _arc_length(shape.curvature2, shape.offset2, 0.0, x_meet)
    result = bottom + left + right + top
    logger.debug(f"🔍 Периметр '{shape.name}': {result:.10f}")
    return float(result)
