"""
Unit тесты для геометрии биллиарда.

Тестирует contains, boundary_distance, boundary_normal, area.
"""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import integrate

from models import BilliardShape, Wall
from core.errors import NoIntersectionError, PointOffWallError
from core.geometry import (
    area,
    boundary_distance,
    boundary_normal,
    contains,
    corner_overlap,
    perimeter,
    wall_meeting,
    wall_residual,
)

CHAOTIC = BilliardShape(1.0, 1.13, 0.20, 0.40, 0.30, 0.60, name="chaotic")

unit_interval = st.floats(min_value=0.001, max_value=0.999)
angles = st.floats(min_value=0.0, max_value=2 * math.pi, exclude_max=True)


class TestContains:
    """Тесты для contains."""

    def test_interior_point(self, chaotic_shape):
        """Точка у левого нижнего угла лежит внутри."""
        assert contains(chaotic_shape, (0.01, 0.01))

    def test_cut_corner_is_outside(self, chaotic_shape):
        """Правый верхний угол вырезан параболами."""
        assert not contains(chaotic_shape, (0.99, 1.10))
        assert not contains(chaotic_shape, (0.995, 0.01))

    def test_boundary_is_outside(self, chaotic_shape):
        """Граница не принадлежит области (условие Дирихле)."""
        assert not contains(chaotic_shape, (0.0, 0.5))
        assert not contains(chaotic_shape, (1.0, 0.40))

    def test_vectorized(self, chaotic_shape):
        """Массив точек даёт массив bool."""
        mask = contains(chaotic_shape, np.array([[0.5, 0.5], [2.0, 0.5]]))
        assert mask.tolist() == [True, False]


class TestBoundaryDistance:
    """Тесты для boundary_distance."""

    def test_left_wall(self, chaotic_shape):
        """Луч влево из центра упирается в левую стенку."""
        distance, wall = boundary_distance(chaotic_shape, (0.5, 0.5), (-1.0, 0.0))
        assert wall == Wall.LEFT
        assert distance == pytest.approx(0.5)

    def test_parabola_vertex(self, chaotic_shape):
        """Луч вправо на высоте вершины попадает в вершину правой параболы."""
        distance, wall = boundary_distance(chaotic_shape, (0.5, 0.40), (1.0, 0.0))
        assert wall == Wall.PARABOLA_RIGHT
        assert distance == pytest.approx(0.5)

    def test_top_parabola(self, chaotic_shape):
        """Луч вверх на x = a2 попадает в вершину верхней параболы."""
        distance, wall = boundary_distance(chaotic_shape, (0.60, 0.13), (0.0, 1.0))
        assert wall == Wall.PARABOLA_TOP
        assert distance == pytest.approx(1.0)

    def test_skip_wall_ignores_start_root(self, chaotic_shape):
        """Отражённый от стенки луч не находит ту же стенку в нуле."""
        distance, wall = boundary_distance(
            chaotic_shape, (0.0, 0.5), (1.0, 0.0), skip_wall=Wall.LEFT
        )
        assert wall == Wall.PARABOLA_RIGHT
        assert distance == pytest.approx(1.0 - 0.2 * 0.01)

    def test_outward_ray_from_outside_raises(self):
        """Луч, уходящий от прямоугольника, ни во что не попадает."""
        box = BilliardShape(1.0, 1.0, 0.0, 0.5, 0.0, 0.5, test_mode=True)
        with pytest.raises(NoIntersectionError):
            boundary_distance(box, (2.0, 2.0), np.array([1.0, 1.0]) / np.sqrt(2.0))

    @settings(max_examples=200, deadline=None)
    @given(x=unit_interval, y=unit_interval, angle=angles)
    def test_hit_point_lies_on_reported_wall(self, x, y, angle):
        """Точка попадания лежит на названной стенке, середина хорды внутри."""
        start = np.array([x, y * CHAOTIC.height])
        assume(contains(CHAOTIC, start))
        direction = np.array([math.cos(angle), math.sin(angle)])

        distance, wall = boundary_distance(CHAOTIC, start, direction)
        hit = start + distance * direction

        assert distance > 0
        assert wall_residual(CHAOTIC, wall, hit) < 1e-10
        # Область выпукла: вся хорда лежит внутри
        assert contains(CHAOTIC, start + 0.5 * distance * direction)


class TestBoundaryNormal:
    """Тесты для boundary_normal."""

    def test_vertex_normal(self, chaotic_shape):
        """Нормаль в вершине правой параболы направлена влево."""
        normal = boundary_normal(chaotic_shape, Wall.PARABOLA_RIGHT, (1.0, 0.40))
        assert normal == pytest.approx([-1.0, 0.0])

    def test_flat_walls(self, chaotic_shape):
        """Нормали прямых стенок смотрят внутрь."""
        assert boundary_normal(chaotic_shape, Wall.LEFT, (0.0, 0.3)).tolist() == [1.0, 0.0]
        assert boundary_normal(chaotic_shape, Wall.BOTTOM, (0.3, 0.0)).tolist() == [0.0, 1.0]

    def test_off_wall_raises(self, chaotic_shape):
        """Точка вдали от стенки - ошибка."""
        with pytest.raises(PointOffWallError, match="удалена от стенки"):
            boundary_normal(chaotic_shape, Wall.PARABOLA_RIGHT, (0.9, 0.40))

    @settings(max_examples=100, deadline=None)
    @given(x=st.floats(min_value=0.05, max_value=0.9))
    def test_top_normal_is_unit_and_inward(self, x):
        """Нормаль верхней параболы единичная и смотрит внутрь."""
        point = np.array([x, CHAOTIC.top_wall_y(x)])
        assume(CHAOTIC.right_wall_x(point[1]) > x + 1e-3)
        normal = boundary_normal(CHAOTIC, Wall.PARABOLA_TOP, point)

        assert np.linalg.norm(normal) == pytest.approx(1.0)
        assert contains(CHAOTIC, point + 1e-4 * normal)

    @settings(max_examples=100, deadline=None)
    @given(y=st.floats(min_value=0.02, max_value=0.9))
    def test_right_normal_orthogonal_to_tangent(self, y):
        """Нормаль правой параболы ортогональна конечно-разностной касательной."""
        h = 1e-6
        point = np.array([CHAOTIC.right_wall_x(y), y])
        tangent = np.array([CHAOTIC.right_wall_x(y + h) - CHAOTIC.right_wall_x(y - h), 2 * h])
        normal = boundary_normal(CHAOTIC, Wall.PARABOLA_RIGHT, point)

        assert abs(float(normal @ tangent)) / np.linalg.norm(tangent) < 1e-6


class TestArea:
    """Тесты для area."""

    def test_rectangle(self, reference_box):
        """Площадь прямоугольника без разрезов."""
        assert area(reference_box) == pytest.approx(1.13)

    def test_single_segment_closed_form(self):
        """Один параболический сегмент вычитается точно."""
        shape = BilliardShape(1.0, 1.0, 0.3, 0.5, 0.0, 0.5, test_mode=True)
        assert area(shape) == pytest.approx(0.975, abs=1e-12)

    def test_corner_overlap_exists(self, chaotic_shape):
        """У стандартной формы оба разреза задевают правый верхний угол."""
        bounds = corner_overlap(chaotic_shape)
        assert bounds is not None
        y_start, y_cross, y_end = bounds
        assert y_start < y_cross < y_end == chaotic_shape.height

    def test_matches_grid_count(self, chaotic_shape):
        """Площадь совпадает с подсчётом точек сетки."""
        n = 2000
        xs = (np.arange(n) + 0.5) / n * chaotic_shape.width
        ys = (np.arange(n) + 0.5) / n * chaotic_shape.height
        grid = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1)
        estimate = contains(chaotic_shape, grid).mean() * chaotic_shape.width * chaotic_shape.height

        assert area(chaotic_shape) == pytest.approx(estimate, abs=2e-4)

    def test_area_scales_with_size(self):
        """Подобное растяжение в 2 раза умножает площадь на 4."""
        small = BilliardShape(1.0, 1.13, 0.20, 0.40, 0.30, 0.60)
        large = BilliardShape(2.0, 2.26, 0.10, 0.80, 0.15, 1.20)
        assert area(large) == pytest.approx(4 * area(small), rel=1e-9)

    @settings(max_examples=50, deadline=None)
    @given(c1=st.floats(min_value=0.05, max_value=0.25))
    def test_area_decreases_with_curvature(self, c1):
        """Большая кривизна правой стенки вырезает больше площади."""
        flat = BilliardShape(1.0, 1.13, c1, 0.40, 0.30, 0.60)
        curved = BilliardShape(1.0, 1.13, c1 + 0.02, 0.40, 0.30, 0.60)
        assert area(curved) < area(flat)


def _boundary_polygon(shape, points=20001):
    """Ломаная вдоль границы: низ, правая дуга, верхняя дуга в обратную сторону, левая стенка."""
    x_meet, y_meet = wall_meeting(shape)
    ys = np.linspace(0.0, y_meet, points)
    xs = np.linspace(x_meet, 0.0, points)
    right = np.column_stack([shape.right_wall_x(ys), ys])
    top = np.column_stack([xs, shape.top_wall_y(xs)])
    return np.vstack([[0.0, 0.0], right, top, [0.0, 0.0]])


class TestPerimeter:
    """Тесты для perimeter и wall_meeting."""

    def test_rectangle(self, reference_box):
        """Периметр прямоугольника 2 (W + H)."""
        assert perimeter(reference_box) == pytest.approx(2 * (1.0 + 1.13), abs=1e-12)

    def test_single_parabola_arc(self):
        """Одна параболическая стенка: длина дуги совпадает с квадратурой."""
        shape = BilliardShape(1.0, 1.0, 0.3, 0.4, 0.0, 0.5, test_mode=True)
        arc, _ = integrate.quad(lambda y: math.sqrt(1 + (2 * 0.3 * (y - 0.4)) ** 2), 0.0, 1.0)
        expected = shape.right_wall_x(0.0) + 1.0 + arc + shape.right_wall_x(1.0)

        assert perimeter(shape) == pytest.approx(expected, abs=1e-10)

    def test_walls_meet_on_both_parabolas(self, chaotic_shape):
        """Точка встречи лежит на обеих параболах."""
        x, y = wall_meeting(chaotic_shape)

        assert x == pytest.approx(chaotic_shape.right_wall_x(y), abs=1e-12)
        assert y == pytest.approx(chaotic_shape.top_wall_y(x), abs=1e-12)
        assert 0 < x < chaotic_shape.width and 0 < y < chaotic_shape.height

    def test_matches_dense_polygon(self, chaotic_shape):
        """Периметр и площадь совпадают с плотной ломаной по границе."""
        polygon = _boundary_polygon(chaotic_shape)
        edges = np.diff(polygon, axis=0)
        length = np.hypot(edges[:, 0], edges[:, 1]).sum()
        x, y = polygon[:, 0], polygon[:, 1]
        shoelace = 0.5 * abs(np.dot(x[:-1], y[1:]) - np.dot(x[1:], y[:-1]))

        assert perimeter(chaotic_shape) == pytest.approx(length, abs=1e-6)
        assert area(chaotic_shape) == pytest.approx(shoelace, abs=1e-6)
