"""
Модель биллиарда с двумя параболическими стенками.

Прямоугольник [0, width] x [0, height], у которого правая и верхняя стенки
заменены параболами, выгнутыми внутрь области:

    правая:  x = width  - curvature1 * (y - offset1)**2
    верхняя: y = height - curvature2 * (x - offset2)**2

Разные кривизны и смещённые вершины убирают все симметрии отражения.
"""

from dataclasses import dataclass, asdict
from enum import Enum
from typing import Dict, List, Any

SYMMETRY_RTOL = 1e-9


class Wall(str, Enum):
    """Идентификаторы стенок биллиарда."""

    LEFT = "left"
    BOTTOM = "bottom"
    PARABOLA_RIGHT = "parabola-right"
    PARABOLA_TOP = "parabola-top"


def shape_violations(
    width: float,
    height: float,
    curvature1: float,
    offset1: float,
    curvature2: float,
    offset2: float,
    test_mode: bool = False,
) -> List[str]:
    """
    Проверяет все инварианты формы и возвращает список нарушений.

    Args:
        width, height: Размеры охватывающего прямоугольника.
        curvature1, offset1: Кривизна и y-положение вершины правой параболы.
        curvature2, offset2: Кривизна и x-положение вершины верхней параболы.
        test_mode: Разрешить вырожденные (нулевая кривизна, симметричные) формы.

    Returns:
        Список строк с нарушениями (пустой, если форма корректна).
    """
    problems: List[str] = []

    if width <= 0:
        problems.append(f"width должен быть > 0, получено {width}")
    if height <= 0:
        problems.append(f"height должен быть > 0, получено {height}")
    if curvature1 < 0 or curvature2 < 0:
        problems.append("curvature1 и curvature2 не могут быть отрицательными")
    if problems:
        return problems

    if not 0 <= offset1 <= height:
        problems.append(f"offset1 должен лежать в [0, height], получено {offset1}")
    if not 0 <= offset2 <= width:
        problems.append(f"offset2 должен лежать в [0, width], получено {offset2}")

    if not test_mode:
        if curvature1 <= 0 or curvature2 <= 0:
            problems.append(
                "curvature1 и curvature2 должны быть > 0 (нулевая кривизна только в test_mode)"
            )
        if abs(curvature1 - curvature2) <= SYMMETRY_RTOL * max(curvature1, curvature2, 1.0):
            problems.append(
                "curvature1 == curvature2: правило асимметрии требует разные кривизны стенок"
            )
        if abs(offset1 - height / 2) <= SYMMETRY_RTOL * height:
            problems.append("offset1 == height/2: правило асимметрии нарушено (симметрия отражения)")
        if abs(offset2 - width / 2) <= SYMMETRY_RTOL * width:
            problems.append("offset2 == width/2: правило асимметрии нарушено (симметрия отражения)")

    # Разрезы могут пересекаться только в правом верхнем углу
    right_depth = curvature1 * max(offset1**2, (height - offset1) ** 2)
    top_depth = curvature2 * max(offset2**2, (width - offset2) ** 2)
    if curvature1 > 0 and curvature2 > 0:
        if width - right_depth <= offset2:
            problems.append(
                "правый разрез заходит за вершину верхней параболы (разрезы перекрываются)"
            )
        if height - top_depth <= offset1:
            problems.append(
                "верхний разрез заходит за вершину правой параболы (разрезы перекрываются)"
            )
    if right_depth >= width or top_depth >= height:
        problems.append("параболический разрез пересекает противоположную стенку (область несвязна)")

    excluded = (
        curvature1 * ((height - offset1) ** 3 + offset1**3) / 3
        + curvature2 * ((width - offset2) ** 3 + offset2**3) / 3
    )
    if excluded >= width * height / 2:
        problems.append("разрезы исключают больше половины площади прямоугольника")

    return problems


@dataclass(frozen=True)
class BilliardShape:
    """
    Неизменяемая форма биллиарда.

    Attributes:
        width: Ширина прямоугольника (x).
        height: Высота прямоугольника (y).
        curvature1: Кривизна правой параболы.
        offset1: y-координата вершины правой параболы.
        curvature2: Кривизна верхней параболы.
        offset2: x-координата вершины верхней параболы.
        name: Имя формы в отчётах.
        test_mode: Разрешает вырожденные формы (интегрируемые эталоны).

    Example:
        >>> shape = BilliardShape(1.0, 1.13, 0.2, 0.4, 0.3, 0.6)
        >>> shape.is_rectangle
        False
    """

    width: float
    height: float
    curvature1: float
    offset1: float
    curvature2: float
    offset2: float
    name: str = "shape"
    test_mode: bool = False

    def __post_init__(self):
        """Валидация инвариантов формы."""
        problems = shape_violations(
            self.width,
            self.height,
            self.curvature1,
            self.offset1,
            self.curvature2,
            self.offset2,
            self.test_mode,
        )
        if problems:
            raise ValueError(f"BilliardShape '{self.name}': " + "; ".join(problems))

    @property
    def diagonal(self) -> float:
        return float((self.width**2 + self.height**2) ** 0.5)

    @property
    def is_rectangle(self) -> bool:
        return self.curvature1 == 0 and self.curvature2 == 0

    def right_wall_x(self, y):
        """x-координата правой стенки на высоте y."""
        return self.width - self.curvature1 * (y - self.offset1) ** 2

    def top_wall_y(self, x):
        """y-координата верхней стенки в точке x."""
        return self.height - self.curvature2 * (x - self.offset2) ** 2

    def to_dict(self) -> Dict[str, Any]:
        """Плоская запись формы (для конфигурации и заголовков файлов)."""
        record = asdict(self)
        record.pop("test_mode")
        return record

    @classmethod
    def from_dict(cls, data: Dict[str, Any], test_mode: bool = False) -> "BilliardShape":
        """
        Создаёт форму из плоской записи.

        Raises:
            ValueError: Если запись неполна или нарушает инварианты.
        """
        missing = [key for key in SHAPE_KEYS if key not in data]
        if missing:
            raise ValueError(f"В записи формы отсутствуют поля: {', '.join(missing)}")
        return cls(
            **{key: float(data[key]) for key in SHAPE_KEYS},
            name=str(data.get("name", "shape")),
            test_mode=test_mode,
        )


SHAPE_KEYS = ("width", "height", "curvature1", "offset1", "curvature2", "offset2")
