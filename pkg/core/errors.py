"""
Исключения Parabolab.

Каждый класс наследует встроенное исключение, которое бросалось бы
без него (ValueError для некорректного ввода, RuntimeError для сбоя
численного метода), поэтому вызывающий код может ловить любое из двух.
"""

from typing import List, Optional


class ParabolabError(Exception):
    """Базовое исключение проекта."""


class GeometryError(ParabolabError, ValueError):
    """Некорректный геометрический запрос."""


class NoIntersectionError(GeometryError, RuntimeError):
    """Луч не пересёк ни одной стенки (область ограничена, значит это сбой численного метода)."""


class PointOffWallError(GeometryError):
    """Точка лежит дальше допуска от указанной стенки."""


class CollisionError(ParabolabError, RuntimeError):
    """Сбой при обработке столкновения в классической динамике."""


class QuadratureError(ParabolabError, RuntimeError):
    """Квадратура не сошлась при удвоении числа панелей."""


class NonSymmetricError(ParabolabError, ValueError):
    """На вход симметричного решателя подана несимметричная матрица."""


class EigensolverError(ParabolabError, RuntimeError):
    """LAPACK не смог диагонализовать матрицу."""


class MissingEigenvectorsError(ParabolabError, ValueError):
    """Спектр не содержит собственных векторов."""


class DegeneracyError(ParabolabError, ValueError):
    """В спектре H0 обнаружено вырождение, предел tau -> inf не определён."""


class WindowError(ParabolabError, ValueError):
    """Окно уровней выходит за границы или содержит слишком мало уровней."""


class StatisticsError(ParabolabError, ValueError):
    """Некорректные входные данные для статистики уровней."""


class ConfigError(ParabolabError, ValueError):
    """
    Конфигурация запуска не прошла проверку.

    Attributes:
        violations: Полный список нарушений (каждое называет поле).
    """

    def __init__(self, violations: List[str], source: Optional[str] = None):
        self.violations = list(violations)
        self.source = source
        prefix = f"Некорректная конфигурация {source}" if source else "Некорректная конфигурация"
        super().__init__(f"{prefix}: " + "; ".join(self.violations))
