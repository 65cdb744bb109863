"""
Реестр именованных форм биллиарда.

Конфигурация запуска может ссылаться на форму по имени пресета
({"preset": "ensemble_a"}) вместо полной записи параметров.
"""

from typing import Dict, List

from .shape import BilliardShape


class ShapeRegistry:
    """
    Расширяемый реестр форм биллиарда.

    Example:
        >>> registry = ShapeRegistry()
        >>> registry.register(BilliardShape(1.0, 1.13, 0.2, 0.4, 0.3, 0.6, name="a"))
        >>> registry.get("a").curvature1
        0.2
    """

    def __init__(self):
        """Инициализация пустого реестра."""
        self._shapes: Dict[str, BilliardShape] = {}

    def register(self, shape: BilliardShape) -> None:
        """
        Регистрирует форму под её именем.

        Raises:
            ValueError: Если форма с таким именем уже зарегистрирована.
        """
        if shape.name in self._shapes:
            raise ValueError(
                f"Форма с именем '{shape.name}' уже зарегистрирована. "
                "Используйте другое имя или сначала удалите существующую форму."
            )
        self._shapes[shape.name] = shape

    def get(self, name: str) -> BilliardShape:
        """
        Получает форму по имени.

        Raises:
            KeyError: Если форма не найдена.
        """
        if name not in self._shapes:
            available = ", ".join(self._shapes.keys())
            raise KeyError(
                f"Форма '{name}' не найдена в реестре. "
                f"Доступные формы: {available or '(пусто)'}"
            )
        return self._shapes[name]

    def exists(self, name: str) -> bool:
        return name in self._shapes

    def list_all(self) -> List[str]:
        return list(self._shapes.keys())

    def unregister(self, name: str) -> None:
        """
        Удаляет форму из реестра.

        Raises:
            KeyError: Если форма не найдена.
        """
        if name not in self._shapes:
            raise KeyError(f"Форма '{name}' не найдена в реестре")
        del self._shapes[name]
