"""
Загрузка и валидация JSON конфигураций эксперимента.

Этот модуль отвечает за чтение JSON файлов и преобразование их
в типизированные dataclass объекты. Валидация собирает все нарушения
сразу, каждое называет поле, в котором оно найдено.
"""

import json
import logging
import math
from dataclasses import fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from models import (
    BasisSpec,
    BilliardShape,
    ClassicalSettings,
    PerturbSettings,
    RunConfig,
    ShapeRegistry,
    StabilityCriterion,
    StatsSettings,
    shape_violations,
)
from models.shape import SHAPE_KEYS
from config import DEFAULT_OUTPUT_DIR, register_default_shapes
from core.errors import ConfigError

logger = logging.getLogger(__name__)

_TOP_LEVEL_KEYS = {
    "seed",
    "output_dir",
    "test_mode",
    "workers",
    "save_eigenvectors",
    "dump_collisions",
    "shapes",
    "basis",
    "perturb",
    "stats",
    "classical",
}


def default_registry() -> ShapeRegistry:
    """Реестр со стандартными формами."""
    registry = ShapeRegistry()
    register_default_shapes(registry)
    return registry


class ConfigLoader:
    """
    Загрузчик конфигураций запуска из JSON.

    Example:
        >>> config = ConfigLoader.load("doc/samples/default_run.json")
        >>> print(f"Форм: {len(config.shapes)}")
        Форм: 3
    """

    @staticmethod
    def _read(json_path: Path) -> Any:
        """
        Читает JSON.

        Raises:
            FileNotFoundError: Если файл не найден.
            ConfigError: Если JSON невалиден.
        """
        if not json_path.exists():
            error_msg = f"Конфигурационный файл не найден: {json_path}"
            logger.error(f"❌ {error_msg}")
            raise FileNotFoundError(error_msg)

        with open(json_path, "r", encoding="utf-8") as f:
            raw_content = f.read()
        logger.debug(f"🔍 Сырые данные JSON (первые 500 символов): {raw_content[:500]}")
        try:
            return json.loads(raw_content)
        except json.JSONDecodeError as e:
            logger.error(f"❌ Ошибка парсинга JSON в {json_path}: {e.msg}")
            raise ConfigError(
                [f"ошибка парсинга JSON: {e.msg} (строка {e.lineno}, столбец {e.colno})"],
                source=str(json_path),
            ) from e

    @staticmethod
    def validate(
        json_path: Union[str, Path],
        registry: Optional[ShapeRegistry] = None,
        overrides: Optional[Dict[str, Any]] = None,
    ) -> Tuple[Optional[RunConfig], List[str]]:
        """
        Разбирает конфигурацию и собирает ВСЕ нарушения.

        Args:
            json_path: Путь к JSON файлу конфигурации.
            registry: Реестр пресетов форм (по умолчанию стандартный).
            overrides: Значения верхнего уровня, перекрывающие файл (флаги CLI).

        Returns:
            (конфигурация, []) или (None, список нарушений).

        Raises:
            FileNotFoundError: Если файл не найден.
        """
        json_path = Path(json_path)
        try:
            data = ConfigLoader._read(json_path)
        except ConfigError as e:
            return None, e.violations
        if isinstance(data, dict) and overrides:
            data = {**data, **{k: v for k, v in overrides.items() if v is not None}}
        return ConfigLoader._parse_config(data, registry or default_registry())

    @staticmethod
    def load(
        json_path: Union[str, Path],
        registry: Optional[ShapeRegistry] = None,
        overrides: Optional[Dict[str, Any]] = None,
    ) -> RunConfig:
        """
        Загружает и валидирует JSON конфигурацию.

        Raises:
            FileNotFoundError: Если файл не найден.
            ConfigError: Если JSON невалиден или нарушает инварианты
                         (.violations содержит полный список).
        """
        logger.info(f"📥 Загрузка конфигурации: {json_path}")
        config, violations = ConfigLoader.validate(json_path, registry, overrides)
        if config is None:
            for violation in violations:
                logger.error(f"⚠️ Ошибка валидации: {violation}")
            raise ConfigError(violations, source=str(json_path))
        logger.info(f"✅ Конфигурация загружена успешно: форм {len(config.shapes)}")
        return config

    @staticmethod
    def _section(
        data: Dict[str, Any], key: str, model, violations: List[str]
    ):
        """Строит dataclass секции, переводя ошибки в нарушения с именем поля."""
        raw = data.get(key, {})
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            violations.append(f"{key}: должен быть объектом JSON")
            return None
        known = {f.name for f in fields(model)}
        unknown = sorted(set(raw) - known)
        if unknown:
            violations.append(f"{key}: неизвестные поля {', '.join(unknown)}")
            return None
        values = {k: v for k, v in raw.items() if k in known}
        try:
            return model(**values)
        except (TypeError, ValueError) as e:
            message = str(e)
            violations.append(message if message.startswith(f"{key}.") else f"{key}: {message}")
            return None

    @staticmethod
    def _parse_shapes(
        data: Dict[str, Any], registry: ShapeRegistry, test_mode: bool, violations: List[str]
    ) -> List[BilliardShape]:
        shapes_data = data.get("shapes")
        if not isinstance(shapes_data, list) or not shapes_data:
            violations.append("shapes: нужен непустой массив форм")
            return []

        shapes = []
        for i, entry in enumerate(shapes_data):
            label = f"shapes[{i}]"
            if not isinstance(entry, dict):
                violations.append(f"{label}: запись формы должна быть объектом JSON")
                continue
            if "preset" in entry:
                try:
                    shape = registry.get(entry["preset"])
                except KeyError as e:
                    violations.append(f"{label}: {e.args[0]}")
                    continue
                if shape.test_mode and not test_mode:
                    violations.append(
                        f"{label} ({shape.name}): вырожденная форма допустима только при test_mode"
                    )
                    continue
                shapes.append(shape)
                continue

            label = f"{label} ({entry.get('name', 'shape')})"
            missing = [key for key in SHAPE_KEYS if key not in entry]
            if missing:
                violations.append(f"{label}: отсутствуют поля {', '.join(missing)}")
                continue
            try:
                values = {key: float(entry[key]) for key in SHAPE_KEYS}
            except (TypeError, ValueError):
                violations.append(f"{label}: параметры формы должны быть числами")
                continue
            problems = shape_violations(**values, test_mode=test_mode)
            if problems:
                violations.extend(f"{label}: {problem}" for problem in problems)
                continue
            shapes.append(BilliardShape.from_dict(entry, test_mode=test_mode))
        return shapes

    @staticmethod
    def _parse_config(
        data: Any, registry: ShapeRegistry
    ) -> Tuple[Optional[RunConfig], List[str]]:
        """
        Парсит словарь в RunConfig.

        Returns:
            (конфигурация или None, список нарушений).
        """
        if not isinstance(data, dict):
            return None, ["корень конфигурации должен быть объектом JSON"]

        violations: List[str] = []
        unknown = sorted(set(data) - _TOP_LEVEL_KEYS)
        if unknown:
            violations.append(f"неизвестные поля верхнего уровня: {', '.join(unknown)}")

        seed = data.get("seed")
        if seed is None:
            violations.append("seed: обязательное поле отсутствует")
        elif isinstance(seed, bool) or not isinstance(seed, int):
            violations.append(f"seed: должен быть целым числом, получено {seed!r}")

        test_mode = bool(data.get("test_mode", False))
        shapes = ConfigLoader._parse_shapes(data, registry, test_mode, violations)

        basis_data = dict(data.get("basis") or {})
        inflation = basis_data.pop("inflation", 1.25)
        stability = basis_data.pop("stability", StabilityCriterion.PATTERN.value)
        basis = ConfigLoader._section({"basis": basis_data}, "basis", BasisSpec, violations)
        if not isinstance(inflation, (int, float)) or inflation <= 1:
            violations.append(f"basis.inflation: должен быть > 1, получено {inflation!r}")
        criteria = [criterion.value for criterion in StabilityCriterion]
        if stability not in criteria:
            violations.append(
                f"basis.stability: ожидалось одно из {', '.join(criteria)}, получено {stability!r}"
            )

        perturb_data = dict(data.get("perturb") or {})
        if perturb_data.get("tau", "absent") is None:
            perturb_data["tau"] = math.inf
        perturb = ConfigLoader._section(
            {"perturb": perturb_data}, "perturb", PerturbSettings, violations
        )
        stats = ConfigLoader._section(data, "stats", StatsSettings, violations)
        classical = ConfigLoader._section(data, "classical", ClassicalSettings, violations)

        workers = data.get("workers", 1)
        if isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:
            violations.append(f"workers: должен быть целым >= 1, получено {workers!r}")

        if violations:
            return None, violations

        logger.debug(f"🔧 Формы: {', '.join(shape.name for shape in shapes)}")
        try:
            config = RunConfig(
                shapes=shapes,
                seed=seed,
                basis=basis,
                perturb=perturb,
                stats=stats,
                classical=classical,
                output_dir=str(data.get("output_dir", DEFAULT_OUTPUT_DIR)),
                test_mode=test_mode,
                workers=workers,
                inflation=float(inflation),
                stability=StabilityCriterion(stability),
                save_eigenvectors=bool(data.get("save_eigenvectors", False)),
                dump_collisions=bool(data.get("dump_collisions", False)),
            )
        except ValueError as e:
            return None, [str(e)]
        return config, []

    @staticmethod
    def save(config: RunConfig, json_path: Union[str, Path]) -> None:
        """
        Сохраняет конфигурацию в JSON файл (формы записываются полностью).

        Example:
            >>> ConfigLoader.save(config, "resolved_config.json")
        """
        json_path = Path(json_path)
        logger.info(f"💾 Сохранение конфигурации в: {json_path}")

        data = config.to_dict()
        data["basis"]["inflation"] = data.pop("inflation")
        data["basis"]["stability"] = data.pop("stability")
        try:
            with open(json_path, "w", encoding="utf-8") as f:
                json.dump(data, f, indent=2, ensure_ascii=False)
            logger.info("✅ Конфигурация сохранена успешно")
        except Exception as e:
            logger.error(f"❌ Ошибка сохранения конфигурации: {e}", exc_info=True)
            raise
