"""
Запись отчётов запуска: CSV, JSON и манифест.

Все числа форматируются детерминированно (repr для float, ключи JSON
отсортированы), поэтому повторный запуск с тем же seed даёт те же байты.
Манифест пишется атомарно через временный файл и os.replace.
"""

import csv
import json
import logging
import math
import os
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Union

import numpy as np

from models import FitReport, RunManifest, SpacingSample, TrajectoryState

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _prepare(path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if value is None:
        return ""
    return str(value)


def write_rows(path: PathLike, columns: Sequence[str], rows: Iterable[Dict[str, Any]]) -> Path:
    """CSV с заголовком; значения берутся из словарей по именам столбцов."""
    path = _prepare(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(column)) for column in columns])
    logger.debug(f"💾 CSV: {path}")
    return path


def write_spacings(path: PathLike, sample: SpacingSample) -> Path:
    """Развёрнутые расстояния, одно на строку."""
    path = _prepare(path)
    np.savetxt(path, sample.spacings, fmt="%.17g", header="s", comments="")
    logger.debug(f"💾 Расстояния: {path} ({sample.size})")
    return path


def read_spacings(path: PathLike, source_id: str = "") -> SpacingSample:
    """Читает файл, записанный write_spacings."""
    values = np.loadtxt(path, skiprows=1, ndmin=1)
    return SpacingSample(values, source_id=source_id or Path(path).parent.name)


def finite_json(value: Any) -> Any:
    """
    Заменяет inf и nan на None во вложенных словарях и списках.

    Example:
        >>> finite_json({"ratio": float("inf"), "values": [1.0, float("nan")]})
        {'ratio': None, 'values': [1.0, None]}
    """
    if isinstance(value, dict):
        return {key: finite_json(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [finite_json(item) for item in value]
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    return value


def write_json(path: PathLike, data: Dict[str, Any]) -> Path:
    path = _prepare(path)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(
            finite_json(data), f, indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False
        )
        f.write("\n")
    return path


def write_fit_report(path: PathLike, reports: Dict[str, FitReport]) -> Path:
    """JSON с отчётами о подгонке (например, {"H0": ..., "Heps": ...})."""
    path = write_json(path, {name: report.to_dict() for name, report in reports.items()})
    logger.debug(f"💾 Отчёт о подгонке: {path}")
    return path


def write_collisions(path: PathLike, states: List[TrajectoryState]) -> Path:
    """Таблица столкновений: номер, время, стенка, положение, импульс."""
    path = _prepare(path)
    lines = ["collision elapsed wall x y px py"]
    for state in states:
        wall = state.wall.value if state.wall is not None else "-"
        lines.append(
            f"{state.collisions} {state.elapsed!r} {wall} "
            f"{state.position[0]!r} {state.position[1]!r} "
            f"{state.momentum[0]!r} {state.momentum[1]!r}"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.debug(f"💾 Столкновения: {path} ({len(states)})")
    return path


def write_manifest(path: PathLike, manifest: RunManifest) -> Path:
    """
    Атомарно пишет манифест.

    Raises:
        FileNotFoundError: Если манифест ссылается на несуществующий артефакт.
    """
    path = _prepare(path)
    missing = [p for p in manifest.artifact_paths() if not (path.parent / p).exists()]
    if missing:
        raise FileNotFoundError(f"Манифест ссылается на отсутствующие файлы: {', '.join(missing)}")

    tmp_path = path.with_name(path.name + ".tmp")
    with open(tmp_path, "w", encoding="utf-8") as f:
        json.dump(
            finite_json(manifest.to_dict()),
            f,
            indent=2,
            sort_keys=True,
            ensure_ascii=False,
            allow_nan=False,
        )
        f.write("\n")
    os.replace(tmp_path, path)
    logger.info(f"✅ Манифест записан: {path}")
    return path
