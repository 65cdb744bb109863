"""
Текстовые таблицы спектров.

Формат версии 1:

    # parabolab-spectrum v1
    # shape = {"name": "ensemble_a", "width": 1.0, ...}
    # basis = {"n_max_x": 60, ...}
    # stable_count = 812
    # config_hash = 3f2a...
    index energy stable
    0 19.48107623374451 1
    ...

Значения заголовка - JSON. Собственные векторы пишутся в отдельный файл
(строка = базисное состояние, столбец = уровень) со своим заголовком.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from models import BasisSpec, BilliardShape, EpsilonChoice, PerturbedSpectrum, Spectrum

logger = logging.getLogger(__name__)

SPECTRUM_MAGIC = "# parabolab-spectrum v1"
EIGENVECTORS_MAGIC = "# parabolab-eigenvectors v1"
COLUMNS = "index energy stable"

PathLike = Union[str, Path]


def _json_value(value: Any) -> str:
    if isinstance(value, float) and not np.isfinite(value):
        return json.dumps(None if np.isnan(value) else "inf")
    return json.dumps(value, sort_keys=True, ensure_ascii=False)


def write_spectrum_table(
    path: PathLike, energies: np.ndarray, stable: np.ndarray, header: Dict[str, Any]
) -> Path:
    """
    Пишет таблицу уровней с заголовком.

    Энергии записываются через repr (17 значащих цифр), поэтому чтение
    возвращает те же числа бит в бит.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [SPECTRUM_MAGIC]
    lines.extend(f"# {key} = {_json_value(value)}" for key, value in header.items())
    lines.append(COLUMNS)
    lines.extend(
        f"{i} {float(energy)!r} {int(flag)}" for i, (energy, flag) in enumerate(zip(energies, stable))
    )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.debug(f"💾 Спектр: {path} ({len(energies)} уровней)")
    return path


def read_spectrum_table(path: PathLike) -> Tuple[Dict[str, Any], np.ndarray, np.ndarray]:
    """
    Читает таблицу уровней.

    Returns:
        (заголовок, энергии, флаги устойчивости).

    Raises:
        FileNotFoundError: Если файла нет.
        ValueError: Если файл не в формате parabolab-spectrum v1.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Файл спектра не найден: {path}")
    text = path.read_text(encoding="utf-8").splitlines()
    if not text or text[0].strip() != SPECTRUM_MAGIC:
        raise ValueError(f"{path}: ожидался заголовок '{SPECTRUM_MAGIC}'")

    header: Dict[str, Any] = {}
    body_start = None
    for number, line in enumerate(text[1:], start=1):
        if line.startswith("# "):
            key, _, value = line[2:].partition(" = ")
            try:
                header[key.strip()] = json.loads(value)
            except json.JSONDecodeError as e:
                raise ValueError(f"{path}:{number + 1}: некорректное значение '{key}'") from e
            continue
        if line.strip() != COLUMNS:
            raise ValueError(f"{path}:{number + 1}: ожидалась строка столбцов '{COLUMNS}'")
        body_start = number + 1
        break
    if body_start is None:
        raise ValueError(f"{path}: нет строки столбцов '{COLUMNS}'")

    rows = np.loadtxt(text[body_start:], ndmin=2) if len(text) > body_start else np.empty((0, 3))
    if rows.shape[1] != 3:
        raise ValueError(f"{path}: ожидалось 3 столбца, найдено {rows.shape[1]}")
    if not np.array_equal(rows[:, 0], np.arange(rows.shape[0])):
        raise ValueError(f"{path}: индексы уровней должны идти подряд с нуля")
    return header, rows[:, 1], rows[:, 2].astype(bool)


def write_spectrum(path: PathLike, spectrum: Spectrum, config_hash: Optional[str] = None) -> Path:
    """Пишет спектр H0 (форма, базис, stable_count, хэш конфигурации)."""
    header: Dict[str, Any] = {}
    if spectrum.shape is not None:
        header["shape"] = spectrum.shape.to_dict()
        header["test_mode"] = spectrum.shape.test_mode
    if spectrum.basis is not None:
        header["basis"] = spectrum.basis.to_dict()
    header["stable_count"] = spectrum.stable_count
    header["degenerate"] = spectrum.degenerate
    if spectrum.notes:
        header["notes"] = list(spectrum.notes)
    if config_hash is not None:
        header["config_hash"] = config_hash

    stable = np.zeros(spectrum.size, dtype=bool)
    stable[: spectrum.stable_energies.size] = True
    return write_spectrum_table(path, spectrum.energies, stable, header)


def write_perturbed(
    path: PathLike,
    perturbed: PerturbedSpectrum,
    choice: Optional[EpsilonChoice] = None,
    config_hash: Optional[str] = None,
) -> Path:
    """Пишет спектр H(eps) с дополнительным блоком параметров возмущения."""
    header: Dict[str, Any] = {}
    if perturbed.base.shape is not None:
        header["shape"] = perturbed.base.shape.to_dict()
        header["test_mode"] = perturbed.base.shape.test_mode
    header["stable_count"] = perturbed.size
    header["epsilon"] = perturbed.epsilon
    header["tau"] = perturbed.params.tau
    header["epsilon_rule"] = perturbed.params.epsilon_rule.value
    if choice is not None:
        for key, value in choice.to_dict().items():
            if key != "epsilon":
                header[key] = value
    if config_hash is not None:
        header["config_hash"] = config_hash
    return write_spectrum_table(
        path, perturbed.energies, np.ones(perturbed.size, dtype=bool), header
    )


def spectrum_kind(header: Dict[str, Any]) -> str:
    """"Heps" для таблицы, записанной write_perturbed, иначе "H0"."""
    return "Heps" if "epsilon" in header else "H0"


def read_spectrum(path: PathLike) -> Tuple[Spectrum, Dict[str, Any]]:
    """
    Восстанавливает Spectrum (без собственных векторов) и заголовок.

    Example:
        >>> spectrum, header = read_spectrum("runs/default/ensemble_a/spectrum_H0.txt")
        >>> spectrum.stable_count == header["stable_count"]
        True
    """
    header, energies, stable = read_spectrum_table(path)
    shape = None
    if isinstance(header.get("shape"), dict):
        shape = BilliardShape.from_dict(header["shape"], test_mode=bool(header.get("test_mode")))
    basis = None
    if isinstance(header.get("basis"), dict):
        basis = BasisSpec(**header["basis"], allow_small=True)
    stable_count = header.get("stable_count")
    if stable_count is None:
        stable_count = int(np.count_nonzero(stable))
    spectrum = Spectrum(
        energies=energies,
        shape=shape,
        basis=basis,
        stable_count=int(stable_count),
        degenerate=bool(header.get("degenerate", False)),
        notes=list(header.get("notes", [])),
    )
    spectrum.suspect = bool(spectrum.notes)
    return spectrum, header


def write_eigenvectors(path: PathLike, vectors: np.ndarray) -> Path:
    """Пишет матрицу собственных векторов построчно (строка = базисное состояние)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows, columns = vectors.shape
    header = f"{EIGENVECTORS_MAGIC[2:]}\nrows = {rows}\ncolumns = {columns}"
    np.savetxt(path, vectors, fmt="%.17g", header=header, comments="# ")
    logger.debug(f"💾 Собственные векторы: {path} ({rows}x{columns})")
    return path


def read_eigenvectors(path: PathLike) -> np.ndarray:
    """
    Читает матрицу собственных векторов.

    Raises:
        ValueError: Если заголовок или размеры не совпадают.
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        magic = f.readline().rstrip("\n")
        rows_line = f.readline()
        columns_line = f.readline()
    if magic != EIGENVECTORS_MAGIC:
        raise ValueError(f"{path}: ожидался заголовок '{EIGENVECTORS_MAGIC}'")
    rows = int(rows_line.partition("=")[2])
    columns = int(columns_line.partition("=")[2])
    vectors = np.loadtxt(path, ndmin=2)
    if vectors.shape != (rows, columns):
        raise ValueError(f"{path}: размер {vectors.shape} не совпадает с заголовком ({rows}, {columns})")
    return vectors


def write_operator_scatter(path: PathLike, energies: np.ndarray, diagonal: np.ndarray) -> Path:
    """CSV (index, energy, O_nn): зависимость <n|O|n> от энергии."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table = np.column_stack((np.arange(len(diagonal)), energies[: len(diagonal)], diagonal))
    np.savetxt(
        path, table, fmt=("%d", "%.17g", "%.17g"), delimiter=",", header="index,energy,O_nn", comments=""
    )
    return path
