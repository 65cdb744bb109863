"""
Квантовый спектр биллиарда.

Гамильтониан H0 = p^2 + V0 * chi_exc собирается в синус-базисе Дирихле
на охватывающем прямоугольнике W x H: кинетическая часть диагональна,
ступенчатый потенциал высоты V0 занимает область между прямоугольником
и биллиардом. Затем матрица диагонализуется плотным симметричным
решателем, и уровни сертифицируются раздуванием базиса.
"""

import logging
import math
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import linalg, ndimage

from models import (
    BasisSpec,
    BilliardShape,
    Spectrum,
    StabilityCriterion,
    StabilityReport,
)
from core.errors import EigensolverError, NonSymmetricError, QuadratureError
from core.geometry import area, corner_overlap, overlap_lower_x
from core.quadrature import gauss_legendre_panels, sine_product_tail, sine_values
from core.spectral_stats import local_mean_spacing

logger = logging.getLogger(__name__)

# Допуск сходимости элементов I_exc при удвоении числа панелей (в единицах V0)
QUADRATURE_TOLERANCE = 1e-8
INITIAL_PANELS = 4
MAX_PANELS = 1024
# Узлов квадратуры в одном блоке сборки I_exc
NODE_CHUNK = 256

SYMMETRY_TOLERANCE = 1e-10
ORTHONORMALITY_TOLERANCE = 1e-8
DEGENERACY_TOLERANCE = 1e-12

STABLE_DRIFT = 0.1
DRIFT_WINDOW = 25
DRIFT_BLOCK = 50
STEP_MARGIN = 50.0
PHYSICAL_FRACTION = 0.1


def kinetic_diagonal(shape: BilliardShape, basis: BasisSpec) -> np.ndarray:
    """pi^2 (n_x^2 / W^2 + n_y^2 / H^2) в порядке индексации базиса."""
    nx, ny = basis.quantum_numbers()
    return math.pi**2 * (nx**2 / shape.width**2 + ny**2 / shape.height**2)


def _assemble(
    modes: np.ndarray,
    length: float,
    lower: np.ndarray,
    weights: np.ndarray,
    profile: np.ndarray,
) -> np.ndarray:
    """
    Собирает (D, D) матрицу из интеграла вида sum_q w_q T[n, m, q] P[k, q] P[l, q].

    T - хвостовой интеграл по оси "со срезом" от lower_q (замкнутая форма),
    profile - значения синусов по оси внешней квадратуры. Узлы обрабатываются
    блоками по NODE_CHUNK, массив T целиком не строится.
    """
    n_tail = modes.size
    n_prof = profile.shape[0]
    block = np.zeros((n_tail * n_tail, n_prof * n_prof))
    for first in range(0, lower.size, NODE_CHUNK):
        part = slice(first, first + NODE_CHUNK)
        tail = sine_product_tail(modes, length, lower[part]) * weights[part]
        values = profile[:, part]
        pairs = (values[:, None, :] * values[None, :, :]).reshape(n_prof * n_prof, -1)
        block += tail.reshape(n_tail * n_tail, -1) @ pairs.T
    block = block.reshape(n_tail, n_tail, n_prof, n_prof)
    return block.transpose(0, 2, 1, 3).reshape(n_tail * n_prof, n_tail * n_prof)


def _converged(
    integral: Callable[[int], np.ndarray], label: str, shape_name: str
) -> np.ndarray:
    """Удваивает число панелей, пока элементы не перестанут меняться."""
    panels = INITIAL_PANELS
    previous = integral(panels)
    change = math.inf
    while panels < MAX_PANELS:
        panels *= 2
        current = integral(panels)
        change = float(np.max(np.abs(current - previous)))
        if change <= QUADRATURE_TOLERANCE:
            logger.debug(
                f"🔧 {label} '{shape_name}': {panels} панелей, изменение {change:.2e}"
            )
            return current
        previous = current
    raise QuadratureError(
        f"Квадратура {label} для '{shape_name}' не сошлась за {MAX_PANELS} панелей "
        f"(последнее изменение {change:.2e})"
    )


def _right_strip(shape: BilliardShape, basis: BasisSpec) -> np.ndarray:
    """Интеграл по полосе x > W - c1 (y - a1)^2."""
    mx = np.arange(1, basis.n_max_x + 1)
    my = np.arange(1, basis.n_max_y + 1)
    breaks = sorted({0.0, shape.offset1, shape.height})

    def integral(panels: int) -> np.ndarray:
        y, w = gauss_legendre_panels(breaks, panels)
        return _assemble(mx, shape.width, shape.right_wall_x(y), w, sine_values(my, shape.height, y))

    return _converged(integral, "правой полосы", shape.name)


def _top_strip(shape: BilliardShape, basis: BasisSpec) -> np.ndarray:
    """Интеграл по полосе y > H - c2 (x - a2)^2 (порядок осей обратный)."""
    mx = np.arange(1, basis.n_max_x + 1)
    my = np.arange(1, basis.n_max_y + 1)
    breaks = sorted({0.0, shape.offset2, shape.width})

    def integral(panels: int) -> np.ndarray:
        x, w = gauss_legendre_panels(breaks, panels)
        # Ось среза здесь y: собираем (ny, nx) и переставляем в порядок (nx, ny)
        swapped = _assemble(my, shape.height, shape.top_wall_y(x), w, sine_values(mx, shape.width, x))
        n_x, n_y = basis.n_max_x, basis.n_max_y
        return (
            swapped.reshape(n_y, n_x, n_y, n_x)
            .transpose(1, 0, 3, 2)
            .reshape(n_x * n_y, n_x * n_y)
        )

    return _converged(integral, "верхней полосы", shape.name)


def _corner(shape: BilliardShape, basis: BasisSpec) -> Optional[np.ndarray]:
    """Интеграл по угловому участку, вырезанному обеими параболами."""
    bounds = corner_overlap(shape)
    if bounds is None:
        return None
    mx = np.arange(1, basis.n_max_x + 1)
    my = np.arange(1, basis.n_max_y + 1)

    def integral(panels: int) -> np.ndarray:
        y, w = gauss_legendre_panels(list(bounds), panels)
        lower = overlap_lower_x(shape, y)
        return _assemble(mx, shape.width, lower, w, sine_values(my, shape.height, y))

    return _converged(integral, "углового перекрытия", shape.name)


def excluded_overlap(shape: BilliardShape, basis: BasisSpec) -> np.ndarray:
    """
    Матрица I_exc[(n), (m)] = int_exc phi_n phi_m dA.

    Две параболические полосы интегрируются каждая в своём порядке осей,
    угол, попавший в обе, вычитается один раз.
    """
    dim = basis.dimension
    total = np.zeros((dim, dim))
    if shape.curvature1 > 0:
        total += _right_strip(shape, basis)
    if shape.curvature2 > 0:
        total += _top_strip(shape, basis)
    corner = _corner(shape, basis)
    if corner is not None:
        total -= corner
    return total


def build_hamiltonian(shape: BilliardShape, basis: BasisSpec) -> np.ndarray:
    """
    Матрица H0 в синус-базисе.

    Args:
        shape: Форма биллиарда.
        basis: Базис; если step_height не задан, V0 выбирается автоматически.

    Returns:
        Симметричная матрица (D, D).

    Raises:
        QuadratureError: Если квадратура не сошлась.

    Example:
        >>> box = BilliardShape(1.0, 1.0, 0.0, 0.5, 0.0, 0.5, test_mode=True)
        >>> h = build_hamiltonian(box, BasisSpec(20, 20, allow_small=True))
        >>> bool(np.all(h == np.diag(np.diag(h))))
        True
    """
    basis = basis.resolve_step_height(area(shape))
    logger.debug(
        f"🔧 Сборка H0 '{shape.name}': базис {basis.n_max_x}x{basis.n_max_y}, "
        f"V0 = {basis.step_height:.4g}"
    )
    hamiltonian = np.diag(kinetic_diagonal(shape, basis))
    if shape.curvature1 > 0 or shape.curvature2 > 0:
        hamiltonian += basis.step_height * excluded_overlap(shape, basis)
    return 0.5 * (hamiltonian + hamiltonian.T)


def eigensolve(matrix: np.ndarray, with_vectors: bool = True) -> Spectrum:
    """
    Полное разложение симметричной матрицы.

    Raises:
        NonSymmetricError: Если max|H - H^T| превышает 1e-10 * max|H|.
        EigensolverError: Если LAPACK не сошёлся или векторы неортонормальны.

    Example:
        >>> eigensolve(np.diag([3.0, 1.0, 2.0])).energies
        array([1., 2., 3.])
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise NonSymmetricError(f"Ожидалась квадратная матрица, получена форма {matrix.shape}")
    scale = max(1.0, float(np.max(np.abs(matrix)))) if matrix.size else 1.0
    asymmetry = float(np.max(np.abs(matrix - matrix.T))) if matrix.size else 0.0
    if asymmetry > SYMMETRY_TOLERANCE * scale:
        raise NonSymmetricError(f"Матрица несимметрична: max|H - H^T| = {asymmetry:.3e}")

    try:
        if with_vectors:
            energies, vectors = linalg.eigh(matrix)
        else:
            energies, vectors = linalg.eigh(matrix, eigvals_only=True), None
    except (linalg.LinAlgError, ValueError) as e:
        raise EigensolverError(f"Диагонализация не удалась: {e}") from e

    if vectors is not None and vectors.size:
        defect = float(np.max(np.abs(vectors.T @ vectors - np.eye(vectors.shape[1]))))
        if defect >= ORTHONORMALITY_TOLERANCE:
            raise EigensolverError(f"Собственные векторы неортонормальны: {defect:.3e}")

    spectrum = Spectrum(energies=energies, eigenvectors=vectors)
    if energies.size > 1:
        gaps = np.diff(energies)
        threshold = DEGENERACY_TOLERANCE * float(np.mean(np.abs(energies)))
        ties = int(np.count_nonzero(gaps < threshold))
        if ties:
            spectrum.degenerate = True
            spectrum.flag(f"вырожденных пар уровней: {ties}")
            logger.warning(f"⚠️ В спектре найдено {ties} вырожденных пар уровней")
    return spectrum


def compute_spectrum(shape: BilliardShape, basis: BasisSpec) -> Spectrum:
    """Собирает и диагонализует H0; спектр получает ссылку на форму и базис."""
    basis = basis.resolve_step_height(area(shape))
    spectrum = eigensolve(build_hamiltonian(shape, basis))
    spectrum.shape = shape
    spectrum.basis = basis
    return spectrum


def _drift_is_monotone(drift: np.ndarray) -> bool:
    blocks = drift.size // DRIFT_BLOCK
    if blocks < 2:
        return True
    means = drift[: blocks * DRIFT_BLOCK].reshape(blocks, DRIFT_BLOCK).mean(axis=1)
    return bool(np.all(np.diff(means) >= 0))


def pattern_drift(shift: np.ndarray, local: np.ndarray) -> np.ndarray:
    """
    Дрейф уровней за вычетом плавного сдвига.

    Из сдвига E_k - E'_k вычитается его скользящая медиана по окну
    2 * DRIFT_WINDOW + 1 уровней; остаток делится на локальное расстояние.
    Однородное смещение уровней, которое поглощает развёртка, так не
    считается неустойчивостью.

    Example:
        >>> shift = np.full(100, 0.3)
        >>> float(np.max(pattern_drift(shift, np.ones(100))))
        0.0
    """
    if shift.size == 0:
        return shift.copy()
    smooth = ndimage.median_filter(shift, size=2 * DRIFT_WINDOW + 1, mode="nearest")
    return np.abs(shift - smooth) / local


def _first_unstable(drift: np.ndarray) -> int:
    unstable = np.flatnonzero(drift >= STABLE_DRIFT)
    return int(unstable[0]) if unstable.size else int(drift.size)


def stability_check(
    shape: BilliardShape,
    basis: BasisSpec,
    inflation: float = 1.25,
    criterion: StabilityCriterion = StabilityCriterion.PATTERN,
) -> StabilityReport:
    """
    Сертифицирует уровни сравнением с раздутым базисом.

    При критерии STRICT уровень k устойчив, если |E_k - E'_k| меньше
    0.1 локального среднего расстояния. При критерии PATTERN то же условие
    накладывается на сдвиг за вычетом его скользящей медианы (см.
    pattern_drift). stable_count - наибольшее K, при котором устойчивы
    все уровни 1..K; оно дополнительно ограничено keep_fraction * D и
    условием E < V0 / 10. Строгий счёт сохраняется в strict_count
    при любом критерии.

    Returns:
        StabilityReport со спектром исходного базиса (stable_count выставлен).
    """
    criterion = StabilityCriterion(criterion)
    basis = basis.resolve_step_height(area(shape))
    spectrum = compute_spectrum(shape, basis)
    inflated = basis.inflated(inflation)
    wider = eigensolve(build_hamiltonian(shape, inflated), with_vectors=False)

    window = min(basis.keep_count, spectrum.size)
    local = local_mean_spacing(spectrum.energies, DRIFT_WINDOW)[:window]
    shift = spectrum.energies[:window] - wider.energies[:window]
    drift = np.abs(shift) / local
    pattern = pattern_drift(shift, local)

    physical = int(
        np.count_nonzero(spectrum.energies < PHYSICAL_FRACTION * basis.step_height)
    )
    strict_count = min(_first_unstable(drift), physical)
    if criterion is StabilityCriterion.STRICT:
        stable_count = strict_count
    else:
        stable_count = min(_first_unstable(pattern), physical)
    spectrum.stable_count = stable_count

    if stable_count and basis.step_height < STEP_MARGIN * spectrum.energies[stable_count - 1]:
        spectrum.flag("V0 меньше 50 x верхний устойчивый уровень")
        logger.warning(f"⚠️ '{shape.name}': V0 слишком мал для устойчивого окна")

    monotone = _drift_is_monotone(drift)
    if not monotone:
        logger.warning(f"⚠️ '{shape.name}': дрейф уровней не монотонен по окнам из 50")

    logger.debug(
        f"🔍 Устойчивость '{shape.name}' ({criterion.value}): {stable_count}/{window} "
        f"уровней, строго {strict_count}, базис {basis.dimension} -> {inflated.dimension}"
    )
    return StabilityReport(
        stable_count=stable_count,
        drift=drift,
        spectrum=spectrum,
        inflated_dimension=inflated.dimension,
        drift_monotone=monotone,
        pattern_drift=pattern,
        criterion=criterion,
        strict_count=strict_count,
    )


def level_residuals(
    matrix: np.ndarray, spectrum: Spectrum, levels: Optional[Sequence[int]] = None
) -> float:
    """max |H v - E v| / |E_max| по выбранным уровням (все по умолчанию)."""
    vectors = spectrum.eigenvectors
    energies = spectrum.energies
    if levels is not None:
        vectors = vectors[:, list(levels)]
        energies = energies[list(levels)]
    residual = matrix @ vectors - vectors * energies
    return float(np.max(np.abs(residual)) / max(abs(spectrum.energies[-1]), 1e-300))
