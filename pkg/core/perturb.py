"""
Построение контрпримера: возмущение H0 усреднённым по времени оператором.

O = p_x^2 / (p_x^2 + p_y^2) в собственном базисе H0, гамильтониан
H(eps, tau) с ядром sinc, его предел tau -> inf, масштаб флуктуаций
delta_O и выбор eps = sqrt(Ebar * Delta).
"""

import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from models import (
    BasisSpec,
    BilliardShape,
    EpsilonChoice,
    OperatorMatrix,
    PerturbedSpectrum,
    PerturbParams,
    Spectrum,
)
from core.errors import DegeneracyError, MissingEigenvectorsError, WindowError
from core.spectral_stats import ks_distance, small_spacing_fraction, unfold

logger = logging.getLogger(__name__)

MIN_EPSILON_LEVELS = 100
OPERATOR_BOUND_TOLERANCE = 1e-8
# Полный спектр O проверяется только для окон не больше этого размера
BOUND_CHECK_LIMIT = 2000


def sine_basis_operator(shape: BilliardShape, basis: BasisSpec) -> np.ndarray:
    """
    Диагональ O в синус-базисе: (n_x^2/W^2) / (n_x^2/W^2 + n_y^2/H^2).

    Каждая синус-функция - равная смесь +k и -k, а p_x^2, p_y^2 действуют
    на неё как числа k_x^2, k_y^2, поэтому O диагонален.

    Example:
        >>> box = BilliardShape(1.0, 1.0, 0.0, 0.5, 0.0, 0.5, test_mode=True)
        >>> d = sine_basis_operator(box, BasisSpec(4, 4, allow_small=True))
        >>> float(d[(3 - 1) * 4 + (4 - 1)])
        0.36
    """
    nx, ny = basis.quantum_numbers()
    kx2 = nx**2 / shape.width**2
    ky2 = ny**2 / shape.height**2
    return kx2 / (kx2 + ky2)


def operator_matrix(spectrum: Spectrum, levels: Optional[int] = None) -> OperatorMatrix:
    """
    Матрица <n|O|m> на нижних levels уровнях H0.

    Args:
        spectrum: Спектр с собственными векторами, формой и базисом.
        levels: Размер окна (по умолчанию stable_count или весь спектр).

    Raises:
        MissingEigenvectorsError: Если у спектра нет векторов, формы или базиса.
        WindowError: Если levels больше числа уровней.
    """
    if spectrum.eigenvectors is None:
        raise MissingEigenvectorsError("Для матрицы O нужны собственные векторы H0")
    if spectrum.shape is None or spectrum.basis is None:
        raise MissingEigenvectorsError("Спектр не привязан к форме и базису")
    if levels is None:
        levels = spectrum.stable_count if spectrum.stable_count is not None else spectrum.size
    if not 0 < levels <= spectrum.size:
        raise WindowError(f"levels={levels} вне диапазона 1..{spectrum.size}")

    diagonal = sine_basis_operator(spectrum.shape, spectrum.basis)
    vectors = spectrum.eigenvectors[:, :levels]
    elements = vectors.T @ (diagonal[:, None] * vectors)
    elements = 0.5 * (elements + elements.T)

    if levels <= BOUND_CHECK_LIMIT:
        bounds = linalg.eigvalsh(elements)
        if bounds[0] < -OPERATOR_BOUND_TOLERANCE or bounds[-1] > 1 + OPERATOR_BOUND_TOLERANCE:
            raise ValueError(
                f"Собственные значения O вышли за [0, 1]: [{bounds[0]:.3e}, {bounds[-1]:.6f}]"
            )

    logger.debug(f"🔧 Матрица O: {levels} уровней, след {np.trace(elements):.6f}")
    return OperatorMatrix(elements=elements, levels=levels, spectrum=spectrum)


def _resolved_epsilon(params: PerturbParams) -> float:
    if params.epsilon is None:
        raise ValueError("epsilon не выбран: вызовите choose_epsilon или задайте его явно")
    return float(params.epsilon)


def build_H_eps_tau(
    spectrum: Spectrum, operator: OperatorMatrix, params: PerturbParams
) -> np.ndarray:
    """
    H(eps, tau)_nm = E_n delta_nm + eps * sinc((E_n - E_m) tau) * O_nm.

    sinc(x) = sin(x) / x, sinc(0) = 1; окно - уровни, на которые сжат O.

    Raises:
        ValueError: Если tau бесконечно или eps не задан.
    """
    if params.is_infinite:
        raise ValueError("build_H_eps_tau требует конечного tau; для tau = inf используйте build_H_eps")
    epsilon = _resolved_epsilon(params)
    energies = spectrum.energies[: operator.levels]
    gaps = energies[:, None] - energies[None, :]
    # np.sinc(x) = sin(pi x) / (pi x)
    kernel = np.sinc(gaps * params.tau / math.pi)
    matrix = np.diag(energies) + epsilon * kernel * operator.elements
    return 0.5 * (matrix + matrix.T)


def build_H_eps(
    spectrum: Spectrum, operator: OperatorMatrix, params: PerturbParams
) -> PerturbedSpectrum:
    """
    Предел tau -> inf: E_n = E_n^(0) + eps * <n|O|n>, отсортированные заново.

    Собственные векторы не меняются: результат ссылается на те же векторы H0.

    Raises:
        DegeneracyError: Если в спектре H0 отмечено вырождение.
    """
    if spectrum.degenerate:
        raise DegeneracyError(
            "Спектр H0 вырожден: предел tau -> inf не сводится к диагональному сдвигу"
        )
    epsilon = _resolved_epsilon(params)
    shifted = spectrum.energies[: operator.levels] + epsilon * operator.diagonal
    order = np.argsort(shifted, kind="stable")
    swaps = int(np.count_nonzero(order != np.arange(order.size)))
    logger.debug(f"🔍 H(eps): eps = {epsilon:.6g}, переставлено уровней: {swaps}")
    return PerturbedSpectrum(energies=shifted[order], order=order, base=spectrum, params=params)


def _diagonal_of(operator: Union[OperatorMatrix, Sequence[float]]) -> np.ndarray:
    if isinstance(operator, OperatorMatrix):
        return operator.diagonal
    return np.asarray(operator, dtype=float)


def delta_O(operator: Union[OperatorMatrix, Sequence[float]], start: int, window: int) -> float:
    """
    Масштаб флуктуаций диагонали: RMS window последовательных разностей.

        sqrt( sum_{k=0}^{N-1} (O_{n+k+1} - O_{n+k})^2 / N )

    Raises:
        WindowError: Если уровни start .. start + N выходят за диапазон.

    Example:
        >>> delta_O([0.0, 0.5, 1.0], start=0, window=2)
        0.5
    """
    diagonal = _diagonal_of(operator)
    if window < 1 or start < 0 or start + window + 1 > diagonal.size:
        raise WindowError(
            f"Окно delta_O [{start}, {start + window}] вне диапазона 0..{diagonal.size - 1}"
        )
    differences = np.diff(diagonal[start : start + window + 1])
    return float(math.sqrt(np.mean(differences**2)))


def centered_delta_O(
    operator: Union[OperatorMatrix, Sequence[float]], centre: int, window: int
) -> float:
    """delta_O по окну из window разностей, центрированному на centre (со сдвигом у краёв)."""
    size = _diagonal_of(operator).size
    start = min(max(centre - window // 2, 0), max(size - window - 1, 0))
    return delta_O(operator, start, window)


def _window_bounds(spectrum: Spectrum, window: Optional[Tuple[int, int]]) -> Tuple[int, int]:
    available = spectrum.stable_energies.size
    start, stop = window if window is not None else (0, available)
    if start < 0 or stop > available or stop <= start:
        raise WindowError(f"Окно [{start}, {stop}) вне устойчивых уровней 0..{available}")
    return start, stop


def choose_epsilon(
    spectrum: Spectrum,
    window: Optional[Tuple[int, int]] = None,
    operator: Optional[OperatorMatrix] = None,
    delta_window: int = 50,
) -> EpsilonChoice:
    """
    eps = sqrt(Ebar * Delta) по окну устойчивых уровней [start, stop).

    Ebar - средняя энергия окна, Delta - среднее расстояние между соседями.
    Если передан оператор, дополнительно считается delta_O в центре окна,
    и EpsilonChoice отдаёт отношения Ebar / (eps delta_O) и eps delta_O / Delta.

    Raises:
        WindowError: Если в окне меньше 100 уровней.

    Example:
        >>> spectrum = Spectrum(np.arange(1, 301) * 0.1)
        >>> round(choose_epsilon(spectrum, (99, 200)).epsilon / 0.1, 2)
        12.25
    """
    start, stop = _window_bounds(spectrum, window)
    count = stop - start
    if count < MIN_EPSILON_LEVELS:
        raise WindowError(
            f"Для выбора eps нужно >= {MIN_EPSILON_LEVELS} устойчивых уровней, в окне {count}"
        )
    levels = spectrum.energies[start:stop]
    mean_energy = float(np.mean(levels))
    mean_spacing = float((levels[-1] - levels[0]) / (count - 1))
    epsilon = math.sqrt(mean_energy * mean_spacing)

    delta_o = None
    if operator is not None:
        centre = min((start + stop) // 2, operator.levels - 1)
        delta_o = centered_delta_O(operator, centre, delta_window)

    choice = EpsilonChoice(epsilon, mean_energy, mean_spacing, delta_o)
    logger.debug(
        f"🔍 eps = {epsilon:.6g} (Ebar = {mean_energy:.6g}, Delta = {mean_spacing:.6g}, "
        f"delta_O = {delta_o})"
    )
    return choice


def large_tau_deviation(
    spectrum: Spectrum,
    operator: OperatorMatrix,
    params: PerturbParams,
    window: int = 200,
    tau_factor: float = 1e4,
    start: int = 0,
) -> float:
    """
    Проверка предела tau -> inf.

    Диагонализует H(eps, tau) с tau = tau_factor / Delta на окне из window
    уровней и возвращает max |E_k - E_k^diag| / Delta, где E^diag - уровни
    диагонального предела на том же окне.

    Raises:
        WindowError: Если окно выходит за размер оператора.
    """
    stop = start + window
    if start < 0 or window < 2 or stop > operator.levels:
        raise WindowError(f"Окно [{start}, {stop}) вне матрицы O размера {operator.levels}")
    epsilon = _resolved_epsilon(params)

    energies = spectrum.energies[start:stop]
    spacing = float((energies[-1] - energies[0]) / (window - 1))
    sub_spectrum = Spectrum(energies=energies)
    sub_operator = OperatorMatrix(operator.elements[start:stop, start:stop], window)

    finite = params.with_tau(tau_factor / spacing)
    finite_levels = linalg.eigvalsh(build_H_eps_tau(sub_spectrum, sub_operator, finite))
    limit_levels = np.sort(energies + epsilon * sub_operator.diagonal)
    deviation = float(np.max(np.abs(finite_levels - limit_levels)) / spacing)
    logger.debug(f"🔍 Проверка большого tau: отклонение {deviation:.3e} Delta")
    return deviation


def sweep_epsilon(
    spectrum: Spectrum,
    operator: OperatorMatrix,
    factors: Sequence[float],
    window: Optional[Tuple[int, int]] = None,
    unfold_window: int = 25,
    delta_window: int = 50,
) -> List[Dict[str, Any]]:
    """
    Переход от статистики GOE к Пуассону при росте eps.

    Для каждого множителя f берётся eps = f * sqrt(Ebar * Delta), строится
    H(eps) и считаются расстояния KS до обоих распределений, доля малых
    расстояний и отношение eps * delta_O / Delta.

    Returns:
        Список строк (словарей) в порядке factors.
    """
    base = choose_epsilon(spectrum, window, operator, delta_window)
    rows = []
    for factor in factors:
        params = PerturbParams(epsilon=factor * base.epsilon)
        perturbed = build_H_eps(spectrum, operator, params)
        sample = unfold(perturbed.energies, unfold_window, source_id=f"eps x {factor:g}")
        rows.append(
            {
                "factor": float(factor),
                "epsilon": params.epsilon,
                "ratio_eps_deltaO_over_Delta": params.epsilon * base.delta_o / base.mean_spacing,
                "ks_poisson": ks_distance(sample, "poisson"),
                "ks_wigner": ks_distance(sample, "wigner"),
                "small_spacing_fraction": small_spacing_fraction(sample),
                "sample_size": sample.size,
            }
        )
    logger.debug(f"🔍 Перебор eps: {len(rows)} значений")
    return rows
