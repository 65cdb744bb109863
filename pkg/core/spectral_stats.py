"""
Статистика расстояний между уровнями.

Развёртка спектра по локальному среднему расстоянию, эталонные распределения
Пуассона и Вигнера, расстояние Колмогорова-Смирнова, объединение выборок,
проверка закона Вейля и оракул GOE 2x2.
"""

import logging
import math
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np
from scipy import stats
from typing_extensions import Literal

from models import BilliardShape, FitReport, SpacingSample, Spectrum
from core.errors import StatisticsError, WindowError
from core.geometry import area, perimeter

logger = logging.getLogger(__name__)

SpacingModel = Literal["poisson", "wigner"]
MODELS = ("poisson", "wigner")
SMALL_SPACING = 0.1
MIN_WEYL_LEVELS = 200


def local_mean_spacing(energies: Sequence[float], half_width: int) -> np.ndarray:
    """
    Локальное среднее расстояние для каждого уровня.

    Для уровня k берётся среднее сырых расстояний в окне из 2w+1 расстояний
    вокруг расстояния k (над уровнем k; для последнего уровня - под ним).
    У краёв окно симметрично сужается.
    """
    e = np.asarray(energies, dtype=float)
    raw = np.diff(e)
    m = raw.size
    if m < 1:
        raise WindowError("Для локального среднего нужно хотя бы два уровня")
    centre = np.minimum(np.arange(e.size), m - 1)
    reach = np.minimum(np.minimum(centre, m - 1 - centre), half_width)
    cumulative = np.concatenate(([0.0], np.cumsum(raw)))
    total = cumulative[centre + reach + 1] - cumulative[centre - reach]
    return total / (2 * reach + 1)


def unfold(
    energies: Sequence[float], half_width: int = 25, source_id: str = ""
) -> SpacingSample:
    """
    Развёртка спектра: S_i = (E_{i+1} - E_i) / Delta_i.

    Delta_i - среднее 2w+1 сырых расстояний с центром в i. Уровни, у которых
    меньше w соседей с любой стороны, отбрасываются.

    Raises:
        StatisticsError: Если уровни не строго возрастают.
        WindowError: Если уровней меньше 2w + 2.

    Example:
        >>> unfold(np.arange(100) * 0.5, half_width=5).spacings[:3]
        array([1., 1., 1.])
    """
    e = np.asarray(energies, dtype=float)
    if e.size < 2 * half_width + 2:
        raise WindowError(
            f"Для развёртки с w={half_width} нужно >= {2 * half_width + 2} уровней, получено {e.size}"
        )
    raw = np.diff(e)
    if np.any(raw <= 0):
        raise StatisticsError("Уровни для развёртки должны строго возрастать")

    kernel = np.full(2 * half_width + 1, 1.0 / (2 * half_width + 1))
    local = np.convolve(raw, kernel, mode="valid")
    stop = raw.size - half_width
    spacings = raw[half_width:stop] / local
    logger.debug(
        f"🔍 Развёртка {source_id or 'спектра'}: {spacings.size} расстояний, "
        f"среднее {spacings.mean():.4f}"
    )
    return SpacingSample(spacings, source_id=source_id, window=(half_width, stop))


def _check_argument(s) -> np.ndarray:
    values = np.asarray(s, dtype=float)
    if np.any(values < 0):
        raise StatisticsError("Аргумент распределения расстояний не может быть отрицательным")
    return values


def _scalar_or_array(values: np.ndarray):
    return float(values) if values.ndim == 0 else values


def poisson_pdf(s):
    """rho(s) = exp(-s): некоррелированные уровни."""
    return _scalar_or_array(np.exp(-_check_argument(s)))


def wigner_pdf(s):
    """rho(s) = (pi s / 2) exp(-pi s^2 / 4): GOE 2x2, приближение Вигнера."""
    values = _check_argument(s)
    return _scalar_or_array(0.5 * math.pi * values * np.exp(-0.25 * math.pi * values**2))


def poisson_cdf(s):
    return _scalar_or_array(-np.expm1(-_check_argument(s)))


def wigner_cdf(s):
    return _scalar_or_array(-np.expm1(-0.25 * math.pi * _check_argument(s) ** 2))


def _model_cdf(model: SpacingModel):
    if model == "poisson":
        return poisson_cdf
    if model == "wigner":
        return wigner_cdf
    raise StatisticsError(f"Неизвестная модель '{model}'. Доступные: {', '.join(MODELS)}")


def ks_distance(sample: SpacingSample, model: SpacingModel) -> float:
    """
    Sup-расстояние между эмпирической функцией распределения и моделью.

    Raises:
        StatisticsError: Пустая выборка или неизвестная модель.

    Example:
        >>> ks_distance(SpacingSample(np.ones(10)), "poisson")
        0.6321...
    """
    cdf = _model_cdf(model)
    if sample.size == 0:
        raise StatisticsError("Пустая выборка расстояний")
    return float(stats.kstest(sample.spacings, cdf).statistic)


def histogram(
    sample: SpacingSample, bins: int = 25, s_max: float = 4.0
) -> Tuple[np.ndarray, np.ndarray]:
    """Гистограмма плотности на [0, s_max], нормированная на 1."""
    densities, edges = np.histogram(sample.spacings, bins=bins, range=(0.0, s_max), density=True)
    return edges, np.nan_to_num(densities)


def chi2_statistic(
    sample: SpacingSample, model: str, bins: int = 25, s_max: float = 4.0
) -> float:
    """
    Хи-квадрат по бинам гистограммы (вторичная статистика).

    Учитываются только бины с ожидаемым числом событий >= 5.
    """
    cdf = _model_cdf(model)
    if sample.size == 0:
        raise StatisticsError("Пустая выборка расстояний")
    counts, edges = np.histogram(sample.spacings, bins=bins, range=(0.0, s_max))
    expected = sample.size * np.diff(cdf(edges))
    usable = expected >= 5
    return float(np.sum((counts[usable] - expected[usable]) ** 2 / expected[usable]))


def small_spacing_fraction(sample: SpacingSample, threshold: float = SMALL_SPACING) -> float:
    """Доля расстояний меньше threshold (у Пуассона 1 - exp(-0.1) = 0.095 при 0.1)."""
    if sample.size == 0:
        raise StatisticsError("Пустая выборка расстояний")
    return float(np.mean(sample.spacings < threshold))


def fit_report(sample: SpacingSample, bins: int = 25, s_max: float = 4.0) -> FitReport:
    """Полный отчёт о сравнении выборки с Пуассоном и Вигнером."""
    edges, densities = histogram(sample, bins, s_max)
    report = FitReport(
        ks_poisson=ks_distance(sample, "poisson"),
        ks_wigner=ks_distance(sample, "wigner"),
        chi2_poisson=chi2_statistic(sample, "poisson", bins, s_max),
        chi2_wigner=chi2_statistic(sample, "wigner", bins, s_max),
        bin_edges=edges,
        densities=densities,
        sample_size=sample.size,
        small_spacing_fraction=small_spacing_fraction(sample),
        source_id=sample.source_id,
    )
    logger.debug(
        f"📊 {sample.source_id}: n={report.sample_size}, KS(P)={report.ks_poisson:.4f}, "
        f"KS(W)={report.ks_wigner:.4f}"
    )
    return report


def goe2x2_sample(seed: Union[int, np.random.SeedSequence, None], count: int) -> SpacingSample:
    """
    Расстояния собственных значений случайных симметричных матриц 2x2.

    Матрица [[a, b], [b, c]] с независимыми гауссовыми элементами, дисперсия
    b вдвое меньше дисперсии диагонали; расстояние sqrt((a-c)^2 + 4 b^2)
    нормируется на среднее по ансамблю. Для этого ансамбля распределение
    Вигнера точное.
    """
    if count < 1:
        raise StatisticsError("count должен быть >= 1")
    rng = np.random.default_rng(seed)
    a = rng.normal(0.0, 1.0, count)
    c = rng.normal(0.0, 1.0, count)
    b = rng.normal(0.0, math.sqrt(0.5), count)
    spacings = np.sqrt((a - c) ** 2 + 4.0 * b**2)
    return SpacingSample(spacings / spacings.mean(), source_id="goe2x2", window=(0, count))


def staircase_slope(
    energies: Sequence[float], start: int, stop: int, boundary: float = 0.0
) -> float:
    """
    Наклон МНК лестницы N(E) = k + 1 на уровнях [start, stop).

    При boundary > 0 к лестнице прибавляется граничная поправка Дирихле
    boundary * sqrt(E) / (4 pi), и наклон сравним напрямую с area / (4 pi).
    """
    e = np.asarray(energies, dtype=float)[start:stop]
    counts = np.arange(start, start + e.size) + 1.0
    if boundary > 0:
        counts = counts + boundary * np.sqrt(e) / (4.0 * math.pi)
    slope, _ = np.polyfit(e, counts, 1)
    return float(slope)


def weyl_check(spectrum: Spectrum, shape: BilliardShape) -> float:
    """
    Относительная ошибка наклона лестницы N(E) относительно area / (4 pi).

    Наклон подгоняется по верхней половине устойчивого окна
    (единицы m = 1/2, hbar = 1, две степени свободы) после вычета
    периметрического члена -perimeter * sqrt(E) / (4 pi).

    Raises:
        WindowError: Если устойчивых уровней меньше 200.
    """
    levels = spectrum.stable_energies
    if levels.size < MIN_WEYL_LEVELS:
        raise WindowError(
            f"Проверка Вейля требует >= {MIN_WEYL_LEVELS} устойчивых уровней, есть {levels.size}"
        )
    slope = staircase_slope(levels, levels.size // 2, levels.size, boundary=perimeter(shape))
    expected = area(shape) / (4.0 * math.pi)
    error = abs(slope - expected) / expected
    logger.debug(f"🔍 Вейль '{shape.name}': наклон {slope:.5f}, ожидание {expected:.5f}")
    return float(error)


def pool(samples: Iterable[SpacingSample]) -> SpacingSample:
    """
    Объединяет развёрнутые выборки нескольких систем без перенормировки.

    Raises:
        StatisticsError: Если какая-то выборка не развёрнута (среднее не 1 +- 2%)
                         или список пуст.
    """
    samples = list(samples)
    if not samples:
        raise StatisticsError("Нечего объединять: список выборок пуст")
    bad = [s.source_id or f"#{i}" for i, s in enumerate(samples) if not s.is_unfolded()]
    if bad:
        raise StatisticsError(f"Выборки не развёрнуты (среднее != 1): {', '.join(bad)}")

    spacings = np.concatenate([s.spacings for s in samples])
    sources: List[str] = []
    for s in samples:
        sources.extend(s.sources or [s.source_id])
    if len(samples) == 1:
        return SpacingSample(spacings, samples[0].source_id, samples[0].window, sources)
    return SpacingSample(spacings, "pool", (0, spacings.size), sources)
