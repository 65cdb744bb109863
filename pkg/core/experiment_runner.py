"""
Оркестратор эксперимента.

Для каждой формы: классическая проверка хаоса, спектр H0 с сертификацией
устойчивости, диагональ <n|O|n>, выбор eps, спектр H(eps) и диагностики.
Затем развёрнутые расстояния всех форм объединяются в два сводных отчёта
(H0 и H(eps)), и последним атомарно пишется манифест.
"""

import hashlib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from models import (
    BilliardShape,
    EpsilonChoice,
    EpsilonRule,
    FitReport,
    PerturbedSpectrum,
    RunConfig,
    RunManifest,
    ShapeOutcome,
    SpacingSample,
    Spectrum,
)
from config import (
    CLASSICAL_REPORT_NAME,
    COLLISIONS_NAME,
    EIGENVECTORS_NAME,
    EPSILON_SWEEP_NAME,
    FIT_REPORT_NAME,
    MANIFEST_NAME,
    OPERATOR_SCATTER_NAME,
    POOLED_DIR,
    SPACINGS_H0_NAME,
    SPACINGS_HEPS_NAME,
    SPECTRUM_H0_NAME,
    SPECTRUM_HEPS_NAME,
    VERSION,
)
from core.errors import WindowError
from core.logger import (
    attach_run_log,
    detach_run_log,
    init_worker_logging,
    worker_log_relay,
)
from core.geometry import area
from core.classical import evolve, lyapunov, random_start, time_average_O
from core.quantum_spectrum import eigensolve, stability_check
from core.perturb import (
    build_H_eps,
    build_H_eps_tau,
    centered_delta_O,
    choose_epsilon,
    large_tau_deviation,
    operator_matrix,
    sweep_epsilon,
)
from core.spectral_stats import fit_report, pool, unfold, weyl_check
from io_handlers import (
    read_eigenvectors,
    read_spectrum,
    relative_artifact,
    write_collisions,
    write_eigenvectors,
    write_fit_report,
    write_manifest,
    write_operator_scatter,
    write_perturbed,
    write_rows,
    write_spacings,
    write_spectrum,
)

logger = logging.getLogger(__name__)

CLASSICAL_COLUMNS = (
    "shape",
    "trajectory",
    "lyapunov_per_collision",
    "lyapunov_exponent",
    "lyapunov_accepted",
    "O_average",
)
SWEEP_COLUMNS = (
    "factor",
    "epsilon",
    "ratio_eps_deltaO_over_Delta",
    "ks_poisson",
    "ks_wigner",
    "small_spacing_fraction",
    "sample_size",
)
KINDS = ("H0", "Heps")


@dataclass
class ShapeResult:
    """Результат обработки одной формы (передаётся из процесса-исполнителя)."""

    outcome: ShapeOutcome
    samples: Dict[str, SpacingSample] = field(default_factory=dict)
    classical_rows: List[Dict[str, Any]] = field(default_factory=list)


def config_hash(shape: BilliardShape, config: RunConfig) -> str:
    """Ключ кэша спектра: форма, базис, раздувание и критерий устойчивости."""
    payload = {
        "shape": shape.to_dict(),
        "basis": config.basis.to_dict(),
        "inflation": config.inflation,
        "stability": config.stability.value,
        "version": VERSION,
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()


class _Stopwatch:
    """Замеряет стадии в словарь timings."""

    def __init__(self, timings: Dict[str, float], stage: str):
        self.timings = timings
        self.stage = stage

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.timings[self.stage] = round(time.perf_counter() - self.start, 3)
        return False


def run_classical_stage(
    config: RunConfig,
    shape: BilliardShape,
    rng: np.random.Generator,
    shape_dir: Optional[Path] = None,
) -> List[Dict[str, Any]]:
    """
    Показатель Ляпунова и среднее O_class для нескольких случайных стартов.

    Returns:
        Строки классического отчёта (по одной на траекторию).
    """
    settings = config.classical
    rows = []
    for index in range(settings.trajectories):
        start = random_start(shape, rng, settings.speed)
        estimate = lyapunov(shape, start, settings.lyapunov_collisions)
        average = time_average_O(shape, start, settings.n_collisions)
        rows.append(
            {
                "shape": shape.name,
                "trajectory": index,
                "lyapunov_per_collision": estimate.per_collision_exponent,
                "lyapunov_exponent": estimate.exponent,
                "lyapunov_accepted": estimate.accepted,
                "O_average": average,
            }
        )
        if index == 0 and config.dump_collisions and shape_dir is not None:
            write_collisions(shape_dir / COLLISIONS_NAME, evolve(shape, start, settings.n_collisions))
    return rows


def summarize_classical(rows: Sequence[Dict[str, Any]]) -> Dict[str, Any]:
    """Сводка по траекториям одной формы."""
    averages = [row["O_average"] for row in rows]
    exponents = [row["lyapunov_per_collision"] for row in rows]
    return {
        "lyapunov_per_collision": float(np.mean(exponents)),
        "lyapunov_exponent": float(np.mean([row["lyapunov_exponent"] for row in rows])),
        "lyapunov_accepted": all(row["lyapunov_accepted"] for row in rows),
        "O_averages": [float(value) for value in averages],
        "O_spread": float(max(averages) - min(averages)),
    }


def _cached_spectrum(
    shape_dir: Path, expected_hash: str, need_vectors: bool = True
) -> Optional[Spectrum]:
    """Спектр из прошлого запуска, если хэш конфигурации совпадает."""
    spectrum_path = shape_dir / SPECTRUM_H0_NAME
    vectors_path = shape_dir / EIGENVECTORS_NAME
    if not spectrum_path.exists() or (need_vectors and not vectors_path.exists()):
        return None
    try:
        spectrum, header = read_spectrum(spectrum_path)
        if header.get("config_hash") != expected_hash:
            return None
        if need_vectors:
            spectrum.eigenvectors = read_eigenvectors(vectors_path)
    except (OSError, ValueError) as e:
        logger.warning(f"⚠️ Кэш спектра {spectrum_path} не прочитан: {e}")
        return None
    logger.info(f"♻️ Спектр H0 '{spectrum.shape.name}' взят из кэша")
    return spectrum


def _perturbed_spectrum(
    spectrum: Spectrum, config: RunConfig, operator, choice: EpsilonChoice
) -> PerturbedSpectrum:
    """H(eps): диагональный предел или (для конечного tau) диагонализация H(eps, tau)."""
    params = config.perturb.params().with_epsilon(choice.epsilon)
    if params.is_infinite:
        return build_H_eps(spectrum, operator, params)
    finite = eigensolve(build_H_eps_tau(spectrum, operator, params), with_vectors=False)
    return PerturbedSpectrum(
        energies=finite.energies,
        order=np.arange(finite.size),
        base=spectrum,
        params=params,
    )


def _select_epsilon(spectrum: Spectrum, config: RunConfig, operator) -> EpsilonChoice:
    settings = config.perturb
    choice = choose_epsilon(
        spectrum, (0, spectrum.stable_count), operator, settings.delta_window
    )
    if settings.epsilon_rule == EpsilonRule.EXPLICIT:
        choice = EpsilonChoice(
            settings.epsilon, choice.mean_energy, choice.mean_spacing, choice.delta_o
        )
    return choice


def process_shape(
    config: RunConfig, shape: BilliardShape, seed: np.random.SeedSequence, run_dir: Path
) -> ShapeResult:
    """
    Полный конвейер одной формы.

    Любая ошибка стадии прерывает только эту форму: результат получает
    status="failed" и текст ошибки, уже записанные артефакты сохраняются
    в манифесте.
    """
    outcome = ShapeOutcome(name=shape.name)
    result = ShapeResult(outcome=outcome)
    shape_dir = run_dir / shape.name
    shape_dir.mkdir(parents=True, exist_ok=True)
    timings = outcome.timings
    diagnostics = outcome.diagnostics

    def artifact(key: str, path: Path) -> None:
        outcome.artifacts[key] = relative_artifact(path, run_dir)

    logger.info(f"▶️ Форма '{shape.name}'")
    try:
        with _Stopwatch(timings, "classical"):
            rows = run_classical_stage(config, shape, np.random.default_rng(seed), shape_dir)
            result.classical_rows = rows
            outcome.classical = summarize_classical(rows)
            if config.dump_collisions:
                artifact("collisions", shape_dir / COLLISIONS_NAME)

        with _Stopwatch(timings, "spectrum"):
            key = config_hash(shape, config)
            spectrum = _cached_spectrum(shape_dir, key) if config.save_eigenvectors else None
            diagnostics["cached"] = spectrum is not None
            if spectrum is None:
                report = stability_check(
                    shape, config.basis, config.inflation, config.stability
                )
                spectrum = report.spectrum
                diagnostics["inflated_dimension"] = report.inflated_dimension
                diagnostics["drift_monotone"] = report.drift_monotone
                diagnostics["stability_criterion"] = report.criterion.value
                diagnostics["stable_count_strict"] = report.strict_count
                artifact("spectrum_H0", write_spectrum(shape_dir / SPECTRUM_H0_NAME, spectrum, key))
                if config.save_eigenvectors:
                    artifact(
                        "eigenvectors_H0",
                        write_eigenvectors(shape_dir / EIGENVECTORS_NAME, spectrum.eigenvectors),
                    )
            else:
                artifact("spectrum_H0", shape_dir / SPECTRUM_H0_NAME)
                artifact("eigenvectors_H0", shape_dir / EIGENVECTORS_NAME)

            stable = spectrum.stable_count
            diagnostics.update(
                {
                    "area": area(shape),
                    "dimension": spectrum.basis.dimension,
                    "step_height": spectrum.basis.step_height,
                    "stable_count": stable,
                    "suspect": spectrum.suspect,
                    "notes": list(spectrum.notes),
                }
            )
            if spectrum.suspect:
                logger.warning(f"⚠️ '{shape.name}': спектр помечен как сомнительный")
            logger.info(f"✅ '{shape.name}': устойчивых уровней {stable}")

        with _Stopwatch(timings, "perturb"):
            operator = operator_matrix(spectrum, stable)
            artifact(
                "operator_diagonal",
                write_operator_scatter(
                    shape_dir / OPERATOR_SCATTER_NAME, spectrum.energies, operator.diagonal
                ),
            )
            choice = _select_epsilon(spectrum, config, operator)
            diagnostics["epsilon"] = choice.to_dict()
            perturbed = _perturbed_spectrum(spectrum, config, operator, choice)
            artifact(
                "spectrum_Heps",
                write_perturbed(shape_dir / SPECTRUM_HEPS_NAME, perturbed, choice, key),
            )

        with _Stopwatch(timings, "statistics"):
            window = config.stats.unfold_window
            samples = {
                "H0": unfold(spectrum.stable_energies, window, source_id=f"{shape.name}:H0"),
                "Heps": unfold(perturbed.energies, window, source_id=f"{shape.name}:Heps"),
            }
            result.samples = samples
            artifact("spacings_H0", write_spacings(shape_dir / SPACINGS_H0_NAME, samples["H0"]))
            artifact(
                "spacings_Heps", write_spacings(shape_dir / SPACINGS_HEPS_NAME, samples["Heps"])
            )
            reports = {
                kind: fit_report(
                    sample, config.stats.histogram_bins, config.stats.histogram_max
                )
                for kind, sample in samples.items()
            }
            artifact("fit_report", write_fit_report(shape_dir / FIT_REPORT_NAME, reports))

        with _Stopwatch(timings, "diagnostics"):
            _shape_diagnostics(config, shape, spectrum, operator, choice, diagnostics)
            sweep = sweep_epsilon(
                spectrum,
                operator,
                config.perturb.sweep_factors,
                (0, stable),
                window,
                config.perturb.delta_window,
            )
            artifact(
                "epsilon_sweep", write_rows(shape_dir / EPSILON_SWEEP_NAME, SWEEP_COLUMNS, sweep)
            )
    except Exception as e:
        outcome.status = "failed"
        outcome.error = f"{type(e).__name__}: {e}"
        logger.error(f"❌ Форма '{shape.name}' не обработана: {outcome.error}", exc_info=True)
        return result

    logger.info(f"✅ Форма '{shape.name}' обработана")
    return result


def _shape_diagnostics(
    config: RunConfig,
    shape: BilliardShape,
    spectrum: Spectrum,
    operator,
    choice: EpsilonChoice,
    diagnostics: Dict[str, Any],
) -> None:
    """Вейль, проверка большого tau и независимость delta_O от энергии."""
    stable = spectrum.stable_count
    settings = config.perturb

    try:
        diagnostics["weyl_relative_error"] = weyl_check(spectrum, shape)
    except WindowError as e:
        diagnostics["weyl_relative_error"] = None
        logger.warning(f"⚠️ '{shape.name}': проверка Вейля пропущена ({e})")

    window = min(settings.consistency_window, stable)
    params = settings.params().with_epsilon(choice.epsilon)
    diagnostics["large_tau_deviation"] = large_tau_deviation(
        spectrum,
        operator,
        params,
        window=window,
        tau_factor=settings.consistency_tau_factor,
        start=(stable - window) // 2,
    )

    half = stable // 2
    try:
        lower = centered_delta_O(operator, half // 2, settings.delta_window)
        upper = centered_delta_O(operator, half + half // 2, settings.delta_window)
    except WindowError as e:
        logger.warning(f"⚠️ '{shape.name}': delta_O по половинам окна не посчитан ({e})")
        return
    diagnostics["delta_O_lower_half"] = lower
    diagnostics["delta_O_upper_half"] = upper
    diagnostics["delta_O_half_ratio"] = (
        max(lower, upper) / min(lower, upper) if min(lower, upper) > 0 else None
    )


class ExperimentRunner:
    """
    Запуск эксперимента по RunConfig.

    Attributes:
        config: Конфигурация запуска.
        output_dir: Директория отчёта.

    Example:
        >>> runner = ExperimentRunner(config, Path("runs/default"))
        >>> manifest = runner.run()
        >>> runner.get_errors()
        []
    """

    def __init__(self, config: RunConfig, output_dir: Path):
        self.config = config
        self.output_dir = Path(output_dir)
        self._errors: List[str] = []
        logger.debug(
            f"⚙️ Инициализация ExperimentRunner: форм {len(config.shapes)}, "
            f"процессов {config.workers}, директория {self.output_dir}"
        )

    def get_errors(self) -> List[str]:
        """Ошибки по формам, накопленные за последний запуск."""
        return list(self._errors)

    def _seeds(self) -> List[np.random.SeedSequence]:
        return np.random.SeedSequence(self.config.seed).spawn(len(self.config.shapes))

    def _process_all(self) -> List[ShapeResult]:
        shapes = self.config.shapes
        seeds = self._seeds()
        if self.config.workers == 1 or len(shapes) == 1:
            return [
                process_shape(self.config, shape, seed, self.output_dir)
                for shape, seed in zip(shapes, seeds)
            ]

        workers = min(self.config.workers, len(shapes))
        logger.info(f"🔧 Параллельный запуск: {workers} процессов")
        with worker_log_relay() as queue, ProcessPoolExecutor(
            max_workers=workers, initializer=init_worker_logging, initargs=(queue,)
        ) as pool_executor:
            futures = [
                pool_executor.submit(process_shape, self.config, s, seed, self.output_dir)
                for s, seed in zip(shapes, seeds)
            ]
            return [future.result() for future in futures]

    def run(self) -> RunManifest:
        """
        Выполняет полный эксперимент и пишет манифест.

        Returns:
            RunManifest; упавшие формы перечислены в manifest.failed.
        """
        self._errors = []
        self.output_dir.mkdir(parents=True, exist_ok=True)
        handler = attach_run_log(self.output_dir)
        started = time.perf_counter()
        try:
            logger.info(
                f"🚀 Запуск эксперимента: {len(self.config.shapes)} форм, seed={self.config.seed}"
            )
            results = self._process_all()
            manifest = RunManifest(config=self.config.to_dict(), version=VERSION)
            manifest.shapes = [result.outcome for result in results]
            self._errors.extend(
                f"{outcome.name}: {outcome.error}" for outcome in manifest.shapes if not outcome.ok
            )

            rows = [row for result in results for row in result.classical_rows]
            if rows:
                path = write_rows(self.output_dir / CLASSICAL_REPORT_NAME, CLASSICAL_COLUMNS, rows)
                manifest.pooled_artifacts["classical"] = relative_artifact(path, self.output_dir)
            manifest.classical_summary = {
                result.outcome.name: result.outcome.classical
                for result in results
                if result.outcome.classical
            }

            with _Stopwatch(manifest.timings, "pooling"):
                self._pool(results, manifest)

            manifest.timings["total"] = round(time.perf_counter() - started, 3)
            write_manifest(self.output_dir / MANIFEST_NAME, manifest)
        finally:
            detach_run_log(handler)

        if self._errors:
            logger.warning(
                f"⚠️ Завершено с ошибками: {len(self._errors)} из {len(self.config.shapes)} форм"
            )
            for err in self._errors:
                logger.error(f"  - {err}")
        else:
            logger.info("✅ Эксперимент завершён успешно")
        return manifest

    def _pool(self, results: Sequence[ShapeResult], manifest: RunManifest) -> None:
        """Сводные отчёты H0 и H(eps) по всем успешно обработанным формам."""
        pooled_dir = self.output_dir / POOLED_DIR
        reports: Dict[str, FitReport] = {}
        for kind in KINDS:
            samples = [r.samples[kind] for r in results if r.outcome.ok and kind in r.samples]
            if not samples:
                continue
            try:
                pooled = pool(samples)
                reports[kind] = fit_report(
                    pooled, self.config.stats.histogram_bins, self.config.stats.histogram_max
                )
            except ValueError as e:
                self._errors.append(f"pool {kind}: {e}")
                logger.error(f"❌ Объединение {kind} не удалось: {e}")
                continue
            name = SPACINGS_H0_NAME if kind == "H0" else SPACINGS_HEPS_NAME
            path = write_spacings(pooled_dir / name, pooled)
            manifest.pooled_artifacts[f"spacings_{kind}"] = relative_artifact(path, self.output_dir)
            manifest.pooled[kind] = reports[kind].to_dict()
            logger.info(
                f"📊 {kind}: n={reports[kind].sample_size}, KS(Пуассон)={reports[kind].ks_poisson:.4f}, "
                f"KS(Вигнер)={reports[kind].ks_wigner:.4f}"
            )
        if reports:
            path = write_fit_report(pooled_dir / FIT_REPORT_NAME, reports)
            manifest.pooled_artifacts["fit_report"] = relative_artifact(path, self.output_dir)

    def run_classical(self) -> List[Dict[str, Any]]:
        """
        Только классическая часть: Ляпунов и средние O для каждой формы.

        Returns:
            Строки классического отчёта (также пишутся в classical.csv).
        """
        self._errors = []
        self.output_dir.mkdir(parents=True, exist_ok=True)
        rows: List[Dict[str, Any]] = []
        for shape, seed in zip(self.config.shapes, self._seeds()):
            shape_dir = self.output_dir / shape.name
            if self.config.dump_collisions:
                shape_dir.mkdir(parents=True, exist_ok=True)
            try:
                rows.extend(
                    run_classical_stage(self.config, shape, np.random.default_rng(seed), shape_dir)
                )
            except Exception as e:
                self._errors.append(f"{shape.name}: {type(e).__name__}: {e}")
                logger.error(f"❌ Классика '{shape.name}' не посчитана: {e}", exc_info=True)
        if rows:
            write_rows(self.output_dir / CLASSICAL_REPORT_NAME, CLASSICAL_COLUMNS, rows)
        return rows
