"""
Приёмочные тесты на стандартной конфигурации.

Полный запуск трёх форм в базисе 60 x 60 занимает минуты, поэтому
тесты помечены slow и выполняются только с опцией --runslow.
"""

from pathlib import Path

import numpy as np
import pytest

from core.experiment_runner import ExperimentRunner
from io_handlers import ConfigLoader, read_spectrum

SAMPLES_DIR = Path(__file__).resolve().parent.parent / "doc" / "samples"

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def default_run(tmp_path_factory):
    """Фикстура: манифест и директория полного запуска по default_run.json."""
    config = ConfigLoader.load(SAMPLES_DIR / "default_run.json")
    out_dir = tmp_path_factory.mktemp("default_run")
    runner = ExperimentRunner(config, out_dir)
    manifest = runner.run()
    return manifest, out_dir, runner.get_errors()


class TestDefaultEnsemble:
    """Тесты на спектрах трёх стандартных форм."""

    def test_all_shapes_processed(self, default_run):
        """Все формы обработаны без ошибок."""
        manifest, _, errors = default_run
        assert errors == []
        assert [outcome.status for outcome in manifest.shapes] == ["ok", "ok", "ok"]

    def test_stable_window_large_enough(self, default_run):
        """Устойчивых уровней хватает на выбор eps, строгий счёт не больше рабочего."""
        manifest, _, _ = default_run
        for outcome in manifest.shapes:
            diagnostics = outcome.diagnostics
            assert diagnostics["stable_count"] >= 100
            assert diagnostics["stable_count_strict"] <= diagnostics["dimension"]
            assert diagnostics["stability_criterion"] == "pattern"

    def test_h0_follows_wigner(self, default_run):
        """Сводная выборка H0 близка к Вигнеру и далека от Пуассона."""
        pooled = default_run[0].pooled["H0"]

        assert pooled["ks_wigner"] < 0.06
        assert pooled["ks_poisson"] > 0.15
        assert pooled["small_spacing_fraction"] < 0.02

    def test_heps_follows_poisson(self, default_run):
        """Сводная выборка H(eps) близка к Пуассону и далека от Вигнера."""
        pooled = default_run[0].pooled["Heps"]

        assert pooled["ks_poisson"] < 0.08
        assert pooled["ks_wigner"] > 0.15
        assert pooled["small_spacing_fraction"] > 0.06

    def test_epsilon_scale_separation(self, default_run):
        """Ebar >> eps delta_O >> Delta: оба отношения больше 3."""
        for outcome in default_run[0].shapes:
            choice = outcome.diagnostics["epsilon"]
            assert choice["ratio_eps_deltaO_over_Delta"] > 3
            assert choice["ratio_Ebar_over_eps_deltaO"] > 3

    def test_weyl_slope(self, default_run):
        """Наклон лестницы в пределах 5% от area / (4 pi) для каждой формы."""
        for outcome in default_run[0].shapes:
            assert outcome.diagnostics["weyl_relative_error"] < 0.05

    def test_classical_chaos(self, default_run):
        """Показатель Ляпунова на столкновение больше 0.05 для каждой формы."""
        for name, summary in default_run[0].classical_summary.items():
            assert summary["lyapunov_per_collision"] > 0.05, name

    def test_heps_mean_spacing_matches_h0(self, default_run):
        """Среднее расстояние H(eps) в пределах 2% от H0 в середине окна."""
        _, out_dir, _ = default_run
        for outcome in default_run[0].shapes:
            base, _ = read_spectrum(out_dir / outcome.artifacts["spectrum_H0"])
            shifted, _ = read_spectrum(out_dir / outcome.artifacts["spectrum_Heps"])
            levels = base.stable_count
            bulk = slice(levels // 4, levels - levels // 4)

            original = np.diff(base.energies[bulk]).mean()
            perturbed = np.diff(shifted.energies[bulk]).mean()

            assert perturbed == pytest.approx(original, rel=0.02), outcome.name
