"""
Unit тесты для квантового спектра.

Тестирует квадратуры, сборку H0, eigensolve, stability_check и weyl_check.
"""

import math

import numpy as np
import pytest
from scipy import integrate, optimize

from models import BasisSpec, BilliardShape, Spectrum, StabilityCriterion
from core import quantum_spectrum
from core.errors import NonSymmetricError, QuadratureError, WindowError
from core.quadrature import gauss_legendre_panels, sine_product_tail, sine_values
from core.quantum_spectrum import (
    build_hamiltonian,
    compute_spectrum,
    eigensolve,
    excluded_overlap,
    kinetic_diagonal,
    level_residuals,
    pattern_drift,
    stability_check,
)
from core.spectral_stats import staircase_slope, weyl_check


def _phi(n, length):
    return lambda t: math.sqrt(2.0 / length) * math.sin(n * math.pi * t / length)


def _brute_force_overlap(shape, nx, ny, mx, my):
    """int_exc phi_n phi_m dA вложенными квадратурами scipy по явному описанию области."""
    W, H = shape.width, shape.height
    c2, a2 = shape.curvature2, shape.offset2
    fx_n, fx_m = _phi(nx, W), _phi(mx, W)
    fy_n, fy_m = _phi(ny, H), _phi(my, H)

    def inner(a, b):
        if b <= a:
            return 0.0
        value, _ = integrate.quad(lambda x: fx_n(x) * fx_m(x), a, b, epsabs=1e-13, epsrel=1e-12)
        return value

    def slice_integral(y):
        r = math.sqrt(max(H - y, 0.0) / c2)
        right_start = min(max(min(shape.right_wall_x(y), a2 + r), 0.0), W)
        total = inner(right_start, W) + inner(0.0, min(a2 - r, W))
        return fy_n(y) * fy_m(y) * total

    y_cross = optimize.brentq(
        lambda y: shape.right_wall_x(y) - a2 - math.sqrt((H - y) / c2),
        shape.top_wall_y(W),
        H,
    )
    kinks = sorted({shape.offset1, shape.top_wall_y(0.0), shape.top_wall_y(W), y_cross})
    value, _ = integrate.quad(
        slice_integral, 0.0, H, points=kinks, epsabs=1e-12, epsrel=1e-10, limit=400
    )
    return value


class TestQuadrature:
    """Тесты для квадратур."""

    def test_gauss_legendre_polynomial(self):
        """Составная квадратура точна на многочленах."""
        x, w = gauss_legendre_panels([0.0, 0.4, 1.0], 4)
        assert float(np.sum(w * x**2)) == pytest.approx(1.0 / 3.0, abs=1e-14)
        assert float(np.sum(w)) == pytest.approx(1.0, abs=1e-14)

    def test_sine_values_normalized(self):
        """Нормированные синусы ортонормальны на [0, L]."""
        x, w = gauss_legendre_panels([0.0, 2.0], 8)
        values = sine_values(np.arange(1, 5), 2.0, x)
        gram = (values * w) @ values.T
        assert gram == pytest.approx(np.eye(4), abs=1e-12)

    def test_sine_product_tail_matches_quad(self):
        """Замкнутая форма хвостового интеграла совпадает с quad."""
        modes = np.array([1, 3])
        lower = np.array([0.25, 0.8])
        tail = sine_product_tail(modes, 1.3, lower)
        phi1, phi3 = _phi(1, 1.3), _phi(3, 1.3)
        expected, _ = integrate.quad(lambda t: phi1(t) * phi3(t), 0.8, 1.3)

        assert tail[0, 1, 1] == pytest.approx(expected, abs=1e-13)
        assert tail[0, 1, 1] == tail[1, 0, 1]

    def test_full_tail_is_identity(self):
        """При нижнем пределе 0 хвост равен единичной матрице."""
        tail = sine_product_tail(np.arange(1, 6), 1.0, np.array([0.0]))
        assert tail[:, :, 0] == pytest.approx(np.eye(5), abs=1e-14)


class TestBuildHamiltonian:
    """Тесты для build_hamiltonian."""

    def test_box_is_diagonal(self, reference_box, small_basis):
        """Без разрезов матрица диагональна с кинетическими элементами."""
        hamiltonian = build_hamiltonian(reference_box, small_basis)
        expected = kinetic_diagonal(reference_box, small_basis)

        assert np.array_equal(hamiltonian, np.diag(expected))

    def test_kinetic_element(self, reference_box, small_basis):
        """pi^2 (n_x^2/W^2 + n_y^2/H^2) для состояния (2, 3)."""
        index = (2 - 1) * small_basis.n_max_y + (3 - 1)
        expected = math.pi**2 * (4.0 + 9.0 / 1.13**2)
        assert kinetic_diagonal(reference_box, small_basis)[index] == pytest.approx(expected)

    def test_symmetric(self, chaotic_shape):
        """Матрица H0 симметрична."""
        hamiltonian = build_hamiltonian(chaotic_shape, BasisSpec(8, 8, allow_small=True))
        assert np.max(np.abs(hamiltonian - hamiltonian.T)) == 0.0

    def test_overlap_element_matches_brute_force(self, chaotic_shape):
        """Элемент I_exc совпадает с независимой вложенной квадратурой."""
        basis = BasisSpec(6, 6, allow_small=True)
        overlap = excluded_overlap(chaotic_shape, basis)
        row = (2 - 1) * 6 + (3 - 1)
        col = (4 - 1) * 6 + (1 - 1)

        expected = _brute_force_overlap(chaotic_shape, 2, 3, 4, 1)
        assert overlap[row, col] == pytest.approx(expected, abs=1e-7)

    def test_overlap_diagonal_matches_brute_force(self, chaotic_shape):
        """Диагональный элемент I_exc положителен и совпадает с оракулом."""
        basis = BasisSpec(6, 6, allow_small=True)
        overlap = excluded_overlap(chaotic_shape, basis)
        index = (5 - 1) * 6 + (5 - 1)

        expected = _brute_force_overlap(chaotic_shape, 5, 5, 5, 5)
        assert expected > 0
        assert overlap[index, index] == pytest.approx(expected, abs=1e-7)

    def test_assembly_independent_of_node_chunk(self, chaotic_shape, monkeypatch):
        """Разбиение узлов квадратуры на блоки не меняет I_exc."""
        basis = BasisSpec(8, 8, allow_small=True)
        whole = excluded_overlap(chaotic_shape, basis)
        monkeypatch.setattr(quantum_spectrum, "NODE_CHUNK", 7)

        chunked = excluded_overlap(chaotic_shape, basis)

        assert np.max(np.abs(chunked - whole)) < 1e-13

    def test_quadrature_not_converged(self, chaotic_shape, monkeypatch):
        """Квадратура, не сошедшаяся за MAX_PANELS панелей, - ошибка."""
        monkeypatch.setattr(quantum_spectrum, "QUADRATURE_TOLERANCE", -1.0)
        monkeypatch.setattr(quantum_spectrum, "MAX_PANELS", 16)

        with pytest.raises(QuadratureError, match="16 панелей"):
            build_hamiltonian(chaotic_shape, BasisSpec(6, 6, allow_small=True))


class TestVariationalBound:
    """Тесты вариационных свойств усечённого базиса."""

    def test_larger_basis_never_raises_levels(self, chaotic_shape):
        """При общем V0 уровни базиса 15 x 15 не выше уровней базиса 12 x 12."""
        step = 2e4
        small = compute_spectrum(
            chaotic_shape, BasisSpec(12, 12, step_height=step, allow_small=True)
        )
        large = compute_spectrum(
            chaotic_shape, BasisSpec(15, 15, step_height=step, allow_small=True)
        )

        assert np.all(large.energies[: small.size] <= small.energies + 1e-10 * step)

    def test_stable_levels_below_tenth_of_step(self, chaotic_shape, small_basis):
        """Все устойчивые уровни лежат ниже V0 / 10."""
        report = stability_check(chaotic_shape, small_basis)
        step = report.spectrum.basis.step_height

        assert report.stable_count > 0
        assert np.all(report.spectrum.stable_energies < step / 10)

    def test_low_step_caps_stable_window(self, chaotic_shape):
        """Явный низкий V0 обрезает окно на V0 / 10 и помечает спектр."""
        basis = BasisSpec(20, 20, step_height=2000.0, allow_small=True)
        report = stability_check(chaotic_shape, basis)

        assert report.stable_count < basis.keep_count
        assert np.all(report.spectrum.stable_energies < 200.0)
        assert report.spectrum.suspect


class TestEigensolve:
    """Тесты для eigensolve."""

    def test_diagonal_input(self):
        """Диагональная матрица: уровни по возрастанию, векторы - перестановка."""
        spectrum = eigensolve(np.diag([3.0, 1.0, 2.0]))

        assert spectrum.energies == pytest.approx([1.0, 2.0, 3.0])
        assert np.abs(spectrum.eigenvectors) == pytest.approx(
            np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        )

    def test_two_by_two(self):
        """[[0, 1], [1, 0]] имеет уровни -1 и +1."""
        spectrum = eigensolve(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert spectrum.energies == pytest.approx([-1.0, 1.0])

    def test_non_symmetric_rejected(self):
        """Несимметричная матрица - ошибка."""
        with pytest.raises(NonSymmetricError, match="несимметрична"):
            eigensolve(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_degeneracy_flagged(self):
        """Вырожденные уровни помечаются."""
        spectrum = eigensolve(np.diag([1.0, 1.0, 2.0]))
        assert spectrum.degenerate
        assert spectrum.suspect

    def test_residuals_on_chaotic_shape(self, chaotic_shape):
        """max |Hv - Ev| / |E_max| мал для всех пар."""
        basis = BasisSpec(10, 10, allow_small=True).resolve_step_height(1.0)
        hamiltonian = build_hamiltonian(chaotic_shape, basis)
        spectrum = eigensolve(hamiltonian)

        assert level_residuals(hamiltonian, spectrum) < 1e-9

    def test_cuts_raise_levels(self, chaotic_shape, small_basis):
        """Ступенчатый потенциал неотрицателен: каждый уровень не ниже уровня прямоугольника."""
        spectrum = compute_spectrum(chaotic_shape, small_basis)
        box_levels = np.sort(kinetic_diagonal(chaotic_shape, small_basis))

        assert np.all(spectrum.energies >= box_levels - 1e-9 * box_levels)
        assert spectrum.shape is chaotic_shape
        assert spectrum.basis.step_height is not None


class TestStabilityCheck:
    """Тесты для stability_check."""

    def test_box_levels_all_stable(self, reference_box, small_basis):
        """Прямоугольник: все запрошенные уровни устойчивы, дрейф нулевой."""
        report = stability_check(reference_box, small_basis, inflation=1.25)

        assert report.stable_count == small_basis.keep_count
        assert np.max(report.drift) < 1e-9
        assert report.spectrum.stable_count == report.stable_count
        assert report.inflated_dimension == 25 * 25

    def test_stable_count_bounded(self, chaotic_shape, small_basis):
        """stable_count не превышает keep_fraction * D."""
        report = stability_check(chaotic_shape, small_basis, inflation=1.25)

        assert 0 <= report.stable_count <= small_basis.keep_count
        assert report.drift.size == small_basis.keep_count

    def test_strict_count_reported_under_pattern(self, chaotic_shape, small_basis):
        """strict_count при критерии pattern совпадает со счётом строгого критерия."""
        pattern = stability_check(chaotic_shape, small_basis, criterion=StabilityCriterion.PATTERN)
        strict = stability_check(chaotic_shape, small_basis, criterion="strict")

        assert pattern.criterion is StabilityCriterion.PATTERN
        assert strict.criterion is StabilityCriterion.STRICT
        assert pattern.strict_count == strict.stable_count == strict.strict_count
        assert pattern.pattern_drift.size == pattern.drift.size

    def test_box_stable_under_both_criteria(self, reference_box, small_basis):
        """Прямоугольник устойчив целиком при обоих критериях."""
        for criterion in StabilityCriterion:
            report = stability_check(reference_box, small_basis, criterion=criterion)
            assert report.stable_count == small_basis.keep_count
            assert report.strict_count == small_basis.keep_count

    def test_pattern_drift_ignores_uniform_shift(self):
        """Однородный сдвиг уровней не даёт дрейфа по образцу."""
        drift = pattern_drift(np.full(200, 0.37), np.full(200, 0.5))
        assert np.max(drift) == 0.0

    def test_pattern_drift_keeps_isolated_jump(self):
        """Сдвиг одного уровня относительно соседей остаётся в дрейфе."""
        shift = np.full(200, 0.2)
        shift[120] = 0.7

        drift = pattern_drift(shift, np.ones(200))

        assert drift[120] == pytest.approx(0.5)
        assert np.count_nonzero(drift) == 1


class TestWeyl:
    """Тесты для weyl_check."""

    @staticmethod
    def _box_spectrum(width, height):
        box = BilliardShape(width, height, 0.0, height / 3, 0.0, width / 3, test_mode=True)
        levels = np.sort(kinetic_diagonal(box, BasisSpec(40, 40, allow_small=True)))[:400]
        return box, Spectrum(levels, stable_count=400)

    def test_unit_box_slope(self):
        """Квадрат 1 x 1: наклон лестницы в пределах 5% от 1/(4 pi)."""
        box, spectrum = self._box_spectrum(1.0, 1.0)
        assert weyl_check(spectrum, box) < 0.05

    def test_half_area_halves_slope(self):
        """Вдвое меньшая площадь - вдвое меньший наклон."""
        _, full = self._box_spectrum(1.0, 1.0)
        _, half = self._box_spectrum(1.0, 0.5)
        ratio = staircase_slope(half.energies, 200, 400) / staircase_slope(full.energies, 200, 400)

        assert ratio == pytest.approx(0.5, rel=0.05)

    def test_chaotic_spectrum_slope(self, chaotic_shape):
        """Вычисленный спектр хаотической формы: наклон в пределах 5% от area / (4 pi)."""
        spectrum = compute_spectrum(chaotic_shape, BasisSpec(40, 40, allow_small=True))
        spectrum.stable_count = 240

        assert weyl_check(spectrum, chaotic_shape) < 0.05

    def test_too_few_levels(self, reference_box):
        """Меньше 200 устойчивых уровней - ошибка окна."""
        with pytest.raises(WindowError, match="200"):
            weyl_check(Spectrum(np.arange(1.0, 100.0)), reference_box)
