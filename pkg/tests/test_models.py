"""
Unit тесты для моделей данных.

Тестирует BilliardShape, ShapeRegistry, BasisSpec, Spectrum,
PerturbParams, SpacingSample, RunConfig.
"""

import math

import numpy as np
import pytest

from models import (
    BasisSpec,
    BilliardShape,
    EpsilonChoice,
    EpsilonRule,
    LyapunovEstimate,
    OperatorMatrix,
    PerturbParams,
    RunConfig,
    RunManifest,
    ShapeOutcome,
    ShapeRegistry,
    SpacingSample,
    Spectrum,
    TrajectoryState,
    shape_violations,
)


class TestBilliardShape:
    """Тесты для BilliardShape."""

    def test_create_valid_shape(self, chaotic_shape):
        """Создание корректной асимметричной формы."""
        assert chaotic_shape.width == 1.0
        assert chaotic_shape.curvature1 == 0.20
        assert not chaotic_shape.is_rectangle

    def test_equal_curvatures_rejected(self):
        """Равные кривизны нарушают правило асимметрии."""
        with pytest.raises(ValueError, match="правило асимметрии"):
            BilliardShape(1.0, 1.13, 0.3, 0.4, 0.3, 0.6)

    def test_centered_offset_rejected(self):
        """Вершина параболы в середине стенки даёт симметрию отражения."""
        with pytest.raises(ValueError, match="offset1 == height/2"):
            BilliardShape(1.0, 1.13, 0.2, 0.565, 0.3, 0.6)

    def test_zero_curvature_requires_test_mode(self):
        """Нулевая кривизна допустима только в test_mode."""
        with pytest.raises(ValueError, match="test_mode"):
            BilliardShape(1.0, 1.0, 0.0, 0.4, 0.3, 0.6)

        box = BilliardShape(1.0, 1.0, 0.0, 0.5, 0.0, 0.5, test_mode=True)
        assert box.is_rectangle

    def test_negative_size_rejected(self):
        """Отрицательные размеры прямоугольника запрещены."""
        with pytest.raises(ValueError, match="width должен быть > 0"):
            BilliardShape(-1.0, 1.0, 0.2, 0.4, 0.3, 0.6)

    def test_deep_cut_rejected(self):
        """Слишком глубокий разрез режет область."""
        problems = shape_violations(1.0, 1.0, 5.0, 0.3, 0.2, 0.6)
        assert any("пересекает противоположную стенку" in p for p in problems)

    def test_all_violations_collected(self):
        """Нарушения собираются все сразу."""
        problems = shape_violations(1.0, 1.0, 0.3, 0.5, 0.3, 0.5)
        assert len(problems) >= 3

    def test_wall_functions(self, chaotic_shape):
        """Вершины парабол лежат на стенках прямоугольника."""
        assert chaotic_shape.right_wall_x(0.40) == pytest.approx(1.0)
        assert chaotic_shape.top_wall_y(0.60) == pytest.approx(1.13)
        assert chaotic_shape.right_wall_x(0.0) == pytest.approx(1.0 - 0.2 * 0.16)

    def test_dict_roundtrip_keeps_name(self, chaotic_shape):
        """Запись формы восстанавливает ту же форму."""
        restored = BilliardShape.from_dict(chaotic_shape.to_dict())
        assert restored == chaotic_shape

    def test_from_dict_missing_fields(self):
        """Неполная запись формы - ошибка."""
        with pytest.raises(ValueError, match="отсутствуют поля"):
            BilliardShape.from_dict({"width": 1.0})


class TestShapeRegistry:
    """Тесты для ShapeRegistry."""

    def test_register_and_get(self, chaotic_shape):
        """Регистрация и получение формы."""
        registry = ShapeRegistry()
        registry.register(chaotic_shape)

        assert registry.exists("chaotic")
        assert registry.get("chaotic") is chaotic_shape

    def test_duplicate_name_raises_error(self, chaotic_shape):
        """Повторная регистрация имени - ошибка."""
        registry = ShapeRegistry()
        registry.register(chaotic_shape)

        with pytest.raises(ValueError, match="уже зарегистрирована"):
            registry.register(chaotic_shape)

    def test_get_unknown_lists_available(self, shape_registry_with_defaults):
        """Ошибка поиска перечисляет доступные формы."""
        with pytest.raises(KeyError, match="ensemble_a"):
            shape_registry_with_defaults.get("missing")

    def test_default_shapes(self, shape_registry_with_defaults):
        """Стандартный ансамбль: три хаотические формы и эталон."""
        names = shape_registry_with_defaults.list_all()
        assert names == ["ensemble_a", "ensemble_b", "ensemble_c", "reference_box"]

        curvatures = {
            (shape_registry_with_defaults.get(n).curvature1, shape_registry_with_defaults.get(n).curvature2)
            for n in names[:3]
        }
        assert curvatures == {(0.20, 0.30), (0.25, 0.35), (0.30, 0.22)}
        assert shape_registry_with_defaults.get("reference_box").test_mode

    def test_unregister(self, chaotic_shape):
        """Удаление формы из реестра."""
        registry = ShapeRegistry()
        registry.register(chaotic_shape)
        registry.unregister("chaotic")

        assert not registry.exists("chaotic")
        with pytest.raises(KeyError):
            registry.unregister("chaotic")


class TestBasisSpec:
    """Тесты для BasisSpec."""

    def test_default_dimension(self):
        """Базис по умолчанию 60 x 60."""
        basis = BasisSpec()
        assert basis.dimension == 3600
        assert basis.keep_count == 900

    def test_small_basis_rejected(self):
        """Размерность меньше 400 требует allow_small."""
        with pytest.raises(ValueError, match="меньше минимальной"):
            BasisSpec(10, 10)
        assert BasisSpec(10, 10, allow_small=True).dimension == 100

    def test_quantum_number_order(self):
        """Индекс (n_x, n_y) равен (n_x - 1) * n_max_y + (n_y - 1)."""
        nx, ny = BasisSpec(3, 4, allow_small=True).quantum_numbers()
        index = (2 - 1) * 4 + (3 - 1)
        assert (nx[index], ny[index]) == (2, 3)

    def test_inflated(self):
        """Раздувание увеличивает обе оси и сохраняет V0."""
        basis = BasisSpec(20, 20, step_height=5.0, allow_small=True).inflated(1.25)
        assert (basis.n_max_x, basis.n_max_y) == (25, 25)
        assert basis.step_height == 5.0

    def test_resolve_step_height(self):
        """V0 = 100 x энергия верхнего уровня окна по Вейлю."""
        basis = BasisSpec(20, 20, allow_small=True).resolve_step_height(1.0)
        assert basis.step_height == pytest.approx(100 * 4 * math.pi * 100)

    def test_explicit_step_height_kept(self):
        """Явный V0 не перезаписывается."""
        basis = BasisSpec(20, 20, step_height=7.0, allow_small=True)
        assert basis.resolve_step_height(1.0).step_height == 7.0


class TestSpectrum:
    """Тесты для Spectrum и OperatorMatrix."""

    def test_unsorted_energies_rejected(self):
        """Уровни должны идти по возрастанию."""
        with pytest.raises(ValueError, match="по возрастанию"):
            Spectrum(np.array([2.0, 1.0]))

    def test_stable_energies(self):
        """stable_count обрезает уровни для статистики."""
        spectrum = Spectrum(np.arange(10.0), stable_count=4)
        assert spectrum.stable_energies.tolist() == [0.0, 1.0, 2.0, 3.0]
        assert Spectrum(np.arange(3.0)).stable_energies.size == 3

    def test_vector_count_must_match(self):
        """Число векторов равно числу уровней."""
        with pytest.raises(ValueError, match="не совпадает"):
            Spectrum(np.arange(3.0), eigenvectors=np.eye(2))

    def test_flag(self):
        """Пометка спектра как сомнительного."""
        spectrum = Spectrum(np.arange(3.0))
        spectrum.flag("причина")
        assert spectrum.suspect
        assert spectrum.notes == ["причина"]

    def test_operator_must_be_symmetric(self):
        """Матрица оператора обязана быть симметричной."""
        with pytest.raises(ValueError, match="несимметрична"):
            OperatorMatrix(np.array([[0.5, 0.1], [0.0, 0.5]]), 2)

    def test_operator_diagonal_bounds(self):
        """Диагональ оператора лежит в [0, 1]."""
        with pytest.raises(ValueError, match=r"\[0, 1\]"):
            OperatorMatrix(np.diag([0.5, 1.5]), 2)


class TestPerturbParams:
    """Тесты для PerturbParams и EpsilonChoice."""

    def test_default_is_infinite_tau(self):
        """По умолчанию предел tau -> inf."""
        assert PerturbParams().is_infinite

    def test_explicit_rule_needs_epsilon(self):
        """explicit без значения eps - ошибка."""
        with pytest.raises(ValueError, match="explicit"):
            PerturbParams(epsilon_rule=EpsilonRule.EXPLICIT)

    def test_non_positive_tau_rejected(self):
        """tau должен быть положительным."""
        with pytest.raises(ValueError, match="tau"):
            PerturbParams(tau=0.0)

    def test_with_epsilon_and_tau(self):
        """Копии с заменой полей."""
        params = PerturbParams().with_epsilon(2.0).with_tau(3.0)
        assert (params.epsilon, params.tau) == (2.0, 3.0)

    def test_choice_ratios(self):
        """Отношения Ebar / (eps delta_O) и eps delta_O / Delta."""
        choice = EpsilonChoice(epsilon=10.0, mean_energy=1000.0, mean_spacing=0.1, delta_o=0.2)
        assert choice.fluctuation_to_spacing == pytest.approx(20.0)
        assert choice.energy_to_fluctuation == pytest.approx(500.0)
        assert EpsilonChoice(1.0, 1.0, 1.0).to_dict()["delta_O"] is None


class TestDynamicsModels:
    """Тесты для TrajectoryState и LyapunovEstimate."""

    def test_state_requires_2_vectors(self):
        """Положение и импульс - 2-векторы."""
        with pytest.raises(ValueError, match="2-векторами"):
            TrajectoryState((0.1, 0.2, 0.3), (1.0, 0.0))

    def test_reversed(self):
        """Обращение импульса сбрасывает время."""
        state = TrajectoryState((0.1, 0.2), (0.6, 0.8), elapsed=3.0, collisions=5)
        back = state.reversed()
        assert back.momentum.tolist() == [-0.6, -0.8]
        assert back.elapsed == 0.0
        assert state.speed == pytest.approx(1.0)

    def test_lyapunov_acceptance(self):
        """Оценка принимается, если последние две отличаются меньше 10%."""
        assert LyapunovEstimate(1.0, 0.5, 1000, [0.40, 0.50, 0.52]).accepted
        assert not LyapunovEstimate(1.0, 0.5, 1000, [0.30, 0.50]).accepted
        assert not LyapunovEstimate(1.0, 0.5, 1000, [0.50]).accepted


class TestSpacingSample:
    """Тесты для SpacingSample."""

    def test_negative_spacing_rejected(self):
        """Отрицательные расстояния запрещены."""
        with pytest.raises(ValueError, match="отрицательными"):
            SpacingSample(np.array([1.0, -0.1]))

    def test_is_unfolded(self):
        """Среднее 1 +- 2% считается развёрнутым."""
        assert SpacingSample(np.array([0.99, 1.02])).is_unfolded()
        assert not SpacingSample(np.array([2.0, 2.0])).is_unfolded()
        assert not SpacingSample(np.array([])).is_unfolded()

    def test_source_defaults(self):
        """Источник выборки попадает в sources."""
        assert SpacingSample(np.ones(3), source_id="a").sources == ["a"]


class TestRunConfig:
    """Тесты для RunConfig и манифеста."""

    def test_empty_shapes_rejected(self):
        """Пустой список форм - ошибка."""
        with pytest.raises(ValueError, match="shapes"):
            RunConfig(shapes=[], seed=1)

    def test_duplicate_names_rejected(self, chaotic_shape):
        """Имена форм уникальны."""
        with pytest.raises(ValueError, match="уникальны"):
            RunConfig(shapes=[chaotic_shape, chaotic_shape], seed=1)

    def test_test_mode_shape_needs_test_mode(self, unit_box):
        """Вырожденная форма требует test_mode конфигурации."""
        with pytest.raises(ValueError, match="test_mode"):
            RunConfig(shapes=[unit_box], seed=1)
        assert RunConfig(shapes=[unit_box], seed=1, test_mode=True).test_mode

    def test_to_dict_echo(self, chaotic_shape):
        """Эхо конфигурации содержит все секции."""
        data = RunConfig(shapes=[chaotic_shape], seed=5).to_dict()
        assert data["seed"] == 5
        assert data["perturb"]["tau"] is None
        assert set(data) >= {"basis", "perturb", "stats", "classical", "shapes"}
        assert data["stability"] == "pattern"

    def test_unknown_stability_criterion(self, chaotic_shape):
        """Неизвестный критерий устойчивости - ошибка."""
        with pytest.raises(ValueError):
            RunConfig(shapes=[chaotic_shape], seed=1, stability="loose")

    def test_manifest_failed(self):
        """Манифест перечисляет упавшие формы."""
        manifest = RunManifest(config={}, version="1")
        manifest.shapes = [ShapeOutcome("a"), ShapeOutcome("b", status="failed", error="x")]
        assert manifest.failed == ["b"]
        assert not manifest.all_failed
