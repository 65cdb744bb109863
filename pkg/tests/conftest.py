"""
Конфигурация для pytest.

Этот файл содержит fixtures и настройки для всех тестов.
"""

import json

import pytest


def pytest_addoption(parser):
    """Опция --runslow включает приёмочные тесты на полном базисе."""
    parser.addoption(
        "--runslow", action="store_true", default=False, help="запускать медленные тесты"
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: медленный тест, запускается с --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="нужна опция --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def chaotic_shape():
    """Фикстура: асимметричная форма с двумя параболическими стенками."""
    from models import BilliardShape

    return BilliardShape(
        width=1.0,
        height=1.13,
        curvature1=0.20,
        offset1=0.40,
        curvature2=0.30,
        offset2=0.60,
        name="chaotic",
    )


@pytest.fixture
def unit_box():
    """Фикстура: единичный квадрат без разрезов (интегрируемый эталон)."""
    from models import BilliardShape

    return BilliardShape(1.0, 1.0, 0.0, 0.5, 0.0, 0.5, name="unit_box", test_mode=True)


@pytest.fixture
def reference_box():
    """Фикстура: прямоугольник 1 x 1.13 без разрезов."""
    from models import BilliardShape

    return BilliardShape(1.0, 1.13, 0.0, 0.565, 0.0, 0.5, name="reference_box", test_mode=True)


@pytest.fixture
def small_basis():
    """Фикстура: малый базис 20 x 20 для быстрых тестов ядра."""
    from models import BasisSpec

    return BasisSpec(n_max_x=20, n_max_y=20, allow_small=True)


@pytest.fixture
def shape_registry_with_defaults():
    """Фикстура: реестр со стандартными формами."""
    from models import ShapeRegistry
    from config import register_default_shapes

    registry = ShapeRegistry()
    register_default_shapes(registry)

    return registry


@pytest.fixture
def box_config_data(tmp_path):
    """Фикстура: данные быстрой конфигурации на прямоугольнике (test_mode)."""
    return {
        "seed": 11,
        "test_mode": True,
        "output_dir": str(tmp_path / "run"),
        "shapes": [{"preset": "reference_box"}],
        "basis": {"n_max_x": 24, "n_max_y": 24, "allow_small": True, "inflation": 1.25},
        "perturb": {"delta_window": 20, "sweep_factors": [0.5, 2.0], "consistency_window": 40},
        "stats": {"unfold_window": 10},
        "classical": {"n_collisions": 1000, "lyapunov_collisions": 1000, "trajectories": 1},
    }


@pytest.fixture
def box_config_file(tmp_path, box_config_data):
    """Фикстура: файл быстрой конфигурации."""
    path = tmp_path / "box_run.json"
    path.write_text(json.dumps(box_config_data), encoding="utf-8")
    return path
