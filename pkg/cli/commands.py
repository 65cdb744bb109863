"""
CLI команды для Parabolab.

Этот модуль содержит команды командной строки для запуска эксперимента,
проверки конфигурации, пересчёта статистики по сохранённым спектрам
и отдельного классического расчёта.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from models import StatsSettings
from io_handlers import (
    ConfigLoader,
    PathResolver,
    read_spectrum,
    spectrum_kind,
    write_fit_report,
    write_spacings,
)
from core.errors import ConfigError, ParabolabError
from core.experiment_runner import ExperimentRunner
from core.spectral_stats import fit_report, pool, unfold
from config import FIT_REPORT_NAME, SPACINGS_H0_NAME, SPACINGS_HEPS_NAME

logger = logging.getLogger(__name__)


def _load_config(
    config_path: str,
    seed: Optional[int],
    output: Optional[str],
    test_mode: bool,
    dump_collisions: bool,
    workers: Optional[int],
):
    """Загружает конфигурацию с перекрытиями из CLI и разрешает выходную директорию."""
    overrides: Dict[str, Any] = {"seed": seed, "workers": workers}
    if test_mode:
        overrides["test_mode"] = True
    if dump_collisions:
        overrides["dump_collisions"] = True

    config_path_obj = Path(config_path).resolve()
    config = ConfigLoader.load(config_path_obj, overrides=overrides)
    run_dir = PathResolver(config_path_obj).output_dir(config.output_dir, override=output)
    return config, run_dir


def cmd_run(
    config_path: str,
    seed: Optional[int] = None,
    output: Optional[str] = None,
    test_mode: bool = False,
    dump_collisions: bool = False,
    workers: Optional[int] = None,
) -> int:
    """
    Полный эксперимент по JSON конфигурации.

    Returns:
        0 при успехе, 2 если часть форм упала, 1 если упали все или
        конфигурация некорректна.

    Example:
        >>> cmd_run("doc/samples/default_run.json", seed=7, output="runs/seed7")
    """
    logger.info(f"▶️ Запущена команда run. Config: {config_path}, Output: {output or 'из конфигурации'}")
    try:
        config, run_dir = _load_config(config_path, seed, output, test_mode, dump_collisions, workers)
        runner = ExperimentRunner(config, run_dir)
        manifest = runner.run()

        if manifest.all_failed:
            logger.error("❌ Ни одна форма не обработана")
            return 1
        errors = runner.get_errors()
        if errors:
            logger.warning(f"⚠️ Завершено с {len(errors)} ошибками")
            return 2

        logger.info(f"✅ Отчёт готов: {run_dir}")
        return 0

    except FileNotFoundError as e:
        logger.error(f"❌ Файл не найден: {e}")
        return 1
    except ConfigError as e:
        logger.error(f"❌ Ошибка валидации: {e}")
        return 1
    except Exception as e:
        logger.critical(f"💥 Критическая ошибка при запуске: {e}", exc_info=True)
        return 1


def cmd_validate(config_path: str, test_mode: bool = False) -> int:
    """
    Проверяет конфигурацию и печатает все нарушения сразу.

    Returns:
        0 если конфигурация корректна, 1 иначе.
    """
    logger.info(f"▶️ Запущена команда validate для {config_path}")
    overrides = {"test_mode": True} if test_mode else None
    try:
        config, violations = ConfigLoader.validate(config_path, overrides=overrides)
    except FileNotFoundError as e:
        logger.error(f"❌ {e}")
        return 1

    if config is None:
        logger.error(f"❌ Найдено нарушений: {len(violations)}")
        for violation in violations:
            print(f"  - {violation}")
        return 1

    print(f"✅ Конфигурация корректна: форм {len(config.shapes)}, seed={config.seed}")
    for shape in config.shapes:
        print(
            f"  - {shape.name}: {shape.width} x {shape.height}, "
            f"c1={shape.curvature1}, a1={shape.offset1}, c2={shape.curvature2}, a2={shape.offset2}"
        )
    return 0


def cmd_stats(
    spectrum_paths: List[str],
    output: Optional[str] = None,
    settings: Optional[StatsSettings] = None,
) -> int:
    """
    Пересчитывает статистику расстояний по сохранённым спектрам без диагонализации.

    Берутся устойчивые уровни каждого файла, развёртка и объединение
    выполняются так же, как в run. Вид спектра (H0 или H(eps)) определяется
    по заголовку файла; смешивать виды в одной выборке нельзя.

    Returns:
        0 при успехе, 2 если часть файлов не прочитана, 1 если не прочитан ни один.
    """
    logger.info(f"▶️ Запущена команда stats: файлов {len(spectrum_paths)}")
    settings = settings or StatsSettings()
    samples = []
    kinds = set()
    failures = 0
    for path in spectrum_paths:
        try:
            spectrum, header = read_spectrum(path)
            kinds.add(spectrum_kind(header))
            label = spectrum.shape.name if spectrum.shape is not None else Path(path).stem
            samples.append(unfold(spectrum.stable_energies, settings.unfold_window, source_id=label))
            logger.debug(f"🔍 {path}: {spectrum.stable_energies.size} устойчивых уровней")
        except (OSError, ValueError) as e:
            failures += 1
            logger.error(f"❌ {path}: {e}")

    if not samples:
        logger.error("❌ Нет ни одного пригодного спектра")
        return 1
    if len(kinds) > 1:
        logger.error("❌ Нельзя объединять спектры H0 и H(eps) в одну выборку")
        return 1
    kind = kinds.pop()

    try:
        pooled = pool(samples)
        report = fit_report(pooled, settings.histogram_bins, settings.histogram_max)
    except ParabolabError as e:
        logger.error(f"❌ Статистика не посчитана: {e}")
        return 1

    print(f"📊 Выборка {kind}: {report.sample_size} расстояний из {len(samples)} спектров")
    print(f"   KS до Пуассона: {report.ks_poisson:.4f}")
    print(f"   KS до Вигнера:  {report.ks_wigner:.4f}")
    print(f"   Доля s < 0.1:   {report.small_spacing_fraction:.4f}")
    print(f"   Ближе к:        {report.preferred_model}")

    if output:
        out_dir = Path(output)
        name = SPACINGS_HEPS_NAME if kind == "Heps" else SPACINGS_H0_NAME
        write_spacings(out_dir / name, pooled)
        write_fit_report(out_dir / FIT_REPORT_NAME, {"pooled": report})
        logger.info(f"💾 Результаты записаны в {out_dir}")

    return 2 if failures else 0


def cmd_classical(
    config_path: str,
    seed: Optional[int] = None,
    output: Optional[str] = None,
    test_mode: bool = False,
    dump_collisions: bool = False,
) -> int:
    """
    Только классическая часть: показатели Ляпунова и средние O по траекториям.

    Returns:
        0 при успехе, 2 при частичном успехе, 1 при ошибке.
    """
    logger.info(f"▶️ Запущена команда classical. Config: {config_path}")
    try:
        config, run_dir = _load_config(config_path, seed, output, test_mode, dump_collisions, None)
        runner = ExperimentRunner(config, run_dir)
        rows = runner.run_classical()
    except FileNotFoundError as e:
        logger.error(f"❌ Файл не найден: {e}")
        return 1
    except ConfigError as e:
        logger.error(f"❌ Ошибка валидации: {e}")
        return 1
    except Exception as e:
        logger.critical(f"💥 Критическая ошибка в классическом расчёте: {e}", exc_info=True)
        return 1

    for row in rows:
        print(
            f"  {row['shape']} #{row['trajectory']}: "
            f"Ляпунов {row['lyapunov_per_collision']:.4f} / столкновение, "
            f"<O> = {row['O_average']:.4f}"
        )
    if not rows:
        return 1
    return 2 if runner.get_errors() else 0


def cmd_help() -> None:
    """Выводит справку по использованию CLI."""
    logger.info("❓ Запрошена справка")

    help_text = """
╔══════════════════════════════════════════════════════════════════╗
║         Parabolab: спектры биллиарда с параболическими стенками  ║
╚══════════════════════════════════════════════════════════════════╝

📖 ИСПОЛЬЗОВАНИЕ:

  python main.py <команда> [аргументы]

📋 КОМАНДЫ:

  run <config.json> [опции]
    Полный эксперимент: классика, спектр H0, H(eps), статистика, манифест

    Опции:
      --seed <n>             Перекрыть seed из конфигурации
      --out <директория>     Директория отчёта (от текущей директории)
      --test-mode            Разрешить вырожденные формы (прямоугольник)
      --dump-collisions      Сохранить таблицу столкновений первой траектории
      --workers <n>          Число процессов для форм

  validate <config.json> [--test-mode]
    Проверяет конфигурацию и печатает все нарушения

  stats <spectrum.txt>... [--out <директория>] [--window <w>]
    Пересчитывает статистику расстояний по сохранённым спектрам

  classical <config.json> [--seed <n>] [--out <директория>] [--test-mode] [--dump-collisions]
    Только классическая часть (Ляпунов, средние O)

  help
    Показывает эту справку

  Общие флаги: -v/--verbose (DEBUG в консоль), -q/--quiet (только предупреждения)

📄 ФОРМАТ JSON:

  {
    "seed": 20240611,
    "output_dir": "runs/default",
    "shapes": [{"preset": "ensemble_a"}, {"preset": "ensemble_b"}, {"preset": "ensemble_c"}],
    "basis": {"n_max_x": 60, "n_max_y": 60, "keep_fraction": 0.25, "inflation": 1.25, "stability": "pattern"},
    "perturb": {"epsilon_rule": "sqrt-Ebar-Delta", "delta_window": 50},
    "stats": {"unfold_window": 25, "histogram_bins": 25},
    "classical": {"n_collisions": 10000, "trajectories": 2}
  }

🔗 ДОКУМЕНТАЦИЯ:

  Подробная документация: doc/overview.md
  Архитектура: doc/technical/architecture.md
"""
    print(help_text)


def _int_option(args: list, i: int, name: str) -> Optional[int]:
    try:
        return int(args[i + 1])
    except (IndexError, ValueError):
        logger.error(f"❌ Опция {name} требует целое число")
        return None


def parse_args(args: list) -> int:
    """
    Парсит аргументы командной строки и выполняет команды.

    Args:
        args: Список аргументов (обычно sys.argv[1:]).

    Returns:
        Exit code (0 = success, 2 = partial success, 1 = error).
    """
    logger.debug(f"🔍 Парсинг аргументов CLI: {args}")

    # Флаги логирования уже применены в main.py
    args = [arg for arg in args if arg not in ("-v", "--verbose", "-q", "--quiet")]

    if not args or args[0] in ["help", "--help", "-h"]:
        logger.debug("📋 Вызвана справка")
        cmd_help()
        return 0

    command = args[0]
    logger.debug(f"🔧 Команда: {command}")

    if command in ("run", "classical", "validate"):
        if len(args) < 2:
            logger.error(f"❌ Не указан файл конфигурации для {command}")
            return 1

        config_path = args[1]
        seed = None
        output = None
        workers = None
        test_mode = False
        dump_collisions = False

        i = 2
        while i < len(args):
            if args[i] == "--seed" and i + 1 < len(args):
                seed = _int_option(args, i, "--seed")
                if seed is None:
                    return 1
                logger.debug(f"🔧 CLI опция: seed={seed}")
                i += 2
            elif args[i] in ["-o", "--out"] and i + 1 < len(args):
                output = args[i + 1]
                logger.debug(f"🔧 CLI опция: out={output}")
                i += 2
            elif args[i] == "--workers" and i + 1 < len(args):
                workers = _int_option(args, i, "--workers")
                if workers is None:
                    return 1
                i += 2
            elif args[i] == "--test-mode":
                test_mode = True
                logger.debug("🔧 CLI опция: test mode")
                i += 1
            elif args[i] == "--dump-collisions":
                dump_collisions = True
                i += 1
            else:
                logger.warning(f"⚠️ Неизвестная опция CLI: {args[i]}")
                i += 1

        if command == "run":
            return cmd_run(config_path, seed, output, test_mode, dump_collisions, workers)
        if command == "classical":
            return cmd_classical(config_path, seed, output, test_mode, dump_collisions)
        return cmd_validate(config_path, test_mode)

    elif command == "stats":
        paths: List[str] = []
        output = None
        window = StatsSettings().unfold_window

        i = 1
        while i < len(args):
            if args[i] in ["-o", "--out"] and i + 1 < len(args):
                output = args[i + 1]
                i += 2
            elif args[i] == "--window" and i + 1 < len(args):
                window = _int_option(args, i, "--window")
                if window is None:
                    return 1
                i += 2
            elif args[i].startswith("-"):
                logger.warning(f"⚠️ Неизвестная опция CLI: {args[i]}")
                i += 1
            else:
                paths.append(args[i])
                i += 1

        if not paths:
            logger.error("❌ Не указаны файлы спектров для stats")
            return 1
        try:
            settings = StatsSettings(unfold_window=window)
        except ValueError as e:
            logger.error(f"❌ {e}")
            return 1
        return cmd_stats(paths, output, settings)

    else:
        logger.error(f"❌ Неизвестная команда: {command}")
        return 1
