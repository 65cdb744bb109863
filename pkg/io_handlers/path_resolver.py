"""
Разрешение путей к файлам.

Выходная директория из конфигурации разрешается относительно директории
JSON файла, а пути артефактов в манифесте записываются относительно
директории запуска.
"""

import logging
from pathlib import Path
from typing import Optional, Union

logger = logging.getLogger(__name__)


class PathResolver:
    """
    Разрешитель путей относительно конфигурационного файла.

    Attributes:
        config_dir: Директория, в которой находится JSON конфигурация.

    Example:
        >>> resolver = PathResolver(Path("/home/user/lab/run.json"))
        >>> resolver.output_dir("runs/default")
        PosixPath('/home/user/lab/runs/default')
        >>> resolver.output_dir("runs/default", override="/tmp/out")
        PosixPath('/tmp/out')
    """

    def __init__(self, config_path: Union[str, Path]):
        """
        Инициализация resolver'а.

        Raises:
            ValueError: Если config_path не существует или не является файлом.
        """
        self.config_path = Path(config_path).resolve()

        if not self.config_path.exists():
            raise ValueError(f"Конфигурационный файл не найден: {self.config_path}")
        if not self.config_path.is_file():
            raise ValueError(
                f"Путь должен указывать на файл, а не директорию: {self.config_path}"
            )

        self.config_dir = self.config_path.parent

    def resolve(self, path: Union[str, Path]) -> Path:
        """
        Абсолютный путь; относительный разрешается от config_dir.

        Метод НЕ проверяет существование файла.
        """
        path_obj = Path(path)
        result = path_obj.resolve() if path_obj.is_absolute() else (self.config_dir / path_obj).resolve()
        logger.debug(
            f'🗂️ Резолюция пути: Input="{path}" | Base="{self.config_dir}" | Result="{result}"'
        )
        return result

    def output_dir(self, configured: Union[str, Path], override: Optional[Union[str, Path]] = None) -> Path:
        """
        Директория запуска: флаг --out (от текущей директории) или поле конфигурации.
        """
        if override is not None:
            result = Path(override).resolve()
            logger.debug(f"🗂️ Выходная директория из --out: {result}")
            return result
        return self.resolve(configured)


def relative_artifact(path: Union[str, Path], run_dir: Union[str, Path]) -> str:
    """
    Путь артефакта относительно директории запуска (POSIX-разделители).

    Raises:
        ValueError: Если артефакт лежит вне директории запуска.

    Example:
        >>> relative_artifact("/runs/a/ensemble_a/spacings.csv", "/runs/a")
        'ensemble_a/spacings.csv'
    """
    path_obj = Path(path).resolve()
    base = Path(run_dir).resolve()
    try:
        return path_obj.relative_to(base).as_posix()
    except ValueError:
        error_msg = f"Артефакт {path_obj} находится вне директории запуска {base}"
        logger.error(f"❌ {error_msg}")
        raise ValueError(error_msg)
