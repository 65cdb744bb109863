"""
Модели манифеста запуска.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


@dataclass
class ShapeOutcome:
    """
    Итог обработки одной формы.

    Attributes:
        name: Имя формы.
        status: "ok" или "failed".
        artifacts: Имя артефакта -> путь к файлу.
        classical: Сводка классической динамики (Ляпунов, средние O).
        diagnostics: Численные диагностики (eps, delta_O, Вейль, устойчивость...).
        timings: Время стадий в секундах.
        error: Описание ошибки для status == "failed".
    """

    name: str
    status: str = "ok"
    artifacts: Dict[str, str] = field(default_factory=dict)
    classical: Dict[str, Any] = field(default_factory=dict)
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "status": self.status,
            "error": self.error,
            "artifacts": dict(self.artifacts),
            "classical": dict(self.classical),
            "diagnostics": dict(self.diagnostics),
            "timings": dict(self.timings),
        }


@dataclass
class RunManifest:
    """
    Манифест запуска: эхо конфигурации, артефакты по формам, сводные отчёты.

    Манифест пишется последним и атомарно; каждый путь в нём существует.
    """

    config: Dict[str, Any]
    version: str
    shapes: List[ShapeOutcome] = field(default_factory=list)
    pooled: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    pooled_artifacts: Dict[str, str] = field(default_factory=dict)
    classical_summary: Dict[str, Any] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def failed(self) -> List[str]:
        return [outcome.name for outcome in self.shapes if not outcome.ok]

    @property
    def all_failed(self) -> bool:
        return bool(self.shapes) and len(self.failed) == len(self.shapes)

    def artifact_paths(self) -> List[str]:
        """Все пути, на которые ссылается манифест."""
        paths = list(self.pooled_artifacts.values())
        for outcome in self.shapes:
            paths.extend(outcome.artifacts.values())
        return paths

    def to_dict(self) -> Dict[str, Any]:
        return {
            "version": self.version,
            "config": self.config,
            "shapes": [outcome.to_dict() for outcome in self.shapes],
            "pooled": self.pooled,
            "pooled_artifacts": dict(self.pooled_artifacts),
            "classical_summary": self.classical_summary,
            "timings": dict(self.timings),
        }
