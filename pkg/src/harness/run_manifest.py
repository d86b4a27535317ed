"""
Run manifests for CLI commands.

Tracks one command execution: its parameters, seed and replication count,
the engine versions, start/end time, wall time and final status. A manifest
is written next to the output file as `<out>.manifest` in the same
`key = value` grammar as the configuration files, or logged when output goes
to stdout.
"""

import logging
import platform
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import numpy as np
import scipy

import src
from src.core.errors import ArgumentError
from src.core.model import format_key_values

logger = logging.getLogger(__name__)

RUN_STATUSES = ('running', 'completed', 'failed', 'cancelled')
MANIFEST_SUFFIX = ".manifest"


def engine_versions() -> Dict[str, str]:
    return {
        "package": src.__version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def manifest_path(out: Union[str, Path]) -> Path:
    """Sibling manifest path: results.csv → results.csv.manifest."""
    out = Path(out)
    return out.with_name(out.name + MANIFEST_SUFFIX)


@dataclass
class RunManifest:
    """
    Metadata for one command run.

    Status moves from `running` to one of `completed`, `failed` or
    `cancelled`; end_time is set when it leaves `running`.
    """
    command: str
    parameters: Dict[str, str]
    seed: Optional[int] = None
    reps: Optional[int] = None
    run_id: str = ""
    start_time: datetime = field(default_factory=lambda: datetime.now(timezone.utc))
    end_time: Optional[datetime] = None
    status: str = 'running'
    rows_written: int = 0
    error_message: Optional[str] = None
    versions: Dict[str, str] = field(default_factory=engine_versions)
    _started: float = field(default_factory=time.perf_counter, repr=False)
    _wall_time: Optional[float] = field(default=None, repr=False)

    def __post_init__(self):
        if not self.run_id:
            self.run_id = f"{self.command}_{self.start_time.strftime('%Y%m%d_%H%M%S_%f')[:-3]}"

    @classmethod
    def start(
        cls,
        command: str,
        parameters: Mapping[str, Any],
        seed: Optional[int] = None,
        reps: Optional[int] = None,
    ) -> "RunManifest":
        """
        Start a new run record.

        Args:
            command: CLI subcommand name
            parameters: Full parameter set; values are stored as text
            seed: Master seed, if the command is stochastic
            reps: Replications, if the command is stochastic

        Returns:
            Manifest in status `running`
        """
        text_parameters = {key: _as_text(value) for key, value in parameters.items() if value is not None}
        manifest = cls(command=command, parameters=text_parameters, seed=seed, reps=reps)
        logger.debug(f"Started run: {manifest.run_id}")
        return manifest

    def finish(self, status: str = 'completed', error_message: Optional[str] = None) -> None:
        """Move to a terminal status and record end and wall time."""
        if status not in RUN_STATUSES or status == 'running':
            raise ArgumentError(f"invalid terminal status {status!r}", "status", status)
        self.status = status
        self.error_message = error_message
        self.end_time = datetime.now(timezone.utc)
        self._wall_time = time.perf_counter() - self._started
        logger.debug(f"Run {self.run_id} finished with status {status} after {self._wall_time:.2f}s")

    @property
    def wall_time_seconds(self) -> Optional[float]:
        return self._wall_time

    def to_dict(self) -> Dict[str, str]:
        values = {
            "run_id": self.run_id,
            "command": self.command,
            "status": self.status,
            "start_time": self.start_time.isoformat(),
            "end_time": self.end_time.isoformat() if self.end_time else "",
            "wall_time_seconds": f"{self._wall_time:.3f}" if self._wall_time is not None else "",
            "seed": "" if self.seed is None else str(self.seed),
            "reps": "" if self.reps is None else str(self.reps),
            "rows_written": str(self.rows_written),
        }
        if self.error_message:
            values["error_message"] = self.error_message.replace("\n", " ")
        values.update({f"version.{name}": version for name, version in self.versions.items()})
        values.update({f"param.{name}": value for name, value in sorted(self.parameters.items())})
        return values

    def to_text(self) -> str:
        return format_key_values(self.to_dict())

    def write(self, out: Union[str, Path]) -> Path:
        """Write the manifest next to `out` and return its path."""
        path = manifest_path(out)
        path.write_text(self.to_text(), encoding="utf-8")
        logger.debug(f"Wrote manifest {path}")
        return path

    def emit(self, out: Optional[Union[str, Path]]) -> None:
        """Write beside `out`, or log at INFO when output went to stdout."""
        if out is not None and str(out) != "-":
            self.write(out)
        else:
            logger.info("Run manifest: " + "; ".join(f"{k}={v}" for k, v in self.to_dict().items()))


def _as_text(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, "value") and not isinstance(value, (int, str)):
        return str(value.value)
    return str(value)
