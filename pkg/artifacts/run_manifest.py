# artifacts/run_manifest.py
"""
RunManifest: the provenance record written into every output directory.
"""

import json
import platform
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from config import TOOL_NAME, TOOL_VERSION
from errors import IoFailure
from .fingerprint import fingerprint_config, hash_file

RUN_MANIFEST_FILE = "run_manifest.json"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")


@dataclass
class RunManifest:
    command: str
    config: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    inputs: Dict[str, str] = field(default_factory=dict)
    outputs: Dict[str, str] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)
    tool: str = TOOL_NAME
    tool_version: str = TOOL_VERSION
    started_at: str = field(default_factory=_now)
    finished_at: str = ""

    @property
    def config_fingerprint(self) -> str:
        return fingerprint_config(self.config)

    def add_input(self, name: str, fingerprint: str) -> None:
        self.inputs[name] = fingerprint

    @contextmanager
    def timed(self, phase: str):
        """Accumulate wall time (seconds) spent in ``phase``."""
        started = time.perf_counter()
        try:
            yield
        finally:
            self.timings[phase] = self.timings.get(phase, 0.0) + (time.perf_counter() - started)

    def record_outputs(self, out_dir: Union[str, Path], names: List[str]) -> None:
        out_dir = Path(out_dir)
        for name in names:
            path = out_dir / name
            if path.is_file():
                self.outputs[name] = hash_file(path)

    def to_dict(self) -> dict:
        return {
            "tool": self.tool,
            "tool_version": self.tool_version,
            "command": self.command,
            "seed": self.seed,
            "config": self.config,
            "config_fingerprint": self.config_fingerprint,
            "inputs": dict(sorted(self.inputs.items())),
            "outputs": dict(sorted(self.outputs.items())),
            "timings": {k: round(v, 6) for k, v in sorted(self.timings.items())},
            "python": platform.python_version(),
            "started_at": self.started_at,
            "finished_at": self.finished_at,
        }

    def write(self, out_dir: Union[str, Path]) -> Path:
        """Write ``run_manifest.json`` into ``out_dir`` (replacing any previous one)."""
        self.finished_at = _now()
        path = Path(out_dir) / RUN_MANIFEST_FILE
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8") as f:
                json.dump(self.to_dict(), f, indent=2, sort_keys=True)
        except OSError as e:
            raise IoFailure(f"Cannot write run manifest: {e.strerror or e}", path=str(path)) from e
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "RunManifest":
        path = Path(path)
        if path.is_dir():
            path = path / RUN_MANIFEST_FILE
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise IoFailure(f"Cannot read run manifest: {e}", path=str(path)) from e
        return cls(
            command=data.get("command", ""),
            config=data.get("config", {}),
            seed=data.get("seed"),
            inputs=data.get("inputs", {}),
            outputs=data.get("outputs", {}),
            timings=data.get("timings", {}),
            tool=data.get("tool", TOOL_NAME),
            tool_version=data.get("tool_version", TOOL_VERSION),
            started_at=data.get("started_at", ""),
            finished_at=data.get("finished_at", ""),
        )
