#!/usr/bin/env python3
"""
Artifact writer for CLI runs.

Every run writes its data files plus a manifest.json listing them:

    with OutputWriter(out_dir, command, config) as writer:
        writer.write_csv("spectrum.csv", frame, "branch-tracked eigenvalues")
"""

import hashlib
import json
import logging
import time
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd
from pydantic import BaseModel

from . import __version__
from .config import BetadyneConfig
from .serialization import to_jsonable

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
CSV_FLOAT_FORMAT = "%.15g"

# Keys that never change results
HASH_EXCLUDED_KEYS = ("out", "threads")


def config_hash(config: Dict[str, Any]) -> str:
    """SHA-256 of the canonical JSON config without output-only keys"""
    relevant = {key: value for key, value in config.items() if key not in HASH_EXCLUDED_KEYS}
    canonical = json.dumps(to_jsonable(relevant), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class OutputFile(BaseModel):
    name: str
    description: str


class OutputManifest(BaseModel):
    command: List[str]
    config_hash: str
    version: str
    files: List[OutputFile]
    duration_seconds: float
    settings: Dict[str, Any] = {}
    status: str = "complete"


class OutputWriter:
    """Writes run artifacts into one directory and records them in a manifest"""

    def __init__(self, out_dir, command: List[str], config: Dict[str, Any]):
        self.out_dir = Path(out_dir)
        self.command = list(command)
        self.config = config
        self.files: List[OutputFile] = []
        self._started: Optional[float] = None

    def __enter__(self):
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self._started = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        status = "complete" if exc_type is None else f"failed: {exc_type.__name__}"
        self.write_manifest(status)
        return False

    def _register(self, name: str, description: str) -> Path:
        self.files.append(OutputFile(name=name, description=description))
        return self.out_dir / name

    def write_csv(self, name: str, frame: pd.DataFrame, description: str) -> Path:
        path = self._register(name, description)
        frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
        logger.info("📄 Wrote %s (%d rows)", path, len(frame))
        return path

    def write_json(self, name: str, data: Any, description: str) -> Path:
        path = self._register(name, description)
        with open(path, "w") as f:
            json.dump(to_jsonable(data), f, indent=2, sort_keys=True)
            f.write("\n")
        logger.info("📄 Wrote %s", path)
        return path

    def write_manifest(self, status: str = "complete") -> Path:
        duration = time.perf_counter() - self._started if self._started is not None else 0.0
        manifest = OutputManifest(
            command=self.command,
            config_hash=config_hash(self.config),
            version=__version__,
            files=self.files,
            duration_seconds=round(duration, 6),
            settings=BetadyneConfig.describe(),
            status=status,
        )
        path = self.out_dir / MANIFEST_NAME
        with open(path, "w") as f:
            json.dump(manifest.model_dump(), f, indent=2, sort_keys=True)
            f.write("\n")
        return path
