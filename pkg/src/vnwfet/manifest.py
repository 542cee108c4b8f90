"""Run manifests: sidecar JSON records that make outputs reproducible.

Every CLI command writes `<output>.manifest.json` next to its outputs with
the command line, a sha256 of every input file, the fully resolved
configuration (no hidden defaults), the tool version, and a timestamp.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, Optional

from . import __version__


def sha256_of(path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    command: str
    inputs: Dict[str, str] = field(default_factory=dict)   # path -> sha256
    config: Dict[str, object] = field(default_factory=dict)
    version: str = __version__
    timestamp: Optional[str] = None

    def add_input(self, path) -> None:
        self.inputs[str(path)] = sha256_of(path)

    def to_dict(self) -> dict:
        ts = self.timestamp or datetime.now(timezone.utc).isoformat()
        return {
            "command": self.command,
            "inputs": dict(sorted(self.inputs.items())),
            "config": self.config,
            "version": self.version,
            "timestamp": ts,
        }

    def write_beside(self, output_path) -> Path:
        """Write `<output_path>.manifest.json`; returns its path."""
        out = Path(str(output_path) + ".manifest.json")
        out.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=False,
                                  default=str) + "\n")
        return out
