"""Location and loading of the shipped JSON data files.

The environment variable ``TCRYST_DATA_DIR`` points to a directory whose
files take precedence over the packaged copies.
"""
from __future__ import annotations

import json
import os
from functools import lru_cache
from importlib import resources
from pathlib import Path

ENV_VAR = "TCRYST_DATA_DIR"


def data_path(name: str) -> Path:
    override = os.environ.get(ENV_VAR)
    if override:
        candidate = Path(override) / name
        if candidate.exists():
            return candidate
    return Path(str(resources.files("tcryst") / "data" / name))


@lru_cache(maxsize=None)
def _load_cached(path: str, mtime: float) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def load_json(name: str) -> dict:
    path = data_path(name)
    return _load_cached(str(path), path.stat().st_mtime)
