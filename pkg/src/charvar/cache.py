"""JSON result cache.

Each entry is one file ``<cache_dir>/<key>.json``.  The directory comes from
the explicit argument, else the CHARVAR_CACHE environment variable; with
neither set nothing is persisted.
"""
from __future__ import annotations

import json
import os
import tempfile

ENV = "CHARVAR_CACHE"


def resolve(cache_dir: str | None) -> str | None:
    return cache_dir or os.environ.get(ENV) or None


def load_json(cache_dir: str | None, key: str):
    d = resolve(cache_dir)
    if d is None:
        return None
    path = os.path.join(d, key + ".json")
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, ValueError):
        return None


def store_json(cache_dir: str | None, key: str, doc) -> None:
    d = resolve(cache_dir)
    if d is None:
        return
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
    os.replace(tmp, os.path.join(d, key + ".json"))
