"""Canonical JSON helpers.

Serialization everywhere uses sorted keys and fixed separators, and
Python's repr-based float formatting round-trips doubles bit-exactly, so
identical in-memory values always produce identical bytes — the property
the determinism checks rely on.
"""

from __future__ import annotations

import json
from pathlib import Path


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def dump_canonical(obj, path) -> None:
    Path(path).write_text(canonical_dumps(obj) + "\n", encoding="ascii")


def load_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))
