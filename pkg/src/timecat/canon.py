"""Canonical JSON: one stable byte form per value, for golden tests."""

from __future__ import annotations

import json


def canonical_json(value) -> str:
    """Serialize with sorted keys and fixed separators; newline-terminated."""
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"
