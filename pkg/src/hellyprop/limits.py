"""Desk-scale size gates for the exhaustive searches.

The brute-force verifiers and the direct piercing search refuse inputs past a
hard size gate instead of silently grinding.  Set the environment variable
``HELLY_ORACLE_LIMITS`` to an integer to replace the family-size gates.
"""

from __future__ import annotations

import os

BRUTE_FAMILY_LIMIT = 20
PIERCE_FAMILY_LIMIT = 12
PQ_FAMILY_LIMIT = 16
TRANSVERSAL_LIMIT = 10**6


def family_gate(default: int) -> int:
    raw = os.environ.get("HELLY_ORACLE_LIMITS")
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"HELLY_ORACLE_LIMITS must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError("HELLY_ORACLE_LIMITS must be positive")
    return value


def check_family_size(n: int, default: int, what: str) -> None:
    gate = family_gate(default)
    if n > gate:
        raise ValueError(
            f"{what} is gated at {gate} members (got {n}); "
            "set HELLY_ORACLE_LIMITS to raise the gate"
        )
