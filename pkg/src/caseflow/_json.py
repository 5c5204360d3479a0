"""Strict-JSON float encoding: infinities become string markers.

Plain JSON has no Infinity literal, and the browser client must be able to
parse every payload, so non-finite statistics (perfect-separation F values)
are carried as the strings "Infinity"/"-Infinity".
"""

from __future__ import annotations

import math


def encode_float(v: float | None):
    if v is None:
        return None
    v = float(v)
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    return v


def decode_float(v) -> float | None:
    if v is None:
        return None
    if v == "Infinity":
        return math.inf
    if v == "-Infinity":
        return -math.inf
    return float(v)
