"""Small shared helpers."""

from __future__ import annotations

import math


def round_half_up(x: float) -> int:
    """Round with .5 going up, snapping away float noise first (0.15 * 10 is
    1.4999999999999998 in float64 but must round like 1.5)."""
    return math.floor(round(x, 9) + 0.5)
