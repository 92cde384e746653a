"""Degree / arcminute conversion used at the I/O boundary."""
from __future__ import annotations

import math
import re
from decimal import ROUND_HALF_UP, Decimal

_DMS = re.compile(r"""^\s*(-?\d+)\s*(?:°|d|deg)\s*(?:(\d+(?:\.\d+)?)\s*(?:′|'|m)?)?\s*$""")


def to_arcminutes(theta_rad: float) -> int:
    """Round to the nearest arcminute; exact half-minutes round away from zero."""
    minutes = Decimal(repr(math.degrees(theta_rad) * 60.0))
    return int(minutes.quantize(Decimal(1), rounding=ROUND_HALF_UP))


def format_dms(theta_rad: float) -> str:
    total = to_arcminutes(theta_rad)
    sign = "-" if total < 0 else ""
    d, m = divmod(abs(total), 60)
    return f"{sign}{d}°{m:02d}′"


def parse_dms(text: str) -> float:
    """Parse ``12°14′``, ``12d14'`` or ``45°`` into radians."""
    match = _DMS.match(text)
    if not match:
        raise ValueError(f"not a degree-arcminute angle: {text!r}")
    deg = int(match.group(1))
    minutes = float(match.group(2) or 0.0)
    sign = -1.0 if match.group(1).startswith("-") else 1.0
    return math.radians(deg + sign * minutes / 60.0)


def arcminute_gap(a_rad: float, b_rad: float) -> float:
    return abs(math.degrees(a_rad - b_rad)) * 60.0
