"""Line-oriented protocol files.

One non-blank line per step.  Entries are whitespace separated:

    x:theta_deg         half-wave-plate coin, angle in degrees
    x:id                explicit identity coin
    x:custom(a,b,c,d)   arbitrary 2x2 coin, row-major, Python complex literals
                        (eight reals are read as re,im pairs)
    -                   step with no coins (pure shift)

``#`` starts a comment.  Angles are converted to radians on parse.
"""
from __future__ import annotations

import math
import re
from pathlib import Path

import numpy as np

from .angles import format_dms
from .core import IDENTITY, Angle, CoinOp, Custom, Protocol, StepSpec
from .errors import NonUnitaryCoin, ProtocolFileError, WalkError

_ENTRY = re.compile(r"(-?\d+):(custom\([^)]*\)|\S+)")


def _parse_custom(body: str, lineno: int) -> Custom:
    parts = [p.strip() for p in body.split(",") if p.strip()]
    if len(parts) not in (4, 8):
        raise ProtocolFileError(f"custom coin needs 4 complex or 8 real entries, got {len(parts)}", lineno)
    try:
        if len(parts) == 4:
            vals = [complex(p.replace(" ", "")) for p in parts]
        else:
            re_im = [float(p) for p in parts]
            vals = [complex(re_im[k], re_im[k + 1]) for k in range(0, 8, 2)]
    except ValueError as exc:
        raise ProtocolFileError(f"bad number in custom coin: {exc}", lineno) from None
    return Custom(CoinOp(np.array(vals).reshape(2, 2)))


def _parse_line(line: str, lineno: int) -> StepSpec:
    if line.strip() == "-":
        return StepSpec()
    coins = {}
    pos = 0
    for match in _ENTRY.finditer(line):
        gap = line[pos : match.start()]
        if gap.strip():
            raise ProtocolFileError(f"unparseable text {gap.strip()!r}", lineno)
        pos = match.end()
        x, body = int(match.group(1)), match.group(2)
        if x in coins:
            raise ProtocolFileError(f"position {x} listed twice", lineno)
        if body == "id":
            coins[x] = IDENTITY
        elif body.startswith("custom("):
            coins[x] = _parse_custom(body[len("custom(") : -1], lineno)
        else:
            try:
                deg = float(body)
            except ValueError:
                raise ProtocolFileError(f"bad coin entry {match.group(0)!r}", lineno) from None
            if not math.isfinite(deg):
                raise ProtocolFileError(f"angle must be finite in {match.group(0)!r}", lineno)
            coins[x] = Angle(math.radians(deg))
    if line[pos:].strip():
        raise ProtocolFileError(f"unparseable text {line[pos:].strip()!r}", lineno)
    try:
        return StepSpec(coins)
    except (WalkError, NonUnitaryCoin) as exc:
        raise ProtocolFileError(str(exc), lineno) from None


def parse_protocol(text: str) -> Protocol:
    steps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        steps.append(_parse_line(line, lineno))
    if not steps:
        raise ProtocolFileError("protocol file contains no steps")
    return Protocol(tuple(steps))


def load_protocol(path: str | Path) -> Protocol:
    return parse_protocol(Path(path).read_text(encoding="utf-8"))


def dump_protocol(protocol: Protocol, header: str | None = None) -> str:
    lines = [f"# {h}" for h in (header or "").splitlines()]
    for n, spec in enumerate(protocol.steps, start=1):
        entries = []
        for x in sorted(spec.coins):
            action = spec.coins[x]
            if isinstance(action, Angle):
                entries.append(f"{x}:{float(math.degrees(action.theta))!r}")
            elif isinstance(action, Custom):
                vals = ",".join(f"{float(v.real)!r},{float(v.imag)!r}" for v in action.coin.m.ravel())
                entries.append(f"{x}:custom({vals})")
            else:
                entries.append(f"{x}:id")
        comment = "  # " + ", ".join(
            f"x={x}: {format_dms(a.theta)}" for x, a in sorted(spec.coins.items()) if isinstance(a, Angle)
        )
        lines.append((" ".join(entries) or "-") + (comment if comment != "  # " else f"  # step {n}"))
    return "\n".join(lines) + "\n"
