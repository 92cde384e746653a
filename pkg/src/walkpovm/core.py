"""State-vector evolution of a walker carrying a two-level coin on the integer line.

A :class:`WalkState` is a dense ``(n_sites, 2)`` amplitude array plus the
lattice position of row 0.  Coin basis order is ``(H, V)``.  One step of
the walk applies a per-site coin and then the conditional shift, which moves
H amplitude to ``x + 1`` and V amplitude to ``x - 1``.

All objects are immutable; every operation returns a new state.
"""
from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Union

import numpy as np

from . import _kernels
from .errors import DomainError, NonUnitaryCoin, ZeroWeight

ATOL = 1e-12
UNITARY_ATOL = 1e-10
PRUNE = 1e-15
MAX_ANGLE = math.pi / 4

__all__ = [
    "Angle",
    "CoinOp",
    "CoinState",
    "Custom",
    "IDENTITY",
    "Identity",
    "Protocol",
    "StepSpec",
    "WalkState",
    "apply_coins",
    "apply_step",
    "apply_step_adjoint",
    "coin_matrix",
    "coin_state_at",
    "position_distribution",
    "run",
    "shift",
    "shift_inverse",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CoinState:
    """Coin amplitudes on ``|H>`` and ``|V>``."""

    h: complex
    v: complex

    @classmethod
    def H(cls) -> "CoinState":
        return cls(1.0 + 0j, 0j)

    @classmethod
    def V(cls) -> "CoinState":
        return cls(0j, 1.0 + 0j)

    @classmethod
    def from_array(cls, vec) -> "CoinState":
        vec = np.asarray(vec, dtype=np.complex128).reshape(2)
        return cls(complex(vec[0]), complex(vec[1]))

    def __post_init__(self):
        object.__setattr__(self, "h", complex(self.h))
        object.__setattr__(self, "v", complex(self.v))
        if not all(map(math.isfinite, (self.h.real, self.h.imag, self.v.real, self.v.imag))):
            raise ValueError("coin amplitudes must be finite")

    @property
    def norm(self) -> float:
        return math.sqrt(abs(self.h) ** 2 + abs(self.v) ** 2)

    def is_normalized(self, atol: float = ATOL) -> bool:
        return abs(abs(self.h) ** 2 + abs(self.v) ** 2 - 1.0) <= atol

    def normalized(self) -> "CoinState":
        n = self.norm
        if n == 0.0:
            raise ZeroDivisionError("cannot normalise the zero coin state")
        return CoinState(self.h / n, self.v / n)

    def as_array(self) -> np.ndarray:
        return np.array([self.h, self.v], dtype=np.complex128)

    def inner(self, other: "CoinState") -> complex:
        """``<self|other>``."""
        return self.h.conjugate() * other.h + self.v.conjugate() * other.v

    def fidelity(self, other: "CoinState") -> float:
        return abs(self.inner(other)) ** 2


@dataclass(frozen=True, eq=False)
class CoinOp:
    """A 2x2 complex matrix acting on the coin."""

    m: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=np.complex128)
        if m.shape != (2, 2):
            raise ValueError(f"coin matrix must be 2x2, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("coin matrix must be finite")
        object.__setattr__(self, "m", _frozen(m))

    def unitarity_defect(self) -> float:
        return float(np.max(np.abs(self.m.conj().T @ self.m - np.eye(2))))

    def is_unitary(self, atol: float = UNITARY_ATOL) -> bool:
        return self.unitarity_defect() <= atol

    @property
    def dagger(self) -> "CoinOp":
        return CoinOp(self.m.conj().T)

    def __matmul__(self, other):
        if isinstance(other, CoinOp):
            return CoinOp(self.m @ other.m)
        if isinstance(other, CoinState):
            return CoinState.from_array(self.m @ other.as_array())
        return NotImplemented


def coin_matrix(theta: float) -> CoinOp:
    """Half-wave-plate coin ``[[cos 2t, sin 2t], [sin 2t, -cos 2t]]`` at angle ``theta`` (radians)."""
    if not math.isfinite(theta):
        raise DomainError(f"coin angle must be finite, got {theta!r}")
    c, s = math.cos(2.0 * theta), math.sin(2.0 * theta)
    return CoinOp(np.array([[c, s], [s, -c]]))


# ---- step description ----------------------------------------------------

@dataclass(frozen=True)
class Angle:
    theta: float

    def matrix(self) -> np.ndarray:
        return coin_matrix(self.theta).m


@dataclass(frozen=True)
class Identity:
    def matrix(self) -> np.ndarray:
        return np.eye(2, dtype=np.complex128)


IDENTITY = Identity()


@dataclass(frozen=True)
class Custom:
    coin: CoinOp

    def matrix(self) -> np.ndarray:
        return self.coin.m


CoinAction = Union[Angle, Identity, Custom]


@dataclass(frozen=True)
class StepSpec:
    """Coin action per lattice position for one step; unlisted positions get the identity."""

    coins: Mapping[int, CoinAction] = field(default_factory=dict)

    def __post_init__(self):
        coins = {}
        for x, action in dict(self.coins).items():
            if not isinstance(action, (Angle, Identity, Custom)):
                raise TypeError(f"unsupported coin action at x={x}: {action!r}")
            if isinstance(action, Angle):
                t = action.theta
                if not (math.isfinite(t) and -ATOL <= t <= MAX_ANGLE + ATOL):
                    raise DomainError(f"coin angle at x={x} must lie in [0, pi/4], got {t!r}")
            elif isinstance(action, Custom) and not action.coin.is_unitary():
                raise NonUnitaryCoin(
                    f"custom coin at x={x} is not unitary "
                    f"(defect {action.coin.unitarity_defect():.3g})"
                )
            coins[int(x)] = action
        object.__setattr__(self, "coins", MappingProxyType(coins))
        xs = np.fromiter(coins, dtype=np.int64, count=len(coins))
        mats = np.empty((len(coins), 2, 2), dtype=np.complex128)
        angle_rows = [k for k, a in enumerate(coins.values()) if isinstance(a, Angle)]
        for k, a in enumerate(coins.values()):
            if not isinstance(a, Angle):
                mats[k] = a.matrix()
        if angle_rows:
            t2 = 2.0 * np.array([a.theta for a in coins.values() if isinstance(a, Angle)])
            c, s = np.cos(t2), np.sin(t2)
            mats[angle_rows] = np.stack([np.stack([c, s], -1), np.stack([s, -c], -1)], 1)
        object.__setattr__(self, "_xs", _frozen(xs))
        object.__setattr__(self, "_mats", _frozen(mats))

    @classmethod
    def from_angles(cls, angles: Mapping[int, float]) -> "StepSpec":
        return cls({x: Angle(t) for x, t in angles.items()})

    def coin_at(self, x: int) -> np.ndarray:
        return self.coins.get(x, IDENTITY).matrix()

    def site_coins(self, offset: int, n_sites: int, adjoint: bool = False) -> np.ndarray:
        """Per-site coin matrices for sites ``offset .. offset + n_sites - 1``."""
        out = np.empty((n_sites, 2, 2), dtype=np.complex128)
        out[:] = np.eye(2)
        idx = self._xs - offset
        keep = (idx >= 0) & (idx < n_sites)
        out[idx[keep]] = self._mats[keep]
        if adjoint:
            out = np.conj(np.swapaxes(out, 1, 2))
        return np.ascontiguousarray(out)


@dataclass(frozen=True)
class Protocol:
    """An ordered, non-empty sequence of steps."""

    steps: tuple

    def __post_init__(self):
        steps = tuple(self.steps)
        if not steps:
            raise DomainError("a protocol needs at least one step")
        for s in steps:
            if not isinstance(s, StepSpec):
                raise TypeError(f"protocol steps must be StepSpec, got {type(s).__name__}")
        object.__setattr__(self, "steps", steps)

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)


# ---- state -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WalkState:
    """Amplitudes ``amps[k] = (a_H, a_V)`` at lattice position ``offset + k``."""

    offset: int
    amps: np.ndarray

    def __post_init__(self):
        a = np.array(self.amps, dtype=np.complex128)
        if a.ndim != 2 or a.shape[1] != 2 or a.shape[0] == 0:
            raise ValueError(f"amplitude array must have shape (n, 2), got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "offset", int(self.offset))
        object.__setattr__(self, "amps", _frozen(a))

    @classmethod
    def localized(cls, coin: CoinState, x: int = 0) -> "WalkState":
        return cls(x, coin.as_array().reshape(1, 2))

    @classmethod
    def from_dict(cls, amplitudes: Mapping[int, Iterable[complex]]) -> "WalkState":
        lo, hi = min(amplitudes), max(amplitudes)
        a = np.zeros((hi - lo + 1, 2), dtype=np.complex128)
        for x, pair in amplitudes.items():
            a[x - lo] = np.asarray(
                pair.as_array() if isinstance(pair, CoinState) else list(pair), dtype=np.complex128
            )
        return cls(lo, a)

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.amps.shape[0])

    @property
    def support(self) -> tuple[int, int]:
        """Smallest and largest position with any nonzero amplitude."""
        nz = np.flatnonzero(np.any(self.amps != 0, axis=1))
        if nz.size == 0:
            return (self.offset, self.offset)
        return (self.offset + int(nz[0]), self.offset + int(nz[-1]))

    def norm_sq(self) -> float:
        return float(np.sum(_kernels.KERNELS["site_weights"](self.amps)))

    def amplitude(self, x: int) -> np.ndarray:
        i = x - self.offset
        if 0 <= i < self.amps.shape[0]:
            return self.amps[i].copy()
        return np.zeros(2, dtype=np.complex128)

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Amplitudes on positions ``lo..hi`` inclusive, zero-padded."""
        out = np.zeros((hi - lo + 1, 2), dtype=np.complex128)
        a0, a1 = max(lo, self.offset), min(hi, self.offset + self.amps.shape[0] - 1)
        if a0 <= a1:
            out[a0 - lo : a1 - lo + 1] = self.amps[a0 - self.offset : a1 - self.offset + 1]
        return out

    def inner(self, other: "WalkState") -> complex:
        """``<self|other>`` over the union of both supports."""
        lo = min(self.offset, other.offset)
        hi = max(self.offset + len(self.amps), other.offset + len(other.amps)) - 1
        return complex(np.vdot(self.window(lo, hi), other.window(lo, hi)))

    def fidelity(self, other: "WalkState") -> float:
        return abs(self.inner(other)) ** 2

    def max_deviation(self, other: "WalkState") -> float:
        lo = min(self.offset, other.offset)
        hi = max(self.offset + len(self.amps), other.offset + len(other.amps)) - 1
        return float(np.max(np.abs(self.window(lo, hi) - other.window(lo, hi))))


# ---- operations ----------------------------------------------------------

def apply_coins(state: WalkState, spec: StepSpec, adjoint: bool = False) -> WalkState:
    """Left-multiply each site's coin 2-vector by that site's coin (or its adjoint)."""
    if not spec.coins:
        return state
    coins = spec.site_coins(state.offset, state.amps.shape[0], adjoint=adjoint)
    return WalkState(state.offset, _kernels.KERNELS["apply_site_coins"](state.amps, coins))


def shift(state: WalkState) -> WalkState:
    """Conditional shift: H moves to ``x + 1``, V to ``x - 1``."""
    return WalkState(state.offset - 1, _kernels.KERNELS["shift"](state.amps))


def shift_inverse(state: WalkState) -> WalkState:
    """Adjoint of :func:`shift`: H moves to ``x - 1``, V to ``x + 1``."""
    return WalkState(state.offset - 1, _kernels.KERNELS["shift_inverse"](state.amps))


def apply_step(state: WalkState, spec: StepSpec) -> WalkState:
    """One walk step: coins, then the conditional shift."""
    coins = spec.site_coins(state.offset, state.amps.shape[0])
    return WalkState(state.offset - 1, _kernels.KERNELS["coin_shift"](state.amps, coins))


def apply_step_adjoint(state: WalkState, spec: StepSpec) -> WalkState:
    """Undo one step: inverse shift, then the adjoint coins."""
    return apply_coins(shift_inverse(state), spec, adjoint=True)


def run(state: WalkState, protocol: Protocol, *, history: bool = False):
    """Apply every step of ``protocol`` in order.

    With ``history=True`` the list of states after each step is returned
    instead of only the final state.
    """
    if not isinstance(protocol, Protocol):
        protocol = Protocol(tuple(protocol))
    states = []
    for spec in protocol:
        state = apply_step(state, spec)
        states.append(state)
    return states if history else state


def position_distribution(state: WalkState) -> dict[int, float]:
    """``P(x) = |a_H(x)|^2 + |a_V(x)|^2``; sites below 1e-15 are dropped."""
    w = _kernels.KERNELS["site_weights"](state.amps)
    return {int(state.offset + i): float(p) for i, p in enumerate(w) if p >= PRUNE}


def coin_state_at(state: WalkState, x: int) -> tuple[CoinState, float]:
    """Normalised coin state conditioned on finding the walker at ``x``, and ``P(x)``."""
    a = state.amplitude(x)
    weight = float(np.sum(np.abs(a) ** 2))
    if weight <= PRUNE:
        raise ZeroWeight(f"no probability at position {x}")
    return CoinState.from_array(a / math.sqrt(weight)), weight
