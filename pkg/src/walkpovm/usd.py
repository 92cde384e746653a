"""Three-step walk that unambiguously discriminates two single-qubit states.

The pair ``{|0>, alpha|0> + beta|1>}`` is rewritten in the coin basis as
``psi_pm = cos(phi/2)|H> +- sin(phi/2)|V>`` with ``cos(phi) = alpha``.
Starting the walker at ``x = 0`` with coin ``psi_pm``, after three steps the
walker is found at ``+1`` only for ``psi_+``, at ``-1`` only for ``psi_-``,
and at ``+3`` for the inconclusive result.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core import (
    ATOL,
    Angle,
    CoinState,
    Protocol,
    StepSpec,
    WalkState,
    position_distribution,
    run,
)
from .errors import DegenerateSuperposition, DomainError, LeakageError

LEAKAGE_TOL = 1e-9

__all__ = [
    "Outcome",
    "OutcomeKind",
    "UsdParams",
    "UsdProtocol",
    "compile_usd",
    "discriminate",
    "prepare_coin",
    "prepare_superposition",
    "second_step_angle",
    "success_probability",
]


@dataclass(frozen=True)
class UsdParams:
    alpha: float
    beta: float
    phi: float

    def __post_init__(self):
        if not (0.0 <= self.alpha < 1.0):
            raise DomainError(f"alpha must lie in [0, 1), got {self.alpha!r}")
        if abs(math.cos(self.phi) - self.alpha) > ATOL:
            raise DomainError("phi and alpha are inconsistent: cos(phi) != alpha")
        if abs(self.beta - math.sqrt(1.0 - self.alpha**2)) > ATOL:
            raise DomainError("beta must equal sqrt(1 - alpha^2)")

    @classmethod
    def from_alpha(cls, alpha: float) -> "UsdParams":
        alpha = float(alpha)
        if not (0.0 <= alpha < 1.0):
            raise DomainError(f"alpha must lie in [0, 1), got {alpha!r}")
        return cls(alpha, math.sqrt(1.0 - alpha * alpha), math.acos(alpha))

    @classmethod
    def from_phi(cls, phi: float) -> "UsdParams":
        """Build from the half-angle parameter ``phi`` in radians, ``0 < phi <= pi/2``."""
        phi = float(phi)
        if not (0.0 < phi <= math.pi / 2 + ATOL):
            raise DomainError(f"phi must lie in (0, pi/2], got {phi!r}")
        phi = min(phi, math.pi / 2)
        alpha = math.cos(phi) if phi < math.pi / 2 else 0.0
        return cls(alpha, math.sqrt(1.0 - alpha * alpha), phi)


class OutcomeKind(enum.Enum):
    CONCLUSIVE_PLUS = 1
    CONCLUSIVE_MINUS = -1
    INCONCLUSIVE = 3

    @property
    def position(self) -> int:
        return self.value

    @property
    def psi_label(self) -> str:
        return {1: "psi_plus", -1: "psi_minus", 3: "inconclusive"}[self.value]

    @property
    def state_label(self) -> str:
        return {1: "|0>", -1: "alpha|0>+beta|1>", 3: "inconclusive"}[self.value]


@dataclass(frozen=True)
class Outcome:
    kind: OutcomeKind
    probability: float

    @property
    def position(self) -> int:
        return self.kind.position


@dataclass(frozen=True)
class UsdProtocol:
    params: UsdParams
    protocol: Protocol
    theta_m1_2: float
    theta_1_2: float
    theta_0_3: float


def prepare_coin(params: UsdParams, sign: int | str) -> CoinState:
    """``cos(phi/2)|H> + sign * sin(phi/2)|V>``."""
    s = _sign(sign)
    return CoinState(math.cos(params.phi / 2), s * math.sin(params.phi / 2))


def _sign(sign) -> int:
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def prepare_superposition(params: UsdParams, a: float, b: float) -> CoinState:
    """Normalised ``a psi_+ + b psi_-`` for real ``a, b``."""
    norm_sq = a * a + b * b + 2.0 * a * b * params.alpha
    if norm_sq <= 1e-12:
        raise DegenerateSuperposition(
            f"a*psi_+ + b*psi_- has vanishing norm for a={a}, b={b}, alpha={params.alpha}"
        )
    c, s = math.cos(params.phi / 2), math.sin(params.phi / 2)
    n = math.sqrt(norm_sq)
    return CoinState((a + b) * c / n, (a - b) * s / n)


def second_step_angle(params: UsdParams) -> float:
    """Coin angle at ``x = 1`` on step two, ``arccos(sqrt(1 - tan^2(phi/2))) / 2``.

    ``1 - tan^2(phi/2)`` is evaluated as ``2 alpha / (1 + alpha)``, which is
    the same quantity without the cancellation near ``phi = pi/2``.
    """
    return 0.5 * math.acos(math.sqrt(2.0 * params.alpha / (1.0 + params.alpha)))


def compile_usd(params: UsdParams | float) -> UsdProtocol:
    if not isinstance(params, UsdParams):
        params = UsdParams.from_alpha(params)
    t_m1 = math.pi / 4
    t_1 = second_step_angle(params)
    t_0 = math.pi / 8
    protocol = Protocol(
        (
            StepSpec(),
            StepSpec({-1: Angle(t_m1), 1: Angle(t_1)}),
            StepSpec({0: Angle(t_0)}),
        )
    )
    return UsdProtocol(params, protocol, t_m1, t_1, t_0)


def discriminate(params: UsdParams | UsdProtocol, coin0: CoinState) -> list[Outcome]:
    """Run the compiled walk from ``|0> (x) coin0`` and read off the three outcomes."""
    usd = params if isinstance(params, UsdProtocol) else compile_usd(params)
    final = run(WalkState.localized(coin0.normalized()), usd.protocol)
    dist = position_distribution(final)
    leaked = sum(p for x, p in dist.items() if x not in (1, -1, 3))
    if leaked > LEAKAGE_TOL:
        raise LeakageError(f"probability {leaked:.3g} outside positions -1, 1, 3")
    return [Outcome(k, dist.get(k.position, 0.0)) for k in OutcomeKind]


def outcome_map(outcomes: list[Outcome]) -> dict[int, float]:
    return {o.position: o.probability for o in outcomes}


def success_probability(params: UsdParams) -> float:
    """Probability of a conclusive outcome for either input, ``1 - alpha``."""
    return 1.0 - params.alpha
