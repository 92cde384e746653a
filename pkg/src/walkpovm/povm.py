"""Generalised measurements realised by a walk.

Measuring the walker at position ``i`` after running a protocol from
``x = 0`` acts on the coin through the Kraus operator
``K_i = <i| U |0>``; the corresponding POVM element is ``E_i = K_i^dag K_i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    ATOL,
    CoinState,
    Protocol,
    WalkState,
    apply_step_adjoint,
    run,
)
from .usd import UsdParams

COMPLETENESS_TOL = 1e-10

__all__ = [
    "CompletenessReport",
    "KrausOp",
    "PovmElement",
    "closed_form_usd_elements",
    "eigvalsh_2x2",
    "kraus_from_walk",
    "kraus_operators",
    "povm_element",
    "reversed_walk_element",
    "verify_completeness",
]


def eigvalsh_2x2(m: np.ndarray) -> tuple[float, float]:
    """Eigenvalues (ascending) of a 2x2 Hermitian matrix from trace and determinant."""
    a, d = m[0, 0].real, m[1, 1].real
    b = 0.5 * (m[0, 1] + np.conj(m[1, 0]))
    mean = 0.5 * (a + d)
    r = math.hypot(0.5 * (a - d), abs(b))
    return mean - r, mean + r


@dataclass(frozen=True, eq=False)
class KrausOp:
    m: np.ndarray
    outcome_position: int

    def __post_init__(self):
        m = np.array(self.m, dtype=np.complex128)
        if m.shape != (2, 2):
            raise ValueError("Kraus operator must be 2x2")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)


@dataclass(frozen=True, eq=False)
class PovmElement:
    e: np.ndarray
    outcome_position: int

    def __post_init__(self):
        e = np.array(self.e, dtype=np.complex128)
        if e.shape != (2, 2):
            raise ValueError("POVM element must be 2x2")
        e.setflags(write=False)
        object.__setattr__(self, "e", e)

    @property
    def eigenvalues(self) -> tuple[float, float]:
        return eigvalsh_2x2(self.e)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.e - self.e.conj().T)))

    def is_valid(self, atol: float = ATOL) -> bool:
        lo, hi = self.eigenvalues
        return self.hermiticity_defect() <= atol and lo >= -atol and hi <= 1.0 + atol

    def probability(self, coin: CoinState) -> float:
        """``<c|E|c>`` for a normalised coin state."""
        v = coin.as_array()
        return float(np.real(np.vdot(v, self.e @ v)))


def kraus_from_walk(protocol: Protocol, i: int) -> KrausOp:
    """Column ``c`` is the coin amplitude found at ``i`` after walking from ``|0>|c>``."""
    cols = [run(WalkState.localized(c), protocol).amplitude(i) for c in (CoinState.H(), CoinState.V())]
    return KrausOp(np.column_stack(cols), i)


def kraus_operators(protocol: Protocol) -> dict[int, KrausOp]:
    """Kraus operators for every position reachable in ``len(protocol)`` steps."""
    n = len(protocol)
    finals = [run(WalkState.localized(c), protocol) for c in (CoinState.H(), CoinState.V())]
    return {
        x: KrausOp(np.column_stack([f.amplitude(x) for f in finals]), x)
        for x in range(-n, n + 1)
    }


def povm_element(k: KrausOp) -> PovmElement:
    return PovmElement(k.m.conj().T @ k.m, k.outcome_position)


def reversed_walk_element(protocol: Protocol, i: int, psi_i: CoinState) -> PovmElement:
    """Element built by walking ``|i>|psi_i>`` backwards and projecting onto ``x = 0``.

    Returns ``|t><t|`` with ``|t> = <0| U^dag |i>|psi_i>``, which equals
    ``K_i^dag |psi_i><psi_i| K_i``.  When ``psi_i`` is the coin state the
    walker carries at ``i`` and ``K_i`` has rank one, this is ``K_i^dag K_i``.
    """
    state = WalkState.localized(psi_i, i)
    for spec in reversed(protocol.steps):
        state = apply_step_adjoint(state, spec)
    t = state.amplitude(0)
    return PovmElement(np.outer(t, t.conj()), i)


def closed_form_usd_elements(params: UsdParams) -> dict[str, PovmElement]:
    """Analytic ``E_+``, ``E_-`` and the inconclusive element for the three-step walk."""
    if not isinstance(params, UsdParams):
        params = UsdParams.from_alpha(params)
    c, s = math.cos(params.phi / 2), math.sin(params.phi / 2)
    scale = 1.0 / (2.0 * c * c)
    vp = np.array([s, c])
    vm = np.array([-s, c])
    e_inc = np.zeros((2, 2))
    e_inc[0, 0] = 2.0 * params.alpha / (1.0 + params.alpha)  # 1 - tan^2(phi/2)
    return {
        "E_plus": PovmElement(scale * np.outer(vp, vp), 1),
        "E_minus": PovmElement(scale * np.outer(vm, vm), -1),
        "E_inconclusive": PovmElement(e_inc, 3),
    }


@dataclass(frozen=True)
class CompletenessReport:
    deviation: float
    min_eigenvalues: dict = field(default_factory=dict)
    passed: bool = False

    def to_dict(self) -> dict:
        return {
            "deviation": self.deviation,
            "min_eigenvalues": {str(k): v for k, v in self.min_eigenvalues.items()},
            "passed": self.passed,
        }


def verify_completeness(elements) -> CompletenessReport:
    """Check ``sum E_i = 1`` (max-norm 1e-10) and ``E_i >= 0`` (eigenvalues >= -1e-12)."""
    elements = list(elements)
    total = np.zeros((2, 2), dtype=np.complex128)
    mins = {}
    for k, el in enumerate(elements):
        total += el.e
        key = el.outcome_position if el.outcome_position not in mins else f"{el.outcome_position}#{k}"
        mins[key] = el.eigenvalues[0]
    dev = float(np.max(np.abs(total - np.eye(2))))
    ok = dev <= COMPLETENESS_TOL and all(v >= -ATOL for v in mins.values())
    return CompletenessReport(dev, mins, ok)


def identity_element() -> PovmElement:
    return PovmElement(np.eye(2), 0)
