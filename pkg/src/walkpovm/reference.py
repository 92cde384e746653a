"""Measured values from the photonic three-step walk, kept for side-by-side comparison.

These are reference data, not test targets: the simulation is ideal and
does not model interferometer visibility or component errors.
"""
from __future__ import annotations

from dataclasses import dataclass

PROVENANCE = "photonic single-photon experiment, 40 s coincidence windows"
VISIBILITY_PER_STEP = 0.998
REFERENCE_SHOTS = 40000  # ~1000 coincidences/s over 40 s


@dataclass(frozen=True)
class Table1Row:
    alpha: float
    phi_deg: int
    initial_state_label: str  # "psi_plus" | "psi_minus"
    theta_m1_2_deg: float
    theta_1_2_dms: str
    theta_0_3_dms: str
    eta_measured: float
    eta_uncertainty: float
    d_measured: float
    d_uncertainty: float
    provenance: str = PROVENANCE


def _rows():
    # alpha, phi, theta_1_2, (eta, deta, d, dd) for psi_plus then psi_minus
    data = [
        (0.707, 45, "12°14′", (0.2861, 0.0030, 0.0171, 0.0046), (0.2875, 0.0031, 0.0152, 0.0045)),
        (0.588, 54, "15°19′", (0.4037, 0.0038, 0.0184, 0.0047), (0.4066, 0.0039, 0.0156, 0.0047)),
        (0.454, 63, "18°54′", (0.5362, 0.0045, 0.0192, 0.0047), (0.5365, 0.0045, 0.0183, 0.0046)),
        (0.309, 72, "23°18′", (0.6834, 0.0054, 0.0127, 0.0046), (0.6854, 0.0055, 0.0136, 0.0049)),
        (0.156, 81, "29°20′", (0.8384, 0.0062, 0.0066, 0.0044), (0.8394, 0.0063, 0.0071, 0.0043)),
        (0.0, 90, "45°00′", (0.9940, 0.0070, 0.0060, 0.0035), (0.9920, 0.0071, 0.0080, 0.0036)),
    ]
    plus, minus = [], []
    for alpha, phi, t12, p, m in data:
        plus.append(Table1Row(alpha, phi, "psi_plus", 45.0, t12, "22°30′", *p))
        minus.append(Table1Row(alpha, phi, "psi_minus", 45.0, t12, "22°30′", *m))
    return tuple(plus + minus)


TABLE1 = _rows()

# Equal-weight superposition (coin |H>) at phi = 45 degrees.
FIG2D_MEASURED = {1: (0.0854, 0.0015), -1: (0.0850, 0.0015)}
FIG2D_PHI_DEG = 45
COIN_FIDELITY_LOWER_BOUND = 0.9911
