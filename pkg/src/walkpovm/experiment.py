"""Photon-counting emulation on top of the ideal walk.

Outcome positions are drawn from a multinomial with a seeded PCG64 stream,
compared with theory through the 1-norm distance, and laid next to the
measured reference values in :mod:`walkpovm.reference`.
"""
from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import asdict, dataclass, field

import numpy as np

from .angles import arcminute_gap, format_dms, parse_dms
from .core import CoinState, WalkState, coin_state_at, position_distribution, run
from .errors import BadDistribution
from .reference import FIG2D_MEASURED, FIG2D_PHI_DEG, REFERENCE_SHOTS, TABLE1, Table1Row
from .usd import UsdParams, compile_usd, discriminate, outcome_map, prepare_coin, prepare_superposition

RNG_ALGORITHM = "numpy.random.PCG64"
SUM_TOL = 1e-9

__all__ = [
    "CountRecord",
    "DistanceReport",
    "Fig2dReport",
    "coin_fidelity",
    "fig2d_report",
    "l1_distance",
    "sample_counts",
    "table1_report",
]


def _check_distribution(dist: Mapping[int, float], name: str = "distribution") -> None:
    if not dist:
        raise BadDistribution(f"{name} is empty")
    vals = np.fromiter(dist.values(), dtype=float)
    if not np.all(np.isfinite(vals)) or np.any(vals < 0):
        raise BadDistribution(f"{name} has negative or non-finite entries")
    if abs(vals.sum() - 1.0) > SUM_TOL:
        raise BadDistribution(f"{name} sums to {vals.sum():.12g}, not 1")


@dataclass(frozen=True)
class CountRecord:
    shots: int
    counts: dict
    probs_hat: dict
    seed: int
    rng: str = RNG_ALGORITHM

    def to_dict(self) -> dict:
        return {
            "shots": self.shots,
            "seed": self.seed,
            "rng": self.rng,
            "counts": {str(k): v for k, v in self.counts.items()},
            "probs_hat": {str(k): v for k, v in self.probs_hat.items()},
        }


def sample_counts(dist: Mapping[int, float], shots: int, seed: int) -> CountRecord:
    """Multinomial draw of ``shots`` detections over the outcome positions of ``dist``."""
    _check_distribution(dist)
    if int(shots) != shots or shots < 1:
        raise ValueError(f"shots must be a positive integer, got {shots!r}")
    positions = sorted(dist)
    p = np.array([dist[x] for x in positions], dtype=float)
    p /= p.sum()
    rng = np.random.Generator(np.random.PCG64(seed))
    drawn = rng.multinomial(int(shots), p)
    counts = {x: int(c) for x, c in zip(positions, drawn)}
    return CountRecord(int(shots), counts, {x: c / shots for x, c in counts.items()}, int(seed))


@dataclass(frozen=True)
class DistanceReport:
    d: float
    per_position_gap: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"d": self.d, "per_position_gap": {str(k): v for k, v in self.per_position_gap.items()}}


def l1_distance(p_exp: Mapping[int, float], p_th: Mapping[int, float]) -> DistanceReport:
    """``d = 1/2 sum_x |P_exp(x) - P_th(x)|`` over the union of supports."""
    _check_distribution(p_exp, "p_exp")
    _check_distribution(p_th, "p_th")
    gaps = {x: abs(p_exp.get(x, 0.0) - p_th.get(x, 0.0)) for x in sorted(set(p_exp) | set(p_th))}
    d = 0.5 * math.fsum(gaps.values())
    return DistanceReport(min(max(d, 0.0), 1.0), gaps)


def coin_fidelity(state: WalkState, x: int, target: CoinState) -> float:
    """``|<target|c_x>|^2`` with ``c_x`` the coin state conditioned on position ``x``."""
    coin, _ = coin_state_at(state, x)
    return min(1.0, target.normalized().fidelity(coin))


def binomial_error(p_hat: float, shots: int) -> float:
    return math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / shots)


# ---- reports --------------------------------------------------------------

def row_params(row: Table1Row) -> UsdParams:
    """The printed alpha is cos(phi) rounded to 3 decimals, so rows are rebuilt from phi."""
    return UsdParams.from_phi(math.radians(row.phi_deg))


def theory_distribution(params: UsdParams, coin: CoinState) -> dict[int, float]:
    return {k: v for k, v in outcome_map(discriminate(params, coin)).items() if v > 0.0}


@dataclass(frozen=True)
class Table1Report:
    alpha: float
    phi_deg: int
    initial_state: str
    theta_m1_2: str
    theta_1_2: str
    theta_1_2_printed: str
    theta_1_2_gap_arcmin: float
    theta_1_2_match: bool
    theta_0_3: str
    eta_theory: float
    eta_sampled: float
    eta_sampled_err: float
    d_sampled: float
    eta_measured: float
    eta_measured_err: float
    d_measured: float
    d_measured_err: float
    measured_within_3sigma: bool

    def to_dict(self) -> dict:
        return asdict(self)


def table1_report(shots: int = REFERENCE_SHOTS, seed: int = 1, rows: Iterable[Table1Row] = TABLE1):
    """Recompute every reference row and sample it with an independent seed per row."""
    rows = list(rows)
    out = []
    seeds = np.random.SeedSequence(seed).generate_state(len(rows), dtype=np.uint64)
    for row, row_seed in zip(rows, seeds):
        params = row_params(row)
        usd = compile_usd(params)
        sign = "+" if row.initial_state_label == "psi_plus" else "-"
        theory = theory_distribution(params, prepare_coin(params, sign))
        rec = sample_counts(theory, shots, int(row_seed))
        eta_hat = rec.probs_hat.get(1, 0.0) + rec.probs_hat.get(-1, 0.0)
        eta_th = 1.0 - params.alpha
        gap = arcminute_gap(usd.theta_1_2, parse_dms(row.theta_1_2_dms))
        out.append(
            Table1Report(
                alpha=row.alpha,
                phi_deg=row.phi_deg,
                initial_state=row.initial_state_label,
                theta_m1_2=format_dms(usd.theta_m1_2),
                theta_1_2=format_dms(usd.theta_1_2),
                theta_1_2_printed=row.theta_1_2_dms,
                theta_1_2_gap_arcmin=gap,
                theta_1_2_match=gap <= 1.0,
                theta_0_3=format_dms(usd.theta_0_3),
                eta_theory=eta_th,
                eta_sampled=eta_hat,
                eta_sampled_err=binomial_error(eta_hat, shots),
                d_sampled=l1_distance(rec.probs_hat, theory).d,
                eta_measured=row.eta_measured,
                eta_measured_err=row.eta_uncertainty,
                d_measured=row.d_measured,
                d_measured_err=row.d_uncertainty,
                measured_within_3sigma=abs(row.eta_measured - eta_th) <= 3 * row.eta_uncertainty,
            )
        )
    return out


@dataclass(frozen=True)
class Fig2dReport:
    theory: dict
    record: CountRecord
    distance: DistanceReport
    symmetry_gap: float
    measured: dict

    def to_dict(self) -> dict:
        return {
            "theory": {str(k): v for k, v in self.theory.items()},
            "record": self.record.to_dict(),
            "distance": self.distance.to_dict(),
            "symmetry_gap": self.symmetry_gap,
            "measured": {str(k): {"p": p, "err": e} for k, (p, e) in self.measured.items()},
        }


def fig2d_report(shots: int = REFERENCE_SHOTS, seed: int = 1) -> Fig2dReport:
    """Equal-weight superposition input (coin ``|H>``) at ``phi = 45 deg``."""
    params = UsdParams.from_phi(math.radians(FIG2D_PHI_DEG))
    theory = theory_distribution(params, prepare_superposition(params, 1.0, 1.0))
    rec = sample_counts(theory, shots, seed)
    gap = abs(rec.probs_hat.get(1, 0.0) - rec.probs_hat.get(-1, 0.0))
    return Fig2dReport(theory, rec, l1_distance(rec.probs_hat, theory), gap, dict(FIG2D_MEASURED))


def sampled_distances(dist: Mapping[int, float], shots: int, seeds: Iterable[int]) -> np.ndarray:
    """1-norm distance between sampled and exact distribution, one per seed."""
    return np.array([l1_distance(sample_counts(dist, shots, s).probs_hat, dist).d for s in seeds])


def walk_distribution_history(state: WalkState, protocol) -> list[dict[int, float]]:
    return [position_distribution(s) for s in run(state, protocol, history=True)]
