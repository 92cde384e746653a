"""Command-line entry point: ``walkpovm <command> [options]``.

Exit codes: 0 success, 2 domain / input errors, 3 I/O errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .angles import format_dms
from .core import CoinState, WalkState, coin_state_at, position_distribution, run
from .errors import WalkError
from .experiment import (
    binomial_error,
    fig2d_report,
    l1_distance,
    sample_counts,
    table1_report,
)
from .povm import (
    closed_form_usd_elements,
    kraus_from_walk,
    povm_element,
    reversed_walk_element,
    verify_completeness,
)
from .protocol_file import dump_protocol, load_protocol
from .reference import REFERENCE_SHOTS
from .usd import (
    UsdParams,
    compile_usd,
    discriminate,
    prepare_coin,
    prepare_superposition,
    success_probability,
)

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 2, 3
SEED_ENV = "WALKPOVM_SEED"


class UsageError(WalkError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    alpha: float | None
    phi_deg: float | None
    state: str
    shots: int
    seed: int
    format: str
    protocol_file: str | None = None
    per_step: bool = False
    output: str | None = None

    def params(self) -> UsdParams:
        if self.phi_deg is not None:
            return UsdParams.from_phi(math.radians(self.phi_deg))
        if self.alpha is None:
            raise UsageError(f"{self.command} needs --alpha or --phi")
        return UsdParams.from_alpha(self.alpha)


# ---- helpers ----------------------------------------------------------------

def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise UsageError(f"not a number: {text!r}") from None


def resolve_state(spec: str, params_fn) -> tuple[CoinState, str]:
    """Turn a ``--state`` value into a normalised coin state and a label."""
    kind, _, arg = spec.partition(":")
    kind = kind.strip().lower()
    if kind in ("plus", "minus"):
        return prepare_coin(params_fn(), kind), kind
    if kind in ("h", "v"):
        return (CoinState.H() if kind == "h" else CoinState.V()), kind.upper()
    if kind == "superposition":
        parts = arg.split(",")
        if len(parts) != 2:
            raise UsageError("superposition needs two real weights: superposition:a,b")
        try:
            a, b = float(parts[0]), float(parts[1])
        except ValueError:
            raise UsageError(f"bad superposition weights {arg!r}") from None
        return prepare_superposition(params_fn(), a, b), f"superposition({a:g},{b:g})"
    if kind == "custom":
        parts = arg.split(",")
        if len(parts) != 2:
            raise UsageError("custom needs two amplitudes: custom:aH,aV")
        c = CoinState(_complex(parts[0]), _complex(parts[1]))
        if c.norm == 0.0:
            raise UsageError("custom coin state has zero norm")
        return c.normalized(), f"custom({parts[0]},{parts[1]})"
    raise UsageError(f"unknown state {spec!r}")


def _coin_json(c: CoinState) -> dict:
    return {"h": [c.h.real, c.h.imag], "v": [c.v.real, c.v.imag]}


def _matrix_json(m: np.ndarray) -> dict:
    return {"re": np.real(m).tolist(), "im": np.imag(m).tolist()}


def _angle_json(theta: float) -> dict:
    return {"rad": theta, "deg": math.degrees(theta), "dms": format_dms(theta)}


def _keyed(d: dict) -> dict:
    return {str(k): v for k, v in sorted(d.items())}


def _distribution_rows(theory: dict, counts: dict | None, shots: int | None):
    rows = []
    for x in sorted(set(theory) | set(counts or {})):
        c = (counts or {}).get(x, 0)
        rows.append((x, theory.get(x, 0.0), c, c / shots if shots else 0.0))
    return rows


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _table(rows, header) -> str:
    cells = [list(map(str, header))] + [[_fmt(v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def _matrix_text(name: str, m: np.ndarray) -> str:
    def z(v):
        v = complex(v)
        return f"{v.real:+.6f}" if abs(v.imag) < 5e-13 else f"{v.real:+.6f}{v.imag:+.6f}j"

    return (
        f"{name} = [[{z(m[0, 0])}, {z(m[0, 1])}],\n"
        f"{' ' * len(name)}    [{z(m[1, 0])}, {z(m[1, 1])}]]\n"
    )


# ---- commands -------------------------------------------------------------

def cmd_discriminate(cfg: RunConfig) -> tuple[dict, str, str]:
    params = cfg.params()
    usd = compile_usd(params)
    coin, label = resolve_state(cfg.state, lambda: params)
    outcomes = discriminate(usd, coin)
    theory = {o.position: o.probability for o in outcomes}
    support = {x: p for x, p in theory.items() if p > 0.0}
    rec = sample_counts(support, cfg.shots, cfg.seed)
    dist = l1_distance(rec.probs_hat, support)
    conclusive_hat = rec.probs_hat.get(1, 0.0) + rec.probs_hat.get(-1, 0.0)
    report = {
        "command": "discriminate",
        "alpha": params.alpha,
        "beta": params.beta,
        "phi": _angle_json(params.phi),
        "state": label,
        "coin": _coin_json(coin),
        "angles": {
            "theta_m1_2": _angle_json(usd.theta_m1_2),
            "theta_1_2": _angle_json(usd.theta_1_2),
            "theta_0_3": _angle_json(usd.theta_0_3),
        },
        "outcomes": [
            {
                "position": o.position,
                "kind": o.kind.name.lower(),
                "psi_label": o.kind.psi_label,
                "state_label": o.kind.state_label,
                "probability": o.probability,
            }
            for o in outcomes
        ],
        "eta_theory": success_probability(params),
        "conclusive_probability": theory[1] + theory[-1],
        "sampled": rec.to_dict(),
        "conclusive_sampled": conclusive_hat,
        "conclusive_sampled_err": binomial_error(conclusive_hat, cfg.shots),
        "d_sampled": dist.d,
    }
    rows = _distribution_rows(theory, rec.counts, cfg.shots)
    head = (
        f"alpha = {params.alpha:.6f}  phi = {format_dms(params.phi)}  state = {label}\n"
        f"theta(-1,2) = {format_dms(usd.theta_m1_2)}  theta(1,2) = {format_dms(usd.theta_1_2)}"
        f"  theta(0,3) = {format_dms(usd.theta_0_3)}\n"
    )
    outcome_lines = "".join(
        f"  x={o.position:+d}  {o.kind.psi_label:>12}  {o.kind.state_label:>17}  P = {o.probability:.6f}\n"
        for o in outcomes
    )
    text = (
        head
        + outcome_lines
        + f"eta_theory = {report['eta_theory']:.6f}\n"
        + f"sampled ({cfg.shots} shots, seed {cfg.seed}): conclusive = {conclusive_hat:.6f}"
        + f" +- {report['conclusive_sampled_err']:.6f}, d = {dist.d:.6f}\n"
        + _table(rows, ("position", "p_theory", "count", "p_hat"))
    )
    return report, text, _csv(rows, ("position", "p_theory", "count", "p_hat"))


def cmd_povm(cfg: RunConfig) -> tuple[dict, str, str]:
    params = cfg.params()
    usd = compile_usd(params)
    walk = {
        "E_plus": povm_element(kraus_from_walk(usd.protocol, 1)),
        "E_minus": povm_element(kraus_from_walk(usd.protocol, -1)),
        "E_inconclusive": povm_element(kraus_from_walk(usd.protocol, 3)),
    }
    closed = closed_form_usd_elements(params)
    psi_p, psi_m = prepare_coin(params, "+"), prepare_coin(params, "-")
    reversed_ = {
        "E_plus": reversed_walk_element(usd.protocol, 1, CoinState.H()),
        "E_minus": reversed_walk_element(usd.protocol, -1, CoinState.V()),
    }
    comp_walk = verify_completeness(walk.values())
    comp_closed = verify_completeness(closed.values())
    residual_p = float(np.linalg.norm(walk["E_plus"].e @ psi_m.as_array()))
    residual_m = float(np.linalg.norm(walk["E_minus"].e @ psi_p.as_array()))
    gap_closed = max(float(np.max(np.abs(walk[k].e - closed[k].e))) for k in walk)
    gap_reversed = max(float(np.max(np.abs(reversed_[k].e - walk[k].e))) for k in reversed_)
    report = {
        "command": "povm",
        "alpha": params.alpha,
        "phi": _angle_json(params.phi),
        "walk_elements": {k: _matrix_json(v.e) for k, v in walk.items()},
        "closed_form_elements": {k: _matrix_json(v.e) for k, v in closed.items()},
        "completeness_deviation": comp_walk.deviation,
        "completeness_deviation_closed_form": comp_closed.deviation,
        "completeness_passed": comp_walk.passed,
        "min_eigenvalues": {k: v.eigenvalues[0] for k, v in walk.items()},
        "zero_error_residuals": {"E_plus_psi_minus": residual_p, "E_minus_psi_plus": residual_m},
        "max_gap_walk_vs_closed_form": gap_closed,
        "max_gap_reversed_vs_walk": gap_reversed,
    }
    text = f"alpha = {params.alpha:.6f}  phi = {format_dms(params.phi)}\n"
    text += "walk-extracted elements:\n" + "".join(_matrix_text(k, v.e) for k, v in walk.items())
    text += "closed form:\n" + "".join(_matrix_text(k, v.e) for k, v in closed.items())
    text += (
        f"completeness deviation = {comp_walk.deviation:.3e} ({'pass' if comp_walk.passed else 'FAIL'})\n"
        f"|E_plus psi_minus| = {residual_p:.3e}   |E_minus psi_plus| = {residual_m:.3e}\n"
        f"max |walk - closed form| = {gap_closed:.3e}   max |reversed - walk| = {gap_reversed:.3e}\n"
    )
    rows = [
        (name, r, c, float(np.real(el.e[r, c])), float(np.imag(el.e[r, c])))
        for source, els in (("walk", walk), ("closed", closed))
        for name, el in ((f"{source}:{k}", v) for k, v in els.items())
        for r in range(2)
        for c in range(2)
    ]
    return report, text, _csv(rows, ("element", "row", "col", "re", "im"))


def cmd_table1(cfg: RunConfig) -> tuple[dict, str, str]:
    rows = table1_report(cfg.shots, cfg.seed)
    report = {
        "command": "table1",
        "shots": cfg.shots,
        "seed": cfg.seed,
        "uncertainty_model": "binomial sqrt(eta(1-eta)/shots) for sampled values; measured values as published",
        "rows": [r.to_dict() for r in rows],
    }
    header = (
        "alpha", "phi", "input", "th(-1,2)", "th(1,2)", "printed", "gap'", "th(0,3)",
        "eta_th", "eta_hat", "+-", "d_hat", "eta_meas", "+-", "d_meas", "+-", "3sig",
    )
    body = [
        (
            f"{r.alpha:.3f}", f"{r.phi_deg}°", r.initial_state, r.theta_m1_2, r.theta_1_2,
            r.theta_1_2_printed, f"{r.theta_1_2_gap_arcmin:.2f}", r.theta_0_3,
            f"{r.eta_theory:.4f}", f"{r.eta_sampled:.4f}", f"{r.eta_sampled_err:.4f}",
            f"{r.d_sampled:.4f}", f"{r.eta_measured:.4f}", f"{r.eta_measured_err:.4f}",
            f"{r.d_measured:.4f}", f"{r.d_measured_err:.4f}",
            "yes" if r.measured_within_3sigma else "no",
        )
        for r in rows
    ]
    return report, _table(body, header), _csv(body, header)


def cmd_fig2d(cfg: RunConfig) -> tuple[dict, str, str]:
    rep = fig2d_report(cfg.shots, cfg.seed)
    report = {"command": "fig2d", **rep.to_dict()}
    rows = _distribution_rows(rep.theory, rep.record.counts, cfg.shots)
    text = (
        _table(rows, ("position", "p_theory", "count", "p_hat"))
        + f"d = {rep.distance.d:.6f}  |P(1) - P(-1)| = {rep.symmetry_gap:.6f}\n"
        + "measured reference: "
        + ", ".join(f"P({x:+d}) = {p:.4f} +- {e:.4f}" for x, (p, e) in sorted(rep.measured.items()))
        + "\n"
    )
    return report, text, _csv(rows, ("position", "p_theory", "count", "p_hat"))


def cmd_walk(cfg: RunConfig) -> tuple[dict, str, str]:
    if not cfg.protocol_file:
        raise UsageError("walk needs --protocol FILE")
    protocol = load_protocol(cfg.protocol_file)
    coin, label = resolve_state(cfg.state, cfg.params)
    states = run(WalkState.localized(coin), protocol, history=True)
    dists = [position_distribution(s) for s in states]
    final = dists[-1]
    rec = sample_counts(final, cfg.shots, cfg.seed)
    coins = {}
    for x in sorted(final):
        c, _ = coin_state_at(states[-1], x)
        coins[str(x)] = _coin_json(c)
    report = {
        "command": "walk",
        "protocol_file": str(cfg.protocol_file),
        "steps": len(protocol),
        "state": label,
        "coin": _coin_json(coin),
        "final_distribution": _keyed(final),
        "final_coin_states": coins,
        "sampled": rec.to_dict(),
        "d_sampled": l1_distance(rec.probs_hat, final).d,
    }
    if cfg.per_step:
        report["per_step"] = [_keyed(d) for d in dists]
    text = f"protocol {cfg.protocol_file} ({len(protocol)} steps), state = {label}\n"
    if cfg.per_step:
        for n, d in enumerate(dists, start=1):
            text += f"step {n}: " + "  ".join(f"{x:+d}:{p:.6f}" for x, p in sorted(d.items())) + "\n"
    rows = _distribution_rows(final, rec.counts, cfg.shots)
    text += _table(rows, ("position", "p_theory", "count", "p_hat"))
    return report, text, _csv(rows, ("position", "p_theory", "count", "p_hat"))


def cmd_compile(cfg: RunConfig) -> tuple[dict, str, str]:
    params = cfg.params()
    usd = compile_usd(params)
    body = dump_protocol(
        usd.protocol,
        header=f"three-step discrimination walk, alpha = {params.alpha!r}, phi = {format_dms(params.phi)}",
    )
    report = {
        "command": "compile",
        "alpha": params.alpha,
        "phi": _angle_json(params.phi),
        "angles": {
            "theta_m1_2": _angle_json(usd.theta_m1_2),
            "theta_1_2": _angle_json(usd.theta_1_2),
            "theta_0_3": _angle_json(usd.theta_0_3),
        },
        "protocol": body,
    }
    return report, body, body


COMMANDS = {
    "discriminate": cmd_discriminate,
    "povm": cmd_povm,
    "table1": cmd_table1,
    "fig2d": cmd_fig2d,
    "walk": cmd_walk,
    "compile": cmd_compile,
}


def build_parser() -> argparse.ArgumentParser:
    default_seed = os.environ.get(SEED_ENV, "1")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, default=None, help="overlap coefficient alpha in [0, 1)")
    common.add_argument("--phi", type=float, default=None, help="state-pair angle phi in degrees (alternative to --alpha)")
    common.add_argument(
        "--state",
        default="plus",
        help="plus | minus | h | v | superposition:a,b | custom:aH,aV (default: plus)",
    )
    common.add_argument("--shots", type=int, default=REFERENCE_SHOTS)
    common.add_argument("--seed", type=int, default=None, help=f"RNG seed (default: ${SEED_ENV} or 1)")
    common.add_argument("--format", choices=("json", "text", "csv"), default="text")
    common.add_argument("-o", "--output", default=None, help="write to file instead of stdout")

    parser = argparse.ArgumentParser(prog="walkpovm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("discriminate", parents=[common], help="run the discrimination walk on one input")
    sub.add_parser("povm", parents=[common], help="POVM elements: walk-extracted vs closed form")
    sub.add_parser("table1", parents=[common], help="recompute the reference angle/success table")
    sub.add_parser("fig2d", parents=[common], help="equal-weight superposition input at phi = 45 deg")
    sub.add_parser("compile", parents=[common], help="write the compiled walk as a protocol file")
    w = sub.add_parser("walk", parents=[common], help="run a protocol file")
    w.add_argument("--protocol", dest="protocol_file", required=True)
    w.add_argument("--per-step", action="store_true")
    parser.set_defaults(default_seed=default_seed)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    if ns.alpha is not None and ns.phi is not None:
        raise UsageError("give either --alpha or --phi, not both")
    if ns.shots < 1:
        raise UsageError("--shots must be >= 1")
    seed = ns.seed
    if seed is None:
        try:
            seed = int(ns.default_seed)
        except ValueError:
            raise UsageError(f"${SEED_ENV} must be an integer") from None
    return RunConfig(
        command=ns.command,
        alpha=ns.alpha,
        phi_deg=ns.phi,
        state=ns.state,
        shots=ns.shots,
        seed=seed,
        format=ns.format,
        protocol_file=getattr(ns, "protocol_file", None),
        per_step=getattr(ns, "per_step", False),
        output=ns.output,
    )


def render(report: dict, text: str, csv_text: str, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if fmt == "csv":
        return csv_text
    return text


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        out = render(*COMMANDS[cfg.command](cfg), cfg.format)
    except OSError as exc:
        print(f"walkpovm: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (WalkError, ValueError) as exc:
        print(f"walkpovm: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    try:
        if cfg.output:
            Path(cfg.output).write_text(out, encoding="utf-8")
        else:
            sys.stdout.write(out)
    except OSError as exc:
        print(f"walkpovm: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
