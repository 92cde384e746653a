import json
import math
import os
import subprocess
import sys
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from walkpovm.cli import main

SCHEMA = json.loads((Path(__file__).parents[1] / "docs" / "output.schema.json").read_text(encoding="utf-8"))

USD_45 = """\
-
-1:45 1:12.234900260351097
0:22.5
"""


def run_cli(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *args):
    code, out, err = run_cli(capsys, *args, "--format", "json")
    assert code == 0, err
    data = json.loads(out)
    jsonschema.validate(data, SCHEMA)
    return data


def _assert_finite(obj):
    if isinstance(obj, dict):
        for v in obj.values():
            _assert_finite(v)
    elif isinstance(obj, list):
        for v in obj:
            _assert_finite(v)
    elif isinstance(obj, float):
        assert math.isfinite(obj)


@pytest.fixture
def usd_file(tmp_path):
    f = tmp_path / "usd_45.walk"
    f.write_text(USD_45)
    return f


class TestDiscriminate:
    def test_plus(self, capsys):
        d = run_json(capsys, "discriminate", "--alpha", "0.707", "--state", "plus")
        probs = {o["position"]: o["probability"] for o in d["outcomes"]}
        assert abs(d["eta_theory"] - 0.293) < 1e-12
        assert abs(probs[3] - 0.707) < 1e-12 and abs(probs[3] - 0.7071) < 2e-4
        assert probs[-1] <= 1e-12
        _assert_finite(d)

    def test_minus_projective(self, capsys):
        d = run_json(capsys, "discriminate", "--alpha", "0", "--state", "minus")
        probs = {o["position"]: o["probability"] for o in d["outcomes"]}
        assert d["eta_theory"] == 1.0 and abs(probs[-1] - 1) < 1e-12

    def test_superposition(self, capsys):
        d = run_json(capsys, "discriminate", "--phi", "45", "--state", "superposition:1,1")
        probs = {o["position"]: o["probability"] for o in d["outcomes"]}
        assert abs(probs[1] - 0.0858) < 1e-4 and abs(probs[-1] - 0.0858) < 1e-4

    def test_labels(self, capsys):
        d = run_json(capsys, "discriminate", "--alpha", "0.3")
        labels = {o["position"]: (o["psi_label"], o["state_label"]) for o in d["outcomes"]}
        assert labels[1] == ("psi_plus", "|0>")
        assert labels[-1] == ("psi_minus", "alpha|0>+beta|1>")

    def test_custom_state(self, capsys):
        d = run_json(capsys, "discriminate", "--alpha", "0.3", "--state", "custom:1,1j")
        assert abs(sum(o["probability"] for o in d["outcomes"]) - 1) < 1e-12

    def test_csv(self, capsys):
        code, out, _ = run_cli(capsys, "discriminate", "--alpha", "0.5", "--format", "csv", "--shots", "100")
        lines = out.strip().splitlines()
        assert code == 0 and lines[0] == "position,p_theory,count,p_hat"
        assert sum(int(l.split(",")[2]) for l in lines[1:]) == 100

    def test_text(self, capsys):
        code, out, _ = run_cli(capsys, "discriminate", "--alpha", "0.707")
        assert code == 0 and "12°14′" in out and "eta_theory = 0.293000" in out

    @pytest.mark.parametrize(
        "args",
        [
            ("--alpha", "1.0"),
            ("--alpha", "-0.2"),
            (),
            ("--alpha", "0.5", "--phi", "30"),
            ("--alpha", "0.5", "--state", "bogus"),
            ("--alpha", "0.5", "--shots", "0"),
            ("--alpha", "0.999999999999999", "--state", "superposition:1,-1"),
        ],
    )
    def test_domain_errors_exit_2(self, capsys, args):
        code, _, err = run_cli(capsys, "discriminate", *args)
        assert code == 2 and err.startswith("walkpovm:")


class TestPovm:
    def test_first_row(self, capsys):
        d = run_json(capsys, "povm", "--phi", "45")
        e3 = np.array(d["walk_elements"]["E_inconclusive"]["re"])
        np.testing.assert_allclose(e3, [[0.8284271247461901, 0], [0, 0]], atol=1e-12)
        assert d["completeness_passed"] and d["completeness_deviation"] <= 1e-10
        assert max(d["zero_error_residuals"].values()) < 1e-12
        assert d["max_gap_walk_vs_closed_form"] < 1e-12 and d["max_gap_reversed_vs_walk"] < 1e-12

    def test_projective(self, capsys):
        d = run_json(capsys, "povm", "--alpha", "0")
        assert np.max(np.abs(d["walk_elements"]["E_inconclusive"]["re"])) < 1e-12
        assert d["completeness_deviation"] < 1e-12

    def test_residuals_any_alpha(self, capsys):
        for alpha in ("0.05", "0.5", "0.95"):
            d = run_json(capsys, "povm", "--alpha", alpha)
            assert max(d["zero_error_residuals"].values()) < 1e-12

    def test_text_and_csv(self, capsys):
        assert run_cli(capsys, "povm", "--alpha", "0.2")[0] == 0
        code, out, _ = run_cli(capsys, "povm", "--alpha", "0.2", "--format", "csv")
        assert code == 0 and out.startswith("element,row,col,re,im")


class TestTable1:
    def test_rows(self, capsys):
        d = run_json(capsys, "table1", "--shots", "40000", "--seed", "7")
        assert len(d["rows"]) == 12
        printed = {"12°14′", "15°19′", "18°54′", "23°18′", "29°20′", "45°00′"}
        assert {r["theta_1_2"] for r in d["rows"]} == printed
        assert all(r["theta_1_2_match"] for r in d["rows"])

    def test_text(self, capsys):
        code, out, _ = run_cli(capsys, "table1", "--shots", "100")
        assert code == 0 and len(out.strip().splitlines()) == 13


class TestWalk:
    def test_per_step(self, capsys, usd_file):
        d = run_json(capsys, "walk", "--protocol", str(usd_file), "--phi", "45", "--state", "plus", "--per-step")
        step1 = d["per_step"][0]
        assert abs(step1["1"] - math.cos(math.radians(22.5)) ** 2) < 1e-12
        assert abs(step1["-1"] - math.sin(math.radians(22.5)) ** 2) < 1e-12
        assert set(d["final_distribution"]) == {"1", "3"}

    def test_ballistic(self, capsys, tmp_path):
        f = tmp_path / "id.walk"
        f.write_text("-\n0:id\n-\n")
        d = run_json(capsys, "walk", "--protocol", str(f), "--state", "h")
        assert d["final_distribution"] == {"3": 1.0}

    def test_malformed_exit_2(self, capsys, tmp_path):
        f = tmp_path / "bad.walk"
        f.write_text("-\n0:banana\n")
        code, _, err = run_cli(capsys, "walk", "--protocol", str(f), "--state", "h")
        assert code == 2 and "line 2" in err

    def test_missing_file_exit_3(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "walk", "--protocol", str(tmp_path / "nope.walk"), "--state", "h")
        assert code == 3 and "I/O" in err

    def test_plus_needs_alpha(self, capsys, usd_file):
        code, _, _ = run_cli(capsys, "walk", "--protocol", str(usd_file), "--state", "plus")
        assert code == 2


class TestMisc:
    def test_compile_roundtrip(self, capsys, tmp_path):
        code, out, _ = run_cli(capsys, "compile", "--phi", "45")
        assert code == 0
        f = tmp_path / "c.walk"
        f.write_text(out)
        d = run_json(capsys, "walk", "--protocol", str(f), "--phi", "45", "--state", "minus")
        assert abs(d["final_distribution"]["-1"] - (1 - math.cos(math.pi / 4))) < 1e-12

    def test_fig2d(self, capsys):
        d = run_json(capsys, "fig2d", "--shots", "40000")
        assert abs(d["theory"]["1"] - 0.08578643762690495) < 1e-12

    def test_output_file(self, capsys, tmp_path):
        f = tmp_path / "out.json"
        code, out, _ = run_cli(capsys, "povm", "--alpha", "0.5", "--format", "json", "-o", str(f))
        assert code == 0 and out == ""
        jsonschema.validate(json.loads(f.read_text()), SCHEMA)

    def test_output_unwritable_exit_3(self, capsys, tmp_path):
        code, _, _ = run_cli(capsys, "povm", "--alpha", "0.5", "-o", str(tmp_path / "missing" / "x.json"))
        assert code == 3

    def test_seed_env(self, monkeypatch, capsys):
        monkeypatch.setenv("WALKPOVM_SEED", "42")
        d = run_json(capsys, "discriminate", "--alpha", "0.5", "--shots", "50")
        assert d["sampled"]["seed"] == 42

    def test_argparse_error_exit_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["discriminate", "--format", "xml"])
        assert exc.value.code == 2


@pytest.mark.parametrize(
    "args",
    [
        ["discriminate", "--alpha", "0.588", "--state", "superposition:0.3,1.7"],
        ["povm", "--alpha", "0.454"],
        ["table1", "--seed", "7"],
    ],
)
def test_byte_identical_json(args):
    cmd = [sys.executable, "-m", "walkpovm", *args, "--format", "json"]
    outs = [subprocess.run(cmd, capture_output=True, check=True, env=dict(os.environ)).stdout for _ in range(2)]
    assert outs[0] == outs[1] and len(outs[0]) > 100
