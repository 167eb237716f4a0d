from __future__ import annotations

import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from qgf.cli import main
from qgf.config import ExperimentConfig, from_dict, load_config, parse_override
from qgf.errors import ConfigError
from qgf.pauli import build_tfim, expectation
from qgf.states import random_state


def _write(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


def _rows(path):
    return list(csv.DictReader(open(path)))


SMALL = {
    "model": {"n": 4},
    "filter": {"delta_y": 0.16, "m_y": 20},
    "initial_state": {"kind": "random", "seed": 3},
    "scan": {"mu_range": [0.0, -0.5], "mu_step": 0.25, "inv_sigma_sq_range": [0.5, 1.5], "inv_sigma_sq_step": 0.5,
             "mu_anchor": "exact_ground"},
}


# ---- config ----

def test_defaults_validate():
    cfg = load_config()
    assert cfg.model.n == 4 and cfg.filter.delta_y == 0.16
    assert json.loads(cfg.to_json())["mode"]["kind"] == "exact"


def test_precedence_file_then_overrides(tmp_path):
    p = _write(tmp_path, {"model": {"n": 6, "g": 1.5}})
    cfg = load_config(p, ["model.n=3", "initial_state.kind=x_ground"])
    assert cfg.model.n == 3 and cfg.model.g == 1.5 and cfg.initial_state.kind == "x_ground"


def test_parse_override():
    assert parse_override("scan.mu_range=[1, 2]") == (["scan", "mu_range"], [1, 2])
    assert parse_override("output.directory=runs/x") == (["output", "directory"], "runs/x")
    with pytest.raises(ConfigError):
        parse_override("novalue")
    with pytest.raises(ConfigError):
        parse_override("a.b.c=1")


@pytest.mark.parametrize(
    "data, field",
    [
        ({"model": {"n": 0}}, "model.n"),
        ({"model": {"nn": 4}}, "model.nn"),
        ({"bogus": {}}, "bogus"),
        ({"mode": {"kind": "noisy"}}, "mode.steps_per_slice"),
        ({"mode": {"kind": "sampled"}}, "mode.shots"),
        ({"mode": {"zne_scales": [1, 1]}}, "mode.zne_scales"),
        ({"filter": {"schedule": [50, 30]}}, "filter.schedule"),
        ({"scan": {"inv_sigma_sq_range": [0.0, 1.0]}}, "scan.inv_sigma_sq_range"),
        ({"initial_state": {"kind": "w_state"}}, "initial_state.kind"),
        ({"cv": {"shifts": [2, 1]}}, "cv.shifts"),
    ],
)
def test_validation_errors_name_the_field(data, field):
    with pytest.raises(ConfigError) as exc:
        from_dict(data)
    assert exc.value.field == field
    assert str(exc.value).startswith(field)


def test_json_syntax_error_location(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "model": {"n": 4,}\n}')
    with pytest.raises(ConfigError) as exc:
        load_config(p)
    assert "line 2" in str(exc.value)


def test_config_round_trip():
    cfg = load_config(overrides=["model.n=5"])
    again = from_dict(json.loads(cfg.to_json()))
    assert again.to_json() == cfg.to_json()
    assert isinstance(again, ExperimentConfig)


# ---- cli ----

def test_scan_outputs_and_determinism(tmp_path):
    cfg = _write(tmp_path, SMALL)
    assert main(["scan", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    assert main(["scan", "--config", str(cfg), "--out", str(tmp_path / "b")]) == 0
    for name in ("scan.csv", "summary.json", "tables/table.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    ra, rb = (json.loads((tmp_path / d / "config-resolved.json").read_text()) for d in "ab")
    assert ra["output"]["directory"] != rb["output"]["directory"]
    ra.pop("output"), rb.pop("output")
    assert ra == rb
    rows = _rows(tmp_path / "a" / "scan.csv")
    assert len(rows) == 3 * 3 and set(rows[0]) == {"mu", "inv_sigma_sq", "energy", "denom_magnitude", "status"}
    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert summary["error"] == pytest.approx(summary["best_energy"] - summary["exact_lambda0"])


def test_scan_zero_cutoff_gives_rayleigh_quotient(tmp_path):
    cfg = _write(tmp_path, SMALL)
    assert main(["scan", "--config", str(cfg), "--out", str(tmp_path), "--set", "filter.m_y=0"]) == 0
    best = json.loads((tmp_path / "summary.json").read_text())["best_energy"]
    assert best == pytest.approx(expectation(build_tfim(4, 1.0, 2.0), random_state(4, 3)), abs=1e-12)


def test_seed_flag_changes_state(tmp_path):
    cfg = _write(tmp_path, SMALL)
    main(["scan", "--config", str(cfg), "--out", str(tmp_path / "a"), "--set", "filter.m_y=0"])
    main(["scan", "--config", str(cfg), "--out", str(tmp_path / "b"), "--set", "filter.m_y=0", "--seed", "11"])
    a = json.loads((tmp_path / "a" / "summary.json").read_text())["best_energy"]
    b = json.loads((tmp_path / "b" / "summary.json").read_text())["best_energy"]
    assert b == pytest.approx(expectation(build_tfim(4, 1.0, 2.0), random_state(4, 11)), abs=1e-12)
    assert a != b
    resolved = json.loads((tmp_path / "b" / "config-resolved.json").read_text())
    assert resolved["initial_state"]["seed"] == 11


def test_single_stage_iterate_equals_scan(tmp_path):
    cfg = _write(tmp_path, SMALL)
    main(["scan", "--config", str(cfg), "--out", str(tmp_path / "s")])
    assert main(["iterate", "--config", str(cfg), "--out", str(tmp_path / "i"), "--set", "filter.schedule=[20]"]) == 0
    s = json.loads((tmp_path / "s" / "summary.json").read_text())
    rows = _rows(tmp_path / "i" / "iterate.csv")
    assert len(rows) == 1 and float(rows[0]["best_energy"]) == s["best_energy"]
    assert (tmp_path / "i" / "scan_m20.csv").exists()


def test_iterate_schedule(tmp_path):
    cfg = _write(tmp_path, SMALL)
    assert main(["iterate", "--config", str(cfg), "--out", str(tmp_path), "--set", "filter.schedule=[10, 20, 30]"]) == 0
    rows = _rows(tmp_path / "iterate.csv")
    assert [int(r["m_y"]) for r in rows] == [10, 20, 30]
    assert float(rows[-1]["error"]) < float(rows[0]["error"])


def test_sampled_scan(tmp_path):
    cfg = _write(tmp_path, SMALL)
    args = ["scan", "--config", str(cfg), "--set", 'mode.kind="sampled"', "--set", "mode.shots=1000"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "scan.csv").read_bytes() == (tmp_path / "b" / "scan.csv").read_bytes()


def test_noise_zero_p_equals_noiseless(tmp_path):
    data = {
        "model": {"n": 3},
        "filter": {"delta_y": 0.08, "schedule": [1, 2]},
        "initial_state": {"kind": "x_ground"},
        "scan": {"mu_range": [0.0, -0.5], "mu_step": 0.25, "inv_sigma_sq_range": [1.0, 2.0],
                 "inv_sigma_sq_step": 1.0, "mu_anchor": "exact_ground"},
        "mode": {"kind": "noisy", "channel": "bit_flip", "p": 0.0, "steps_per_slice": 4},
    }
    assert main(["noise", "--config", str(_write(tmp_path, data)), "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "noise_bit_flip.csv")
    assert len(rows) == 2
    for r in rows:
        assert float(r["noisy_energy"]) == pytest.approx(float(r["noiseless_energy"]), abs=1e-9)
    assert (tmp_path / "tables" / "noiseless.json").exists()


def test_cv_command(tmp_path):
    assert main(["cv", "--out", str(tmp_path), "--set", "initial_state.kind=random"]) == 0
    rows = _rows(tmp_path / "cv.csv")
    errs = [float(r["error"]) for r in rows]
    meas = [int(r["required_measurements"]) for r in rows]
    assert len(rows) == 8 and all(b < a for a, b in zip(errs, errs[1:]))
    assert all(b >= a for a, b in zip(meas, meas[1:]))
    assert main(["cv", "--out", str(tmp_path / "one"), "--set", "cv.shifts=[0.5]"]) == 0
    assert len(_rows(tmp_path / "one" / "cv.csv")) == 1


def test_filter_response_command(tmp_path):
    assert main(["filter-response", "--out", str(tmp_path), "--set", "response.inv_sigma_sq=[2]",
                 "--set", "response.phi_m=[4, 8, 12]", "--set", "response.lambda_range=[0, 3]",
                 "--set", "response.n_lambda=31"]) == 0
    rows = _rows(tmp_path / "response.csv")
    windows = sorted({float(r["window"]) for r in rows})
    assert windows == pytest.approx([1.0, 2.0, 3.0])
    at_zero = [r for r in rows if float(r["lambda"]) == 0.0]
    # the shortest evolution time loses about erfc(phi_m sigma / 2) of the peak
    assert all(abs(float(r["re_g"]) - 1) < (5e-2 if float(r["phi_m"]) == 4.0 else 1e-3) for r in at_zero)
    eight = [r for r in rows if float(r["phi_m"]) == 8.0 and float(r["lambda"]) <= 2.0]
    assert max(abs(float(r["cosine"]) - float(r["gaussian"])) for r in eight) < 2e-2


def test_budget_command(tmp_path, capsys):
    assert main(["budget", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("y,t,shots")
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["phi_m"] == pytest.approx(8.0)
    assert summary["total_shots"] == pytest.approx(summary["total_shots_closed_form"], rel=0.02)


@pytest.mark.parametrize(
    "argv, code",
    [
        (["scan", "--set", "model.n=0"], 2),
        (["scan", "--set", "nosuch.key=1"], 2),
        (["scan", "--set", "model.n=13", "--set", "filter.m_y=1"], 3),
        (["noise", "--set", "model.n=9", "--set", "mode.kind=\"noisy\"", "--set", "mode.steps_per_slice=1",
          "--set", "filter.m_y=1", "--set", "scan.mu_anchor=-5"], 3),
        (["scan", "--set", "model.n=1", "--set", "model.periodic=false", "--set", "model.J=0",
          "--set", "model.g=0", "--set", "model.shift=-1", "--set", "initial_state.kind=x_ground",
          "--set", "filter.delta_y=0.1", "--set", "filter.m_y=200", "--set", "scan.mu_range=[40, 40]",
          "--set", "scan.inv_sigma_sq_range=[1, 1]"], 4),
    ],
)
def test_exit_codes(tmp_path, argv, code):
    assert main(argv + ["--out", str(tmp_path)]) == code


def test_missing_config_file(tmp_path):
    assert main(["scan", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == 2


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "qgf.cli", "budget", "--out", str(tmp_path)], capture_output=True, text=True
    )
    assert proc.returncode == 0 and "worst_case_gate_count" in proc.stdout
