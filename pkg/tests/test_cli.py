import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from phasebell.chsh_core import TSIRELSON, canonical_settings
from phasebell.cli import (
    CSV_HEADER,
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_VALIDATION,
    SweepConfig,
    cmd_null_suite,
    cmd_records,
    cmd_sweep,
    first_downcrossing,
    main,
    parse_model,
    run_sweep,
)
from phasebell.exceptions import ConfigurationError
from phasebell.estimator_pipeline import SECOND_HARMONIC
from phasebell.record_synth import ClassicalDeterministic, QuantumLocked

SMALL = dict(sigma_max=1.5, steps=12, n_samples=200)


@pytest.fixture(scope="module")
def default_sweep():
    return run_sweep(SweepConfig())


# --- sweep ------------------------------------------------------------------

def test_csv_header_and_rows(default_sweep):
    lines = default_sweep.csv_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 101
    sigmas = [float(r.split(",")[0]) for r in lines[1:]]
    assert sigmas == sorted(sigmas) and sigmas[-1] == 2.4


def test_sigma_zero_point(default_sweep):
    p = default_sweep.points[0]
    assert p.sigma_l == 0
    assert abs(p.s_oracle - TSIRELSON) < 1e-12
    assert abs(p.s_reduced - TSIRELSON * p.kappa) < 1e-12


def test_default_crossings(default_sweep):
    assert abs(default_sweep.crossing_reduced - 0.8326) <= 0.05
    assert abs(default_sweep.crossing_oracle - 0.9388) <= 0.05


def test_byte_determinism_across_runs_and_workers():
    a = run_sweep(SweepConfig(**SMALL)).csv_text()
    b = run_sweep(SweepConfig(**SMALL)).csv_text()
    c = run_sweep(SweepConfig(**SMALL, workers=4)).csv_text()
    assert a == b == c


def test_seed_changes_output():
    assert run_sweep(SweepConfig(**SMALL)).csv_text() != run_sweep(SweepConfig(**SMALL, seed=8)).csv_text()


def test_second_harmonic_crossing():
    res = run_sweep(SweepConfig(sigma_min=0.31, sigma_max=0.51, steps=21, n_samples=100_000,
                                convention=SECOND_HARMONIC))
    assert abs(res.crossing_reduced - 0.41628) <= 0.02


def test_svg_structure(default_sweep):
    svg = default_sweep.svg_text()
    assert svg.count("<polyline") == 2
    assert svg.count("<line") == 1
    assert 'stroke-dasharray' in svg
    assert svg == default_sweep.svg_text()


def test_outputs_written(tmp_path):
    cfg = SweepConfig(**SMALL, out_csv=str(tmp_path / "s.csv"), out_svg=str(tmp_path / "s.svg"),
                      out_manifest=str(tmp_path / "m.json"))
    res = cmd_sweep(cfg)
    assert (tmp_path / "s.csv").read_text() == res.csv_text()
    manifest = json.loads((tmp_path / "m.json").read_text())
    assert manifest["config"]["seed"] == 7 and len(manifest["points"]) == 12
    assert "version" in manifest and "wall_time_s" in manifest


def test_unwritable_output(tmp_path):
    cfg = SweepConfig(**SMALL, out_csv=str(tmp_path / "missing" / "s.csv"))
    with pytest.raises(ConfigurationError):
        cmd_sweep(cfg)


@pytest.mark.parametrize("bad", [dict(sigma_min=1.0, sigma_max=0.5), dict(steps=1),
                                 dict(kappa=1.5), dict(convention="x"), dict(n_samples=1)])
def test_invalid_config(bad):
    with pytest.raises(ConfigurationError):
        SweepConfig(**bad).validate()


def test_first_downcrossing():
    assert_allclose(first_downcrossing([0, 1, 2], [3, 2.5, 1.5]), 1.5)
    assert first_downcrossing([0, 1], [1, 0.5]) is None


# --- null suite -------------------------------------------------------------

def test_null_suite_passes():
    report = cmd_null_suite(trials=10, seed=1, n_windows=2000)
    assert report.passed
    assert set(report.max_abs_s) == {"deterministic", "shared-lambda-identity",
                                     "shared-lambda-detuned", "shared-lambda-concentrated",
                                     "phase-diffusion"}
    assert max(report.max_abs_s.values()) <= 2 + 1e-12
    assert report.lines()[-1] == "PASS"


def test_null_suite_needs_trials():
    with pytest.raises(ConfigurationError):
        cmd_null_suite(trials=5)


# --- records ----------------------------------------------------------------

def test_parse_model():
    assert parse_model("quantum:sigma_l=0.3") == QuantumLocked(0.3)
    assert parse_model("deterministic:phi1=0.3,phi2=1.2") == ClassicalDeterministic(0.3, 1.2)
    for bad in ("quantum:sigma_l", "quantum:bogus=1", "unknown:x=1", "quantum:sigma_l=abc"):
        with pytest.raises(ConfigurationError):
            parse_model(bad)


def test_records_quantum_example(tmp_path):
    record, analysis, payload = cmd_records("quantum:sigma_l=0.3", 1e5, 0.25, seed=0,
                                            out_csv=tmp_path / "r.csv",
                                            out_json=tmp_path / "r.json")
    red, raw = analysis.reduced, analysis.raw
    assert abs(red.s - TSIRELSON * np.exp(-0.18)) <= 3 * red.se
    assert abs(raw.s - np.sqrt(2) * np.exp(-0.18)) <= 3 * raw.se
    saved = json.loads((tmp_path / "r.json").read_text())
    assert saved == payload and saved["bias_control"] is True
    assert saved["model"] == "quantum:sigma_l=0.3"
    assert saved["reduced"]["kind"] == "reduced-phase" and saved["raw"]["kind"] == "raw-record"
    assert (tmp_path / "r.csv").read_text().startswith("t,phi1,phi2\n")


def test_records_deterministic_exact():
    _, analysis, _ = cmd_records("deterministic:phi1=0.3,phi2=1.2", 1000, 0.25)
    expected = sum(s * np.cos(2 * (0.3 - a)) * np.cos(2 * (1.2 - b)) for s, (a, b) in
                   zip((1, 1, 1, -1), canonical_settings().pairs()))
    assert_allclose(analysis.raw.s, expected, atol=1e-14)


# --- main -------------------------------------------------------------------

def test_main_sweep_with_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"sigma_max": 1.0, "steps": 5, "n_samples": 50}))
    out = tmp_path / "o.csv"
    assert main(["sweep", "--config", str(cfg), "--seed", "3", "--out-csv", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_HEADER and len(lines) == 6
    expected = run_sweep(SweepConfig(sigma_max=1.0, steps=5, n_samples=50, seed=3)).csv_text()
    assert out.read_text() == expected


@pytest.mark.parametrize("argv", [
    ["sweep", "--steps", "1"],
    ["sweep", "--config", "/nonexistent/cfg.json"],
    ["records", "--model", "quantum:sigma_l=0.3", "--dt", "0.5"],
    ["records", "--model", "nonsense"],
    ["null", "--trials", "3"],
])
def test_main_config_errors(argv, capsys):
    assert main(argv) == EXIT_CONFIG
    assert "error:" in capsys.readouterr().err


def test_main_unknown_config_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"sigmamax": 1.0}))
    assert main(["sweep", "--config", str(cfg)]) == EXIT_CONFIG


def test_main_null_and_records(capsys):
    assert main(["null", "--trials", "10", "--windows", "500"]) == EXIT_OK
    assert "PASS" in capsys.readouterr().out
    assert main(["records", "--model", "deterministic:phi1=0,phi2=0", "--duration", "200"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert_allclose(payload["raw"]["S"], np.sqrt(2), atol=1e-14)


def test_null_failure_exit_code(monkeypatch):
    import phasebell.cli as cli

    monkeypatch.setattr(cli, "cmd_null_suite",
                        lambda *a, **k: cli.NullReport({"x": 3.0}, [("x", 0, 3.0, 0.0)], 10, 100))
    assert main(["null"]) == EXIT_VALIDATION
