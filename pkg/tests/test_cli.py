import json
from pathlib import Path

import pytest

from solenoidlab.cli import RunConfig, default_params, main, run_experiment
from solenoidlab.periodic import PeriodicFn, cohomological_phi
from solenoidlab.words import SystemParams


def small_budgets():
    return {
        "mx_samples": 20000,
        "mx_level_min": 4,
        "mx_level_max": 10,
        "box_points": 20000,
        "box_level_min": 3,
        "box_level_max": 6,
        "render_points": 5000,
        "resolution": 32,
        "w_level_max": 5,
        "theta_n_max": 14,
        "porosity_words": 2,
        "porosity_depth": 12,
    }


def test_config_round_trip():
    cfg = RunConfig(
        params=SystemParams(3, 0.5, PeriodicFn.cosine(), truncation_tol=1e-8),
        experiments=("dim-estimate", "render"),
        seed=7,
        budgets={"mx_samples": 1000},
        outdir="somewhere",
    )
    back = RunConfig.from_json(cfg.to_json())
    assert back == cfg


def test_invalid_budget_rejected():
    doc = {"system": {"b": 2, "gamma": 0.4, "phi": [[1, 1, 0]]}, "budgets": {"x": -1}}
    with pytest.raises(ValueError):
        RunConfig.from_json(json.dumps(doc))


def test_empty_experiment_list_is_success(tmp_path):
    cfg = RunConfig(default_params(), (), outdir=str(tmp_path))
    assert run_experiment(cfg) == {}


def test_unknown_experiment_rejected(tmp_path):
    cfg = RunConfig(default_params(), ("nope",), outdir=str(tmp_path))
    with pytest.raises(ValueError):
        run_experiment(cfg)


def test_dichotomy_check_degenerate_summary(tmp_path):
    phi = cohomological_phi(PeriodicFn.cosine(), 2, 0.4)
    cfg = RunConfig(
        SystemParams(2, 0.4, phi), ("dichotomy-check",), outdir=str(tmp_path)
    )
    res = run_experiment(cfg)
    assert res["dichotomy-check"]["verdict"] == "H*"
    text = (tmp_path / "dichotomy-check" / "summary.txt").read_text()
    assert "verdict: H*" in text


def test_dim_estimate_reports_slope_and_prediction(tmp_path):
    cfg = RunConfig(
        default_params(), ("dim-estimate",), budgets=small_budgets(), outdir=str(tmp_path)
    )
    res = run_experiment(cfg)["dim-estimate"]
    assert "fiber_entropy_slope" in res and "predicted_dimension" in res
    text = (tmp_path / "dim-estimate" / "summary.txt").read_text()
    assert "fiber_entropy_slope" in text and "predicted_dimension" in text
    assert (tmp_path / "dim-estimate" / "entropy_profile.csv").exists()


def test_reports_bit_identical_under_same_seed(tmp_path):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    for out in (out1, out2):
        cfg = RunConfig(
            default_params(),
            ("dim-estimate", "separation-scan", "render"),
            seed=5,
            budgets=small_budgets(),
            outdir=str(out),
        )
        run_experiment(cfg)
    for rel in (
        "dim-estimate/summary.txt",
        "dim-estimate/entropy_profile.csv",
        "separation-scan/scan.csv",
        "render/attractor.pgm",
    ):
        assert (out1 / rel).read_bytes() == (out2 / rel).read_bytes()


def test_main_exit_codes(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg = RunConfig(
        default_params(), ("dichotomy-check",), budgets={}, outdir=str(tmp_path / "out")
    )
    cfg_path.write_text(cfg.to_json())
    assert main(["run", "--config", str(cfg_path)]) == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"system": {"b": 2, "gamma": 0.4}, "experiments": ["zzz"]}))
    assert main(["run", "--config", str(bad)]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == 2


def test_main_single_experiment_with_budget_override(tmp_path):
    code = main(
        [
            "dichotomy-check",
            "--outdir",
            str(tmp_path),
            "--seed",
            "3",
            "--budget",
            "word_depth=8",
        ]
    )
    assert code == 0
    assert (tmp_path / "dichotomy-check" / "summary.txt").exists()
