import json
import os
import subprocess
import sys

import numpy as np
import pytest

from craftsynth.channels import ChiDiag
from craftsynth.harness import (
    ConfigError,
    ExperimentConfig,
    SchemaError,
    emit_report,
    fit_loglog_slope,
    overhead_ratio,
    overhead_report,
    read_csv,
    run_experiment,
    write_csv,
)


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="nope")
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="fig1_accuracy")  # empty grids
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="fig5_tradeoff", eps_list=[1e-2],
                         theta_list=[0.1], instances=0)


def test_overhead_report_zero_rate():
    chi = ChiDiag(1.0, 0.0, 0.0, 0.0)
    for method in ("pec", "rescaling", "ed_pec", "ed_rescaling"):
        rep = overhead_report(chi, 100, method)
        assert rep["gamma"] == 1.0 and rep["total"] == 1.0


def test_overhead_xy_beats_plain_pec():
    chi = ChiDiag(1 - 1e-4, 0.495e-4, 0.495e-4, 0.01e-4)  # q_z = 1e-2
    plain = overhead_report(chi, 1, "pec")["gamma"]
    ed = overhead_report(chi, 1, "ed_pec")["gamma"]
    assert ed < plain


def test_overhead_paper_ratios():
    eps = 1e-5
    assert abs(overhead_ratio(eps**2, 49 * eps**2, int(1e8)) - 6.8) <= 0.1
    assert abs(overhead_ratio(eps**2, 49 * eps**2, int(2e8)) - 47) <= 1.0
    assert abs(overhead_ratio(eps**2, 49 * eps**2, int(3e8)) - 317) <= 1.0


def test_fit_loglog_slope():
    x = np.array([1e-1, 3e-2, 1e-2, 3e-3])
    y = 5.0 * x**2
    slope, err = fit_loglog_slope(x, y)
    assert abs(slope - 2.0) < 1e-9
    assert err < 1e-9


def test_csv_round_trip(tmp_path):
    rows = [{"a": 1, "b": "x"}, {"a": 2, "b": "y"}]
    path = str(tmp_path / "t.csv")
    write_csv(rows, ["a", "b"], path)
    with open(path) as fh:
        assert fh.readline().startswith("#schema=v1")
    back = read_csv(path)
    assert back[0]["a"] == "1" and back[1]["b"] == "y"
    with pytest.raises(SchemaError):
        write_csv([], ["a"], path)
    with pytest.raises(SchemaError):
        write_csv([{"a": 1}], ["a", "b"], path)


def test_whitenoise_experiment_rows(tmp_path):
    cfg = ExperimentConfig(kind="whitenoise", instances=2, base_seed=3,
                           layers_list=[40], eps_coh_list=[0.0],
                           n_qubits=2, p_dep=1e-3)
    rows, cols = run_experiment(cfg)
    assert len(rows) == 2
    csv_path, json_path = emit_report(rows, cols, "whitenoise", str(tmp_path))
    summary = json.load(open(json_path))
    assert summary["rows"] == 2
    assert summary["bias_within_bound"] is True


def test_reproducibility_and_worker_independence(tmp_path):
    base = dict(kind="whitenoise", instances=3, base_seed=9,
                layers_list=[30], eps_coh_list=[0.0], n_qubits=2, p_dep=1e-3)
    rows1, cols = run_experiment(ExperimentConfig(**base))
    rows2, _ = run_experiment(ExperimentConfig(**base))
    rows3, _ = run_experiment(ExperimentConfig(**base, n_jobs=2))
    p1, p2, p3 = (str(tmp_path / f"r{i}.csv") for i in range(3))
    write_csv(rows1, cols, p1)
    write_csv(rows2, cols, p2)
    write_csv(rows3, cols, p3)
    assert open(p1).read() == open(p2).read() == open(p3).read()


def test_fig5_single_cell():
    cfg = ExperimentConfig(kind="fig5_tradeoff", eps_list=[3e-2],
                           theta_list=[3 * np.pi / 32], pool_min=24)
    rows, cols = run_experiment(cfg)
    assert len(rows) == 1
    row = rows[0]
    assert row["failure"] == ""
    assert row["final_rate"] >= 0
    assert row["plain_tcount"] >= 1


def test_fig1_single_cell():
    cfg = ExperimentConfig(kind="fig1_accuracy", eps_list=[1e-2],
                           c_list=[3.0], r_list=[1], instances=2, base_seed=5)
    rows, cols = run_experiment(cfg)
    assert len(rows) == 2
    for row in rows:
        if row["success"]:
            assert row["bound_lo"] - 1e-12 <= row["d_diamond"] <= row["bound_hi"] + 1e-12
        assert row["det_achieved"] <= 1e-2


def test_cli_end_to_end(tmp_path):
    env = dict(os.environ)
    out = tmp_path / "res.json"
    r = subprocess.run(
        [sys.executable, "-m", "craftsynth.cli", "synth", "--rz", "0.19",
         "--eps", "1e-2", "--out", str(out)],
        capture_output=True, text=True, env=env,
    )
    assert r.returncode == 0, r.stderr
    payload = json.load(open(out))
    assert payload["achieved"] <= 1e-2

    out2 = tmp_path / "sol.json"
    r = subprocess.run(
        [sys.executable, "-m", "craftsynth.cli", "craft", "--constraint",
         "pauli", "--c", "3", "--bigr", "1", "--eps", "5e-2", "--rz", "0.3",
         "--out", str(out2)],
        capture_output=True, text=True, env=env,
    )
    assert r.returncode == 0, r.stderr
    sol = json.load(open(out2))
    assert "d_diamond" in sol and "chi" in sol

    out3 = tmp_path / "wn.csv"
    r = subprocess.run(
        [sys.executable, "-m", "craftsynth.cli", "whitenoise", "--n", "2",
         "--p", "1e-3", "--layers", "30", "--seeds", "2", "--out", str(out3)],
        capture_output=True, text=True, env=env,
    )
    assert r.returncode == 0, r.stderr
    assert open(out3).readline().startswith("#schema=")

    cfgp = tmp_path / "cfg.json"
    json.dump({"eps_list": [3e-2], "theta_list": [0.29], "pool_min": 16},
              open(cfgp, "w"))
    r = subprocess.run(
        [sys.executable, "-m", "craftsynth.cli", "sweep", "--experiment",
         "fig5_tradeoff", "--config", str(cfgp), "--out-dir", str(tmp_path)],
        capture_output=True, text=True, env=env,
    )
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "fig5_tradeoff.csv").exists()
    assert (tmp_path / "fig5_tradeoff_summary.json").exists()
