import math
import os
import subprocess

import pytest

import driftbandit as db


def test_design_single_update():
    des = db.DiscountedDesign(2, 0.5, 1.0)
    des.update([1.0, 0.0], 1.0)
    assert des.V[0][0] == pytest.approx(2.0)
    assert des.V[1][1] == pytest.approx(1.0)
    assert des.weight_sum == pytest.approx(1.0)
    assert list(des.ridge_estimate()) == pytest.approx([0.5, 0.0])


def test_scalar_helpers():
    r = db.lb_radius(S=1.0, L=1.0, R=1.0, delta=0.5, d=2, lam=2.0, W=0.0)
    assert r == pytest.approx(math.sqrt(2.0) + math.sqrt(2.0 * math.log(2.0)))
    assert db.optimal_gamma_lb(2, 6000, 2.0 * math.pi) == pytest.approx(0.97712, abs=1e-5)
    assert 1.0 / db.compute_c_mu("logistic", 1.0, 1.0) == pytest.approx(5.0, rel=0.1)
    assert db.compute_c_mu("identity", 3.0, 1.0) == 1.0
    assert db.bob_candidates(2, 6000)["N"] == 14
    p = db.mnl_probs([[1.0], [0.0]], [1.0])
    assert p[0] == pytest.approx(0.7310585786300049)
    assert db.fit_loglog([10, 100, 1000], [1, 10, 100])["slope"] == pytest.approx(1.0)


def test_errors_map_to_python():
    with pytest.raises(db.ConfigError):
        db.compute_c_mu("probit", 1.0, 1.0)
    with pytest.raises(ValueError):
        db.run_experiment({"task": "lb", "bogus": 1})
    with pytest.raises(db.Error):
        db.DiscountedDesign(2, 0.5, 1.0).update([1.0, 0.0, 0.0], 1.0)


def test_run_experiment_rows_and_summary():
    csv, summary = db.run_experiment({"task": "lb", "T": 25, "trials": 2, "threads": 1})
    lines = csv.strip().split("\n")
    assert tuple(lines[0].split(",")) == db.CSV_COLUMNS
    assert len(lines) == 1 + 2 * 2 * 25
    names = {a["algorithm"] for a in summary["algorithms"]}
    assert names == {"weight", "static"}
    assert summary["seeds"]["trial_seeds"] == [1, 2]
    again, _ = db.run_experiment({"task": "lb", "T": 25, "trials": 2, "threads": 2})
    assert again == csv


def test_mdp_experiment():
    csv, summary = db.run_experiment('{"task": "mdp_lm", "K": 8, "trials": 1}')
    assert len(csv.strip().split("\n")) == 1 + 2 * 8
    assert summary["config"]["task"] == "mdp_lm"


@pytest.mark.skipif("DRIFTBANDIT_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_run(tmp_path):
    cli = os.environ["DRIFTBANDIT_CLI"]
    out = subprocess.run(
        [cli, "run", "--task", "scb", "--T", "30", "--trials", "1", "--out", str(tmp_path)],
        check=True, capture_output=True, text=True)
    assert "scb_weight" in out.stdout
    assert (tmp_path / "scb.csv").exists()
    assert (tmp_path / "scb_summary.json").exists()
    bad = subprocess.run([cli, "run", "--task", "nope"], capture_output=True, text=True)
    assert bad.returncode != 0
