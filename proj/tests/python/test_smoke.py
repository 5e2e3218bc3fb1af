"""Smoke tests for the python extension and the CLI."""

import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

import sidyn


def test_scalar_smoothings():
    s = sidyn.ScalarSmoothing.sqrt_abs()
    assert s.value(0.0, 0.5) == pytest.approx(0.5)
    assert s.underlying(-3.0) == 3.0
    le = sidyn.ScalarSmoothing.logexp_plus()
    assert le.value(0.0, 1.0) == pytest.approx(math.log(2.0))
    assert le.deriv_s(0.0, 1.0) == pytest.approx(0.5)


def test_objective_calculus():
    f = sidyn.lift_separable(sidyn.ScalarSmoothing.sqrt_abs(), 3)
    assert f.dim == 3
    assert f.kappa == 3.0
    assert f.lip_nonsmooth == 1.0
    g = f + sidyn.zero_function(3)
    assert g.kappa == 3.0
    x = np.array([0.0, 0.0, 0.0])
    assert g.value(x, 1.0) == pytest.approx(3.0)
    assert np.allclose(g.grad_x(x, 1.0), np.zeros(3))


def test_schedule_gate():
    ok = sidyn.MuSchedule.power_law(1.0, 3.0, 1.0)
    assert ok.check_h1()["certified"]
    assert ok.integral_t_mu(1.0, math.inf) == pytest.approx(1.0)
    bad = sidyn.MuSchedule.power_law(1.0, 2.0, 1.0)
    assert not bad.check_h1()["certified"]


def test_certification():
    f = sidyn.lift_separable(sidyn.ScalarSmoothing.sqrt_abs(), 1)
    report = sidyn.certify(f, sidyn.DomainSampler.box(1, -10, 10, 300))
    assert report["all_pass"]
    broken = f.with_constants(0.5, 1.0, 0.0)
    assert not sidyn.certify(broken, sidyn.DomainSampler.box(1, -10, 10, 300))["all_pass"]


def test_short_example1_run():
    pre = sidyn.preset("ex1")
    cfg = pre.config
    cfg.t_end = 20.0
    x0 = np.array([3.0, -2.0])
    traj = sidyn.integrate(pre.spec, cfg, x0, np.zeros(2))
    assert not traj.truncated
    assert traj.samples[0].t == 1.0
    assert traj.samples[-1].t == pytest.approx(20.0)

    gap0 = traj.samples[0].f_raw - pre.problem.f_star
    gapT = traj.samples[-1].f_raw - pre.problem.f_star
    assert gapT < 1e-3 * gap0
    assert pre.problem.dist_to_opt(traj.samples[-1].x) < 0.05

    opts = sidyn.DiagnosticsOptions()
    opts.x_star = pre.problem.x_star
    opts.f_star = pre.problem.f_star
    verdicts = sidyn.run_standard_checks(pre.spec, traj, opts)
    assert verdicts, "expected at least one verdict"
    for v in verdicts:
        assert v.pass_, f"{v.name} failed with violation {v.max_violation}"

    slope = sidyn.fit_rate(traj, pre.problem.f_star, 2.0, 20.0)
    assert slope < -1.8


def test_interpolation_and_reproducibility():
    pre = sidyn.preset("ex1")
    cfg = pre.config
    cfg.t_end = 5.0
    x0 = np.array([1.0, 1.0])
    a = sidyn.integrate(pre.spec, cfg, x0, np.zeros(2))
    b = sidyn.integrate(pre.spec, cfg, x0, np.zeros(2))
    assert a.accepted_steps == b.accepted_steps
    xa = np.asarray(a.interpolate(2.345).x)
    xb = np.asarray(b.interpolate(2.345).x)
    assert np.array_equal(xa, xb)


@pytest.fixture(scope="module")
def cli():
    path = os.environ.get("SIDYN_CLI")
    if not path or not os.path.exists(path):
        pytest.skip("SIDYN_CLI not set")
    return path


def test_cli_run_and_rates(cli, tmp_path):
    config = {
        "problem": {"preset": "ex1"},
        "integrator": {"t_end": 10.0},
        "initial": {"count": 2, "box": [-5, 5], "seed": 12345},
        "out": str(tmp_path / "out"),
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(config))

    proc = subprocess.run([cli, "run", "--config", str(cfg_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["all_pass"]
    assert len(summary["runs"]) == 2
    assert summary["config"]["dynamic"]["alpha"] == 7.0
    assert (tmp_path / "out" / "run_000" / "trajectory.csv").exists()
    assert (tmp_path / "out" / "gap_loglog.svg").exists()

    csv_path = tmp_path / "out" / "run_000" / "trajectory.csv"
    proc = subprocess.run(
        [cli, "rates", str(csv_path), "--f-star", "0.75", "--window", "2", "10"],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "slope=" in proc.stdout


def test_cli_strict_rejects_non_integrable_schedule(cli, tmp_path):
    config = {
        "problem": {"preset": "ex1"},
        "schedule": {"kind": "power_law", "c": 1.0, "p": 2.0},
        "integrator": {"t_end": 5.0},
        "out": str(tmp_path / "out"),
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(config))
    proc = subprocess.run([cli, "run", "--config", str(cfg_path), "--strict"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    err = json.loads(proc.stderr.strip().splitlines()[-1])
    assert "h1" in err["error"]

    # without --strict the same config runs, with a warning
    proc = subprocess.run([cli, "run", "--config", str(cfg_path)],
                          capture_output=True, text=True)
    assert proc.returncode in (0, 1)
    assert "warning" in proc.stderr


def test_cli_verify(cli):
    proc = subprocess.run([cli, "verify", "sqrt_abs", "logexp_plus"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "all pass" in proc.stdout
