"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines as they
come in.  Every tolerance is pinned here, not tuned at runtime.
"""

import math
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from fodesim.analysis import characteristic_polynomial, polynomial_roots, stability_report
from fodesim.fracops import SampledSignal, gl_differintegral
from fodesim.sim_direct import simulate_direct
from fodesim.sim_statespace import (
    CommensurateStateSpace,
    build_realization,
    classify_trajectory,
    equilibrium,
    simulate_commensurate,
    simulate_state_space,
)
from conftest import EQUILIBRIUM_Y, reference_model
from oracles import (
    GAMMA_2_5,
    HALF_INTEGRAL_STEP_AT_1,
    closed_loop_reference_integer,
)

REPO_ROOT = Path(__file__).resolve().parents[1]


def _report(criterion: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {criterion}: {detail}"


def test_criterion_1_equilibrium_reproduction():
    start = time.perf_counter()
    ts = simulate_direct(reference_model(), h=1e-3, t_end=15.0)
    elapsed = time.perf_counter() - start
    gap = abs(ts.y[-1] - EQUILIBRIUM_Y)
    ok = gap < 0.02 and elapsed <= 30.0 and not ts.diverged
    _report(
        "1",
        ok,
        f"unit step settles to {ts.y[-1]:.6f} vs {EQUILIBRIUM_Y:.6f} "
        f"(|gap| = {gap:.2e} < 0.02) in {elapsed:.1f}s",
    )


def test_criterion_2_stability_dichotomy():
    outcomes = {}
    for td, expected in ((3.7343, "converging"), (0.7343, "diverging")):
        model = reference_model(Td=td)
        eq = equilibrium(model, 1.0)
        real = build_realization(model)
        for h in (1e-3, 5e-4):
            traj = simulate_state_space(real, model, h=h, t_end=30.0)
            outcomes[(td, h)] = classify_trajectory(traj, eq)
        outcomes[(td, "verdict")] = stability_report(model).verdict

    ok = (
        outcomes[(3.7343, 1e-3)] == outcomes[(3.7343, 5e-4)] == "converging"
        and outcomes[(0.7343, 1e-3)] == outcomes[(0.7343, 5e-4)] == "diverging"
        and outcomes[(3.7343, "verdict")] == "stable"
        and outcomes[(0.7343, "verdict")] == "unstable"
    )
    _report(
        "2",
        ok,
        f"Td=3.7343 -> {outcomes[(3.7343, 1e-3)]}/{outcomes[(3.7343, 5e-4)]} "
        f"(sector: {outcomes[(3.7343, 'verdict')]}); "
        f"Td=0.7343 -> {outcomes[(0.7343, 1e-3)]}/{outcomes[(0.7343, 5e-4)]} "
        f"(sector: {outcomes[(0.7343, 'verdict')]}) at h in {{1e-3, 5e-4}}",
    )


def test_criterion_3_solver_cross_validation():
    model = reference_model()
    real = build_realization(model)
    gaps = []
    for h in (1e-3, 5e-4, 2.5e-4):
        direct = simulate_direct(model, h=h, t_end=10.0)
        ss = simulate_state_space(real, model, h=h, t_end=10.0)
        gaps.append(float(np.max(np.abs(direct.y - ss.y))))
    ok = gaps[2] < 0.05 and gaps[0] > gaps[1] > gaps[2]
    _report(
        "3",
        ok,
        f"max|y_direct - y_statespace| over [0,10]: "
        f"{gaps[0]:.4f} > {gaps[1]:.4f} > {gaps[2]:.4f} "
        f"(h = 1e-3, 5e-4, 2.5e-4; final < 0.05)",
    )


def test_criterion_4_dominant_pole_and_damping():
    report = stability_report(reference_model())
    dom = report.dominant_pole
    ok_a = dom is not None and abs(dom.real - (-1.5)) <= 0.15

    re_im = abs(dom.real / dom.imag)
    im_re = abs(dom.imag / dom.real)
    matches = [
        name
        for name, val in (("|Re/Im|", re_im), ("|Im/Re|", im_re))
        if abs(val - 0.37) <= 0.05
    ]
    ok_b = bool(matches) and "Re/Im" in report.convention_notes
    _report(
        "4a",
        ok_a,
        f"dominant principal pole {dom.real:.4f}{dom.imag:+.4f}j, "
        f"real part within -1.5 +/- 0.15",
    )
    _report(
        "4b",
        ok_b,
        f"damping candidates |Re/Im| = {re_im:.4f}, |Im/Re| = {im_re:.4f}; "
        f"{matches} within 0.37 +/- 0.05, convention recorded in notes",
    )


def test_criterion_5_gl_operator_accuracy():
    target = 2.0 / GAMMA_2_5  # Gamma(3)/Gamma(2.5)
    errs = {}
    for h in (1e-3, 5e-4):
        n = int(round(1.0 / h))
        t = np.arange(n + 1) * h
        sig = SampledSignal(step=h, values=t**2)
        errs[h] = abs(gl_differintegral(sig, 0.5, n) - target)
    rel = errs[1e-3] / target
    ratio = errs[1e-3] / errs[5e-4]
    ok = rel < 0.01 and 1.7 <= ratio <= 2.3
    _report(
        "5",
        ok,
        f"D^0.5 t^2 at t=1: rel err {rel:.2e} < 1%; "
        f"h-halving error ratio {ratio:.3f} in [1.7, 2.3]",
    )


def test_criterion_6_integer_order_degeneration():
    model = reference_model(alpha=2.0, beta=1.0, delta=1.0)
    _, y_ref = closed_loop_reference_integer(
        a0=1.0, a1=0.5, a2=0.8, K=20.5, Td=3.7343, h=1e-3, t_end=10.0
    )
    direct = simulate_direct(model, h=1e-3, t_end=10.0)
    ss = simulate_state_space(build_realization(model), model, h=1e-3, t_end=10.0)
    err_direct = float(np.max(np.abs(direct.y - y_ref)))
    err_ss = float(np.max(np.abs(ss.y - y_ref)))
    ok = err_direct < 1e-2 and err_ss < 1e-2
    _report(
        "6",
        ok,
        f"alpha=2, beta=1, delta=1 vs RK4 reference: "
        f"direct {err_direct:.2e}, statespace {err_ss:.2e} (both < 1e-2)",
    )


def test_criterion_7_commensurate_simulator():
    h = 1e-3
    integ = CommensurateStateSpace(order=0.5, A=[[0.0]], B=[1.0], C=[1.0])
    u = SampledSignal(step=h, values=np.ones(1001))
    traj = simulate_commensurate(integ, u, h)
    rel = abs(traj.y[1000] - HALF_INTEGRAL_STEP_AT_1) / HALF_INTEGRAL_STEP_AT_1

    A = np.array([[0.0, 1.0], [-2.0, -0.7]])
    B = np.array([0.0, 1.0])
    ss1 = CommensurateStateSpace(order=1.0, A=A, B=B, C=[1.0, 0.0])
    u2 = SampledSignal(step=h, values=np.ones(2001))
    traj1 = simulate_commensurate(ss1, u2, h)
    x = np.zeros((2001, 2))
    for k in range(2000):
        x[k + 1] = x[k] + h * (A @ x[k] + B * u2.values[k])
    euler_gap = float(np.max(np.abs(traj1.states - x)))

    ok = rel < 0.01 and euler_gap <= 1e-12
    _report(
        "7",
        ok,
        f"half-order integrator y(1) rel err {rel:.2e} < 1%; "
        f"q=1 vs explicit Euler max gap {euler_gap:.1e} <= 1e-12",
    )


def test_criterion_8_root_finder_contract():
    poly = characteristic_polynomial(reference_model())
    roots = polynomial_roots(poly)
    desc = poly.coefficients[::-1]
    scale = np.polyval(np.abs(desc), np.abs(roots))
    residuals = np.abs(np.polyval(desc, roots)) / scale
    rebuilt = poly.coefficients[-1] * np.poly(roots)
    recon = float(
        np.max(np.abs(rebuilt[::-1] - poly.coefficients))
        / np.max(np.abs(poly.coefficients))
    )
    ok = (
        poly.degree == 44
        and len(roots) == 44
        and float(residuals.max()) < 1e-8
        and recon < 1e-6
    )
    _report(
        "8",
        ok,
        f"degree-44 polynomial: {len(roots)} roots, max residual "
        f"{residuals.max():.1e} < 1e-8, reconstruction {recon:.1e} < 1e-6",
    )


def _cli(argv, config_text, tmp_path, threads):
    cfg = tmp_path / "acceptance.cfg"
    cfg.write_text(config_text)
    env = dict(os.environ)
    env["FODESIM_THREADS"] = threads
    env["PYTHONPATH"] = str(REPO_ROOT / "src") + os.pathsep + env.get("PYTHONPATH", "")
    return subprocess.run(
        [sys.executable, "-m", "fodesim", *argv, "--config", str(cfg)],
        capture_output=True,
        env=env,
        check=False,
    )


def test_criterion_9_cli_determinism(tmp_path):
    config = "sim.h = 0.01\nsim.t_end = 2.0\nanalysis.points = 50\n"
    mismatches = []
    for command in ("step", "traj", "poles", "bode"):
        first = _cli([command], config, tmp_path, threads="1")
        again = _cli([command], config, tmp_path, threads="1")
        more_threads = _cli([command], config, tmp_path, threads="4")
        assert first.returncode == 0, first.stderr.decode()
        if not (first.stdout == again.stdout == more_threads.stdout):
            mismatches.append(command)
    ok = not mismatches
    _report(
        "9",
        ok,
        "all four commands byte-identical across reruns and "
        "FODESIM_THREADS in {1, 4}"
        + (f"; mismatches: {mismatches}" if mismatches else ""),
    )
