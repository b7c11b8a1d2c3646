"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py``; the lines are repeated in the
terminal summary (add ``-s`` to see them inline as well).
"""
import math
import time
from dataclasses import replace

import numpy as np
import pytest

from conftest import table2_controls
from vehrecover.cli import main
from vehrecover.config import load_config
from vehrecover.control import ForceParams, SteeringParams, cruise_force, steering, tractive_force
from vehrecover.dynamics import Model, VehicleParams
from vehrecover.scenario import ScenarioSpec, Thresholds, case1, compute_metrics
from vehrecover.sim import SimConfig, Trace, simulate
from vehrecover.tuner import tune

RESULTS = []
MODELS = [m.value for m in Model]
BUNDLED = ["case1_generalized", "case1_reference", "case2_generalized", "case2_reference"]


def report(n, title, ok, detail):
    line = f"criterion {n} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
    RESULTS.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module", autouse=True)
def warm_kernels():
    # load the compiled kernels once so the timings measure simulation only
    steer, force = table2_controls("case1", "generalized")
    simulate(case1(), SimConfig(horizon=0.01), steer, force, VehicleParams())


def test_criterion_1_equilibrium():
    t0 = time.perf_counter()
    p = VehicleParams()
    idle = SteeringParams(a1=0.0, a2=0.0, k_dir=-0.2, tau0=1.0, tau1=3.0, tau2=10.0, tau3=11.0)
    worst = 0.0
    for model in MODELS:
        force = ForceParams(cruise_force(30.0, p, model), 0.0, 5.443, 10.0)
        tr = simulate(ScenarioSpec(vx0=30.0), SimConfig(model=model, record_stride=1), idle, force, p)
        dev = np.abs(tr.states[:, [0, 1, 2, 4, 5]] - [30.0, 0, 0, 0, 0]).max()
        worst = max(worst, dev if not tr.failed else math.inf)
    elapsed = time.perf_counter() - t0
    report(1, "equilibrium held over 20 s, both models", worst <= 1e-9 and elapsed < 1.0,
           f"max deviation {worst:.3g}, {elapsed:.2f} s")


def test_criterion_2_mirror():
    t0 = time.perf_counter()
    p = VehicleParams()
    worst = 0.0
    for model in MODELS:
        steer, force = table2_controls("case1", model)
        flipped = replace(steer, k_dir=-steer.k_dir)
        for control in (True, False):
            a = simulate(case1(), SimConfig(model=model), steer, force, p, control=control).mirrored()
            b = simulate(case1().mirrored(), SimConfig(model=model), flipped, force, p, control=control)
            worst = max(worst, np.abs(a.table() - b.table()).max())
    elapsed = time.perf_counter() - t0
    report(2, "case 1 mirror twin, both models, with and without control",
           worst <= 1e-9 and elapsed < 5.0, f"max difference {worst:.3g}, {elapsed:.2f} s")


def test_criterion_3_rk4_order():
    t0 = time.perf_counter()
    p = VehicleParams()
    steer, force = table2_controls("case1", "generalized")
    # the steps all land on the first pulse's edges (1 s, 3 s)
    dts = (8e-3, 4e-3, 2e-3, 1e-3)
    ends = [simulate(case1(), SimConfig(dt=dt, horizon=4.0, record_stride=1), steer, force, p).states[-1]
            for dt in dts]
    diffs = [np.abs(a - b).max() for a, b in zip(ends, ends[1:])]
    orders = [math.log2(a / b) for a, b in zip(diffs, diffs[1:])]
    elapsed = time.perf_counter() - t0
    ok = all(3.7 <= q <= 4.3 for q in orders) and elapsed < 10.0
    report(3, "RK4 self-convergence order on controlled case 1", ok,
           f"orders {', '.join(f'{q:.3f}' for q in orders)}, {elapsed:.2f} s")


def test_criterion_4_uncontrolled_shape():
    p = VehicleParams()
    details, ok = [], True
    for model in MODELS:
        steer, force = table2_controls("case1", model)
        tr = simulate(case1(), SimConfig(model=model), steer, force, p, control=False)
        m = compute_metrics(tr, Thresholds())
        settle = []
        for name in ("wz", "vy"):
            a = np.abs(tr[name])
            above = np.flatnonzero(a >= 0.01 * a.max())
            settle.append(tr.t[above[-1] + 1] if above[-1] + 1 < len(tr) else math.inf)
        y_end = abs(tr["y"][-1])
        ok &= all(s < 20.0 for s in settle) and y_end > 5.0 and not m.recovered and not tr.failed
        details.append(f"{model}: |wz|,|vy| below 1% from {settle[0]:.2f} s, {settle[1]:.2f} s; "
                       f"|y(20)| {y_end:.2f} m; recovered {m.recovered}")
    report(4, "uncontrolled case 1 drifts off the track", ok, "; ".join(details))


@pytest.fixture(scope="module")
def tuned():
    """Tuning of every bundled config plus its uncontrolled reference run."""
    t0 = time.perf_counter()
    out = {}
    for name in BUNDLED:
        cfg = load_config(name)
        res = tune(cfg.tune, cfg.scenario, cfg.sim, cfg.steering, cfg.force, cfg.vehicle, cfg.thresholds)
        free = simulate(cfg.scenario, cfg.sim, cfg.steering, cfg.force, cfg.vehicle, control=False)
        out[name] = (cfg, res, free)
    return out, time.perf_counter() - t0


def test_criterion_5_controlled_recovery(tuned):
    runs, elapsed = tuned
    details, ok = [], elapsed < 120.0
    for name, (cfg, res, free) in runs.items():
        y_free = abs(free["y"][-1])
        y_end = res.metrics.final_lateral_error
        good = (res.metrics.recovered and res.evaluations <= cfg.tune.budget <= 2000
                and set(cfg.tune.free) == {"a1", "a2", "a_c", "tau_c1"} and y_end * 10 <= y_free)
        ok &= good
        details.append(f"{name}: recovered at {res.metrics.time_to_recovery} s after "
                       f"{res.evaluations} evaluations, |y(20)| {y_end:.3g} m vs uncontrolled {y_free:.3g} m")
    report(5, "tuned recovery for both cases and both models", ok,
           "; ".join(details) + f"; {elapsed:.1f} s total")


def test_criterion_6_model_sensitivity(tuned):
    runs, _ = tuned
    p = VehicleParams()
    differs = []
    for case in ("case1", "case2"):
        ag = runs[f"{case}_generalized"][1].force.a_c
        am = runs[f"{case}_reference"][1].force.a_c
        rel = abs(am - ag) / max(abs(ag), abs(am)) if max(abs(ag), abs(am)) > 0 else 0.0
        differs.append((case, ag, am, rel > 0.05))
    # the generalized column, unchanged, on the reference model
    steer, force = table2_controls("case1", "generalized")
    force = replace(force, f_initial=cruise_force(30.0, p, "reference"))
    cross = compute_metrics(simulate(case1(), SimConfig(model="reference"), steer, force, p))
    ok = any(d[3] for d in differs) or not cross.recovered
    detail = "; ".join(f"{c}: tuned a_c generalized {g:.4g} N, reference {m:.4g} N" for c, g, m, _ in differs)
    report(6, "models need different control parameters", ok,
           f"{detail}; generalized case 1 column on the reference model recovered={cross.recovered}")


def test_criterion_7_control_examples():
    steer, force = table2_controls("case1", "generalized")
    vals = (steering(2.0, steer), tractive_force(7.7215, force), cruise_force(30.0, VehicleParams()))
    # 0.98 * 30^2 / 2: at zero steer the longitudinal balance is 2 F = K_d vx^2
    want = (-0.2 * 0.175, 441.0 + 900.0, 0.98 * 900.0 / 2.0)
    ok = (vals[0] == want[0] and abs(vals[0] + 0.035) <= 1e-15
          and abs(vals[1] - want[1]) <= 1e-9 and vals[2] == want[2] == 441.0)
    report(7, "control-law worked examples", ok,
           f"steer(2 s) {vals[0]!r} rad, F(7.7215 s) {vals[1]!r} N, cruise {vals[2]!r} N")


def synthetic_trace(rng):
    n = int(rng.integers(20, 400))
    t = np.arange(n) * 0.01
    y = rng.uniform(-0.5, 0.5, n)
    psi = rng.uniform(-0.05, 0.05, n)
    calm = int(rng.integers(0, n))
    y[calm:] *= 0.1
    psi[calm:] *= 0.1
    states = np.column_stack([rng.uniform(5, 40, n), rng.uniform(-20, 20, n), rng.uniform(-1, 1, n),
                              30 * t, y, psi])
    return Trace(t, states, rng.uniform(-0.2, 0.2, (n, 2)))


def test_criterion_8_metric_properties():
    rng = np.random.default_rng(20260601)
    fails = 0
    recovered = 0
    for _ in range(100):
        tr = synthetic_trace(rng)
        th = Thresholds(rng.uniform(0, 0.4), rng.uniform(0, 0.04), rng.uniform(0, 1.5))
        loose = Thresholds(th.y_tol + rng.uniform(0, 0.2), th.psi_tol + rng.uniform(0, 0.02),
                           max(0.0, th.hold - rng.uniform(0, 1)))
        a, b = compute_metrics(tr, th), compute_metrics(tr, loose)
        recovered += a.recovered
        mono = (not a.recovered) or (b.recovered and b.time_to_recovery <= a.time_to_recovery)
        rev = compute_metrics(Trace(tr.t, tr.states[::-1].copy(), tr.controls[::-1].copy()), th)
        peaks = ((a.peak_lateral_deviation, a.peak_yaw_rate, a.peak_sideslip)
                 == (rev.peak_lateral_deviation, rev.peak_yaw_rate, rev.peak_sideslip))
        mirror = compute_metrics(tr.mirrored(), th) == a
        fails += not (mono and peaks and mirror)
    report(8, "metric monotonicity, reversal and mirror properties on 100 random traces",
           fails == 0, f"{fails} violations, {recovered} of 100 recovered under the tight thresholds")


def test_criterion_9_cli_determinism(tmp_path):
    differing = []
    for name in BUNDLED:
        for d in ("first", "second"):
            assert main(["run", name, "--out", str(tmp_path / d / name)]) == 0
    for d in ("first", "second"):
        main(["tune", "case1_generalized", "--out", str(tmp_path / d / "tune")])
    files = sorted(p.relative_to(tmp_path / "first") for p in (tmp_path / "first").rglob("*") if p.is_file())
    for rel in files:
        if (tmp_path / "first" / rel).read_bytes() != (tmp_path / "second" / rel).read_bytes():
            differing.append(str(rel))
    report(9, "CLI outputs byte-identical across two runs", not differing and len(files) == 12,
           f"{len(files)} files compared, differing: {differing or 'none'}")
