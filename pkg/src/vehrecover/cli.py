"""Command line entry point: ``run``, ``tune``, ``compare`` and ``show``.

Every output file is written whole, per run, and contains no timestamps or
host details, so identical inputs give byte-identical files.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, load_config, render
from .dynamics import VX_FLOOR
from .scenario import CASES, compute_metrics, metrics_dict
from .sim import TRACE_COLUMNS, Trace, simulate
from .tuner import tune

log = logging.getLogger("vehrecover")

EXIT_OK, EXIT_NOT_RECOVERED, EXIT_CONFIG, EXIT_FAILURE = 0, 1, 2, 3
MODEL_SUFFIX = {"generalized": "g", "reference": "m"}


def _num(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _kv_section(name: str, pairs) -> str:
    return f"[{name}]\n" + "".join(f"{k} = {_num(v)}\n" for k, v in pairs) + "\n"


def write_trace(path: Path, trace: Trace) -> None:
    rows = trace.table()
    with open(path, "w", newline="") as fh:
        fh.write(",".join(TRACE_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def _echo(cfg: RunConfig) -> str:
    # f_initial is echoed with its effective value even when defaulted
    return render(replace(cfg, f_initial_auto=False))


def metrics_report(cfg: RunConfig, trace: Trace, metrics, control: bool = True,
                   extra: str = "") -> str:
    cases = [(name, f"vx0={c().vx0!r} vy0={c().vy0!r} wz0={c().wz0!r}")
             for name, c in sorted(CASES.items())]
    text = _kv_section("metrics", metrics_dict(metrics).items())
    text += _kv_section("diagnosis", [("failure", trace.failure or "none"),
                                      ("samples", len(trace))])
    text += extra
    text += _kv_section("run", [("format", cfg.format_version), ("control", control),
                                ("integrator", "rk4 fixed step")])
    text += _kv_section("assumptions", [
        ("wheelbase", cfg.vehicle.wheelbase),
        ("tire_model", "linear cornering stiffness, no saturation"),
        ("road_friction", "rolling friction mu0 + mu1 vx^2 (generalized model only)"),
        ("actuator_limits", "none enforced"),
        ("vx_floor", VX_FLOOR),
    ])
    text += _kv_section("post_impact_cases", cases)
    return text + _echo(cfg)


def write_history(path: Path, result) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(("iter", "objective") + result.free) + "\n")
        for rec in result.history:
            vals = [str(rec.iter), repr(float(rec.objective))]
            vals += [repr(float(rec.values[n])) for n in result.free]
            fh.write(",".join(vals) + "\n")


def run_config(cfg: RunConfig, control: bool = True):
    trace = simulate(cfg.scenario, cfg.sim, cfg.steering, cfg.force, cfg.vehicle, control=control)
    return trace, compute_metrics(trace, cfg.thresholds)


def cmd_run(cfg: RunConfig, out: Path, control: bool = True) -> int:
    out.mkdir(parents=True, exist_ok=True)
    trace, m = run_config(cfg, control)
    write_trace(out / "trace.csv", trace)
    (out / "metrics.txt").write_text(metrics_report(cfg, trace, m, control))
    log.info("%s: recovered=%s time_to_recovery=%s final |y|=%.4g m",
             cfg.scenario.label, m.recovered, m.time_to_recovery, m.final_lateral_error)
    return EXIT_FAILURE if trace.failed else EXIT_OK


def cmd_tune(cfg: RunConfig, out: Path) -> int:
    if cfg.tune is None:
        raise ConfigError("config has no [tune] section")
    out.mkdir(parents=True, exist_ok=True)
    res = tune(cfg.tune, cfg.scenario, cfg.sim, cfg.steering, cfg.force,
               cfg.vehicle, cfg.thresholds)
    tuned = cfg.with_controls(res.steering, res.force)
    write_history(out / "tune_history.csv", res)
    write_trace(out / "trace.csv", res.trace)
    extra = _kv_section("tune_result", [("objective", res.objective),
                                        ("evaluations", res.evaluations),
                                        ("rejected", res.rejected)]
                        + list(res.best_values.items()))
    (out / "metrics.txt").write_text(metrics_report(tuned, res.trace, res.metrics, extra=extra))
    (out / "tuned.ini").write_text(render(tuned))
    log.info("tuned %s in %d evaluations: objective=%.6g recovered=%s",
             cfg.scenario.label, res.evaluations, res.objective, res.metrics.recovered)
    if res.trace.failed:
        return EXIT_FAILURE
    return EXIT_OK if res.metrics.recovered else EXIT_NOT_RECOVERED


def _suffixes(a: RunConfig, b: RunConfig):
    sa, sb = MODEL_SUFFIX[a.sim.model.value], MODEL_SUFFIX[b.sim.model.value]
    if sa == sb:
        sa, sb = sa + "1", sb + "2"
    return sa, sb


def compare_runs(a: RunConfig, b: RunConfig, control: bool = True):
    if a.scenario != b.scenario:
        raise ConfigError("compare: the two configs have different scenarios")
    if (a.sim.horizon, a.sim.dt, a.sim.record_stride) != (b.sim.horizon, b.sim.dt, b.sim.record_stride):
        raise ConfigError("compare: the two configs need the same horizon, dt and record_stride")
    ta, ma = run_config(a, control)
    tb, mb = run_config(b, control)
    return (ta, ma), (tb, mb)


def cmd_compare(a: RunConfig, b: RunConfig, out: Path, control: bool = True) -> int:
    out.mkdir(parents=True, exist_ok=True)
    (ta, ma), (tb, mb) = compare_runs(a, b, control)
    sa, sb = _suffixes(a, b)
    n = min(len(ta), len(tb))
    cols = TRACE_COLUMNS[1:]
    header = ["t"] + [f"{c}_{sa}" for c in cols] + [f"{c}_{sb}" for c in cols]
    body = np.column_stack([ta.t[:n], ta.table()[:n, 1:], tb.table()[:n, 1:]])
    with open(out / "compare_trace.csv", "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in body:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    diff = np.max(np.abs(ta.table()[:n, 1:] - tb.table()[:n, 1:]), axis=0) if n else np.zeros(len(cols))
    text = _kv_section(f"metrics_{sa}", metrics_dict(ma).items())
    text += _kv_section(f"metrics_{sb}", metrics_dict(mb).items())
    text += _kv_section("diagnosis", [(f"failure_{sa}", ta.failure or "none"),
                                      (f"failure_{sb}", tb.failure or "none"),
                                      ("shared_samples", n)])
    text += _kv_section("max_abs_diff", zip(cols, diff))
    (out / "compare_metrics.txt").write_text(text)
    (out / f"config_{sa}.ini").write_text(_echo(a))
    (out / f"config_{sb}.ini").write_text(_echo(b))
    return EXIT_FAILURE if (ta.failed or tb.failed) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vehrecover",
                                 description="Post-collision recovery simulation and tuning")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", help="simulate one config")
    p.add_argument("config", help="config file or bundled config name")
    p.add_argument("--no-control", action="store_true",
                   help="zero steering, constant cruise force")
    p.add_argument("--model", choices=("generalized", "reference"))
    p.add_argument("--out", help="output directory (default: [output] dir)")

    p = sub.add_parser("tune", help="compass-search the [tune] parameters")
    p.add_argument("config")
    p.add_argument("--out")

    p = sub.add_parser("compare", help="run two configs side by side")
    p.add_argument("config_a")
    p.add_argument("config_b")
    p.add_argument("--no-control", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("show", help="print a config with every default filled in")
    p.add_argument("config")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        if args.cmd == "run":
            cfg = load_config(args.config)
            if args.model:
                cfg = cfg.with_model(args.model)
            return cmd_run(cfg, Path(args.out or cfg.out_dir), not args.no_control)
        if args.cmd == "tune":
            cfg = load_config(args.config)
            return cmd_tune(cfg, Path(args.out or cfg.out_dir))
        if args.cmd == "compare":
            a, b = load_config(args.config_a), load_config(args.config_b)
            return cmd_compare(a, b, Path(args.out or "out/compare"), not args.no_control)
        if args.cmd == "show":
            sys.stdout.write(render(load_config(args.config)))
            return EXIT_OK
    except ConfigError as exc:
        print(f"vehrecover: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"vehrecover: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
