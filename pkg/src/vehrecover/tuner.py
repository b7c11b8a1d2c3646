"""Compass search over the open-loop control parameters.

The objective is cheap (one fixed-step simulation), low dimensional and
non-smooth wherever the recovery thresholds are crossed, so a bounded pattern
search is used: poll each free parameter at +step then -step in a fixed order,
move to the first strict improvement, halve every step after a full poll
without one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .control import FORCE_FIELDS, STEERING_FIELDS, ForceParams, SteeringParams
from .dynamics import VehicleParams
from .scenario import RecoveryMetrics, ScenarioSpec, Thresholds, compute_metrics
from .sim import SimConfig, Trace, simulate

FAILURE_PENALTY = 1e6
TUNABLE = STEERING_FIELDS + FORCE_FIELDS
MIN_STEP_FRACTION = 1e-4
INITIAL_STEP_FRACTION = 0.1


@dataclass(frozen=True)
class ObjectiveWeights:
    w_y: float = 1.0       # per metre of final lateral error
    w_psi: float = 400.0   # per radian of final heading error
    w_time: float = 1.0    # per second until recovery

    def __post_init__(self):
        ws = (self.w_y, self.w_psi, self.w_time)
        if min(ws) < 0 or max(ws) <= 0:
            raise ValueError("objective weights must be >= 0 with at least one > 0")


@dataclass(frozen=True)
class TuneSpec:
    bounds: dict = field(default_factory=dict)   # name -> (lo, hi), in poll order
    weights: ObjectiveWeights = ObjectiveWeights()
    budget: int = 2000

    def __post_init__(self):
        if not self.bounds:
            raise ValueError("TuneSpec needs at least one free parameter")
        for name, (lo, hi) in self.bounds.items():
            if name not in TUNABLE:
                raise ValueError(f"{name!r} is not a tunable parameter; choose from {TUNABLE}")
            if not lo < hi:
                raise ValueError(f"bounds for {name!r} must satisfy lo < hi")
        if int(self.budget) != self.budget or self.budget < 1:
            raise ValueError("TuneSpec.budget must be an integer >= 1")

    @property
    def free(self) -> tuple:
        return tuple(self.bounds)


@dataclass(frozen=True)
class TuneRecord:
    iter: int
    objective: float
    values: dict


@dataclass
class TuneResult:
    steering: SteeringParams
    force: ForceParams
    objective: float
    evaluations: int
    history: list
    metrics: RecoveryMetrics
    trace: Trace
    free: tuple = ()
    rejected: int = 0

    @property
    def best_values(self) -> dict:
        return get_values(self.steering, self.force, self.free)


def objective(trace: Trace, metrics: RecoveryMetrics,
              weights: ObjectiveWeights = ObjectiveWeights()) -> float:
    """Weighted final errors plus time to recovery (the horizon if never)."""
    t_term = metrics.time_to_recovery if metrics.recovered else trace.horizon
    value = (weights.w_y * metrics.final_lateral_error
             + weights.w_psi * metrics.final_heading_error
             + weights.w_time * t_term)
    if trace.failed:
        value = FAILURE_PENALTY + (value if math.isfinite(value) else 0.0)
    return value


def get_values(steering: SteeringParams, force: ForceParams, names) -> dict:
    return {n: getattr(steering if n in STEERING_FIELDS else force, n) for n in names}


def with_values(steering: SteeringParams, force: ForceParams, values: dict):
    """Parameter sets with ``values`` substituted; raises ValueError if invalid."""
    s = {k: v for k, v in values.items() if k in STEERING_FIELDS}
    f = {k: v for k, v in values.items() if k in FORCE_FIELDS}
    return replace(steering, **s), replace(force, **f)


def tune(spec: TuneSpec, scenario: ScenarioSpec, sim: SimConfig,
         steering: SteeringParams, force: ForceParams, params: VehicleParams,
         thresholds: Thresholds = Thresholds()) -> TuneResult:
    free = spec.free
    lo = {n: float(spec.bounds[n][0]) for n in free}
    hi = {n: float(spec.bounds[n][1]) for n in free}
    span = {n: hi[n] - lo[n] for n in free}

    # the seed is projected into the box before anything is evaluated
    x = {n: min(max(v, lo[n]), hi[n]) for n, v in get_values(steering, force, free).items()}
    try:
        s_best, f_best = with_values(steering, force, x)
    except ValueError as exc:
        raise ValueError(f"infeasible tuning bounds: projected seed is invalid ({exc})") from None

    history = []
    cache = {}

    def evaluate(sp, fp, values):
        trace = simulate(scenario, sim, sp, fp, params)
        m = compute_metrics(trace, thresholds)
        val = objective(trace, m, spec.weights)
        history.append(TuneRecord(len(history), val, dict(values)))
        cache["last"] = (trace, m)
        return val

    best = evaluate(s_best, f_best, x)
    best_trace, best_metrics = cache["last"]
    step = {n: INITIAL_STEP_FRACTION * span[n] for n in free}
    rejected = 0

    while len(history) < spec.budget:
        moved = False
        for n in free:
            for sign in (1.0, -1.0):
                if len(history) >= spec.budget:
                    break
                cand = dict(x)
                cand[n] = min(max(x[n] + sign * step[n], lo[n]), hi[n])
                if cand[n] == x[n]:
                    continue
                try:
                    sp, fp = with_values(steering, force, cand)
                except ValueError:
                    rejected += 1   # violates a window-ordering or amplitude invariant
                    continue
                val = evaluate(sp, fp, cand)
                if val < best:
                    x, best, s_best, f_best = cand, val, sp, fp
                    best_trace, best_metrics = cache["last"]
                    moved = True
                    break
            if moved:
                break
        if not moved:
            if len(history) >= spec.budget:
                break
            for n in free:
                step[n] *= 0.5
            if all(step[n] < MIN_STEP_FRACTION * span[n] for n in free):
                break

    return TuneResult(s_best, f_best, best, len(history), history,
                      best_metrics, best_trace, free, rejected)
