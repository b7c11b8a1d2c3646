"""Post-impact initial conditions and recovery metrics.

A collision is not modelled as a contact event. It is represented by the
state right after the impact: nonzero lateral velocity and/or yaw rate at
t = 0 while the vehicle is still on the desired path ``Y = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import VX_FLOOR, VehicleState
from .sim import Trace


@dataclass(frozen=True)
class ScenarioSpec:
    vx0: float = 30.0
    vy0: float = 0.0
    wz0: float = 0.0
    x0: float = 0.0
    y0: float = 0.0
    psi0: float = 0.0
    label: str = "custom"

    def __post_init__(self):
        if not self.vx0 >= VX_FLOOR:
            raise ValueError(f"ScenarioSpec.vx0 must be >= vx floor {VX_FLOOR} m/s")

    def initial_state(self) -> VehicleState:
        return VehicleState(self.vx0, self.vy0, self.wz0, self.x0, self.y0, self.psi0)

    def mirrored(self) -> "ScenarioSpec":
        return ScenarioSpec(self.vx0, -self.vy0, -self.wz0, self.x0, -self.y0,
                            -self.psi0, self.label + "_mirrored")


def case1() -> ScenarioSpec:
    """Side impact through the CG: lateral velocity only."""
    return ScenarioSpec(vx0=30.0, vy0=20.0, wz0=0.0, label="case1")


def case2() -> ScenarioSpec:
    """Side impact off the CG: lateral velocity plus yaw rate."""
    return ScenarioSpec(vx0=30.0, vy0=10.0, wz0=0.35, label="case2")


CASES = {"case1": case1, "case2": case2}


def named_case(name: str) -> ScenarioSpec:
    try:
        return CASES[name]()
    except KeyError:
        raise ValueError(f"unknown scenario case {name!r}; known: {sorted(CASES)}") from None


@dataclass(frozen=True)
class Thresholds:
    y_tol: float = 0.2     # m
    psi_tol: float = 0.02  # rad
    hold: float = 2.0      # s

    def __post_init__(self):
        if not (self.y_tol >= 0 and self.psi_tol >= 0 and self.hold >= 0):
            raise ValueError("thresholds must be non-negative")


@dataclass(frozen=True)
class RecoveryMetrics:
    time_to_recovery: float | None
    peak_lateral_deviation: float
    peak_yaw_rate: float
    peak_sideslip: float
    final_lateral_error: float
    final_heading_error: float
    recovered: bool


def _time_to_recovery(t, y, psi, th: Thresholds, horizon: float):
    eps = 1e-9 * max(1.0, abs(horizon))
    ok = (np.abs(y) <= th.y_tol) & (np.abs(psi) <= th.psi_tol)
    # time of the first out-of-tolerance sample at or after each sample
    bad_t = np.append(t[~ok], np.inf)
    next_bad = bad_t[np.searchsorted(bad_t, t, side="left")]
    good = ok & (next_bad > t + th.hold + eps) & (t + th.hold <= horizon + eps)
    hits = np.flatnonzero(good)
    return float(t[hits[0]]) if len(hits) else None


def compute_metrics(trace: Trace, thresholds: Thresholds = Thresholds()) -> RecoveryMetrics:
    if len(trace) == 0:
        raise ValueError("cannot compute metrics of an empty trace")
    t = trace.t
    y, psi = trace["y"], trace["psi"]
    vx, vy, wz = trace["vx"], trace["vy"], trace["wz"]
    ttr = None
    if not trace.failed:
        ttr = _time_to_recovery(t, y, psi, thresholds, float(t[-1]))
    return RecoveryMetrics(
        time_to_recovery=ttr,
        peak_lateral_deviation=float(np.max(np.abs(y))),
        peak_yaw_rate=float(np.max(np.abs(wz))),
        peak_sideslip=float(np.max(np.abs(np.arctan2(vy, vx)))),
        final_lateral_error=abs(float(y[-1])),
        final_heading_error=abs(float(psi[-1])),
        recovered=ttr is not None,
    )


def metrics_dict(m: RecoveryMetrics) -> dict:
    return {
        "recovered": m.recovered,
        "time_to_recovery": m.time_to_recovery,
        "peak_lateral_deviation": m.peak_lateral_deviation,
        "peak_yaw_rate": m.peak_yaw_rate,
        "peak_sideslip": m.peak_sideslip,
        "final_lateral_error": m.final_lateral_error,
        "final_heading_error": m.final_heading_error,
    }
