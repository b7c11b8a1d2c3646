"""Fixed-step RK4 integration of a vehicle model under the open-loop controls."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .control import ForceParams, SteeringParams, _force, _steering, uncontrolled
from .dynamics import (STATE_NAMES, VX_FLOOR, Model, VehicleParams, VehicleState,
                       VxFloorError, _rhs)

TRACE_COLUMNS = ("t",) + STATE_NAMES + ("delta_s", "f_xt")

# kernel status codes
OK, VX_BELOW_FLOOR, NONFINITE = 0, 1, 2


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-3
    horizon: float = 20.0
    model: Model = Model.GENERALIZED
    record_stride: int = 10

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        if not self.dt > 0:
            raise ValueError("SimConfig.dt must be > 0")
        if not self.horizon >= self.dt:
            raise ValueError("SimConfig.horizon must be >= dt")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValueError("SimConfig.record_stride must be an integer >= 1")

    @property
    def n_steps(self) -> int:
        # tolerate horizon/dt landing a hair below an integer
        return int(math.floor(self.horizon / self.dt + 1e-9))


@dataclass
class Trace:
    """Recorded samples of one simulation.

    ``states`` has columns ``vx, vy, wz, x, y, psi``; ``controls`` has
    ``delta_s, f_xt`` evaluated at the sample times. ``failure`` carries the
    diagnosis when the run stopped early.
    """
    t: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    sim: SimConfig | None = None
    meta: dict = field(default_factory=dict)
    failure: str | None = None

    def __len__(self):
        return len(self.t)

    def __getitem__(self, name: str) -> np.ndarray:
        if name == "t":
            return self.t
        if name in STATE_NAMES:
            return self.states[:, STATE_NAMES.index(name)]
        if name == "delta_s":
            return self.controls[:, 0]
        if name == "f_xt":
            return self.controls[:, 1]
        raise KeyError(name)

    @property
    def horizon(self) -> float:
        if self.sim is not None:
            return self.sim.n_steps * self.sim.dt
        return float(self.t[-1])

    @property
    def failed(self) -> bool:
        return self.failure is not None

    def table(self) -> np.ndarray:
        """Samples as one array in ``TRACE_COLUMNS`` order."""
        return np.column_stack([self.t, self.states, self.controls])

    def mirrored(self) -> "Trace":
        flip = np.array([1, -1, -1, 1, -1, -1], dtype=float)
        return Trace(self.t.copy(), self.states * flip,
                     self.controls * np.array([-1.0, 1.0]), self.sim,
                     dict(self.meta), self.failure)


@njit(cache=True, nogil=True)
def _stage(model, s, steer, force, p, out):
    if not s[0] >= VX_FLOOR:
        return VX_BELOW_FLOOR
    d = _rhs(model, s[0], s[1], s[2], s[5], steer, force, p)
    for i in range(6):
        out[i] = d[i]
    return OK


@njit(cache=True, nogil=True)
def _rk4(model, s, t, dt, sp, fp, p, out):
    """One RK4 step from ``s`` at ``t`` into ``out``; controls re-evaluated per stage."""
    k1 = np.empty(6)
    k2 = np.empty(6)
    k3 = np.empty(6)
    k4 = np.empty(6)
    tmp = np.empty(6)
    th = t + 0.5 * dt
    te = t + dt
    if _stage(model, s, _steering(t, sp), _force(t, fp), p, k1) != OK:
        return VX_BELOW_FLOOR
    for i in range(6):
        tmp[i] = s[i] + 0.5 * dt * k1[i]
    st = _steering(th, sp)
    ft = _force(th, fp)
    if _stage(model, tmp, st, ft, p, k2) != OK:
        return VX_BELOW_FLOOR
    for i in range(6):
        tmp[i] = s[i] + 0.5 * dt * k2[i]
    if _stage(model, tmp, st, ft, p, k3) != OK:
        return VX_BELOW_FLOOR
    for i in range(6):
        tmp[i] = s[i] + dt * k3[i]
    if _stage(model, tmp, _steering(te, sp), _force(te, fp), p, k4) != OK:
        return VX_BELOW_FLOOR
    for i in range(6):
        out[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        if not math.isfinite(out[i]):
            return NONFINITE
    return OK


@njit(cache=True, nogil=True)
def _integrate(model, s0, sp, fp, p, dt, n_steps, stride):
    n_rec = n_steps // stride + 1
    ts = np.empty(n_rec)
    xs = np.empty((n_rec, 6))
    us = np.empty((n_rec, 2))
    s = s0.copy()
    nxt = np.empty(6)
    j = 0
    for k in range(n_steps + 1):
        t = k * dt
        if k % stride == 0:
            ts[j] = t
            xs[j, :] = s
            us[j, 0] = _steering(t, sp)
            us[j, 1] = _force(t, fp)
            j += 1
        if k == n_steps:
            break
        status = _rk4(model, s, t, dt, sp, fp, p, nxt)
        if status != OK:
            return ts[:j], xs[:j], us[:j], status, t, s[0]
        s[:] = nxt
    return ts, xs, us, OK, n_steps * dt, s[0]


def step_rk4(state: VehicleState, t: float, dt: float, model: Model | str,
             steering: SteeringParams, force: ForceParams,
             params: VehicleParams) -> VehicleState:
    """Advance ``state`` from ``t`` to ``t + dt`` with one classical RK4 step."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    if not state.vx >= VX_FLOOR:
        raise VxFloorError(state.vx, t)
    out = np.empty(6)
    status = _rk4(Model(model).code, state.as_array(), t, dt,
                  steering.as_array(), force.as_array(), params.as_array(), out)
    if status == VX_BELOW_FLOOR:
        raise VxFloorError(float("nan"), t)
    if status == NONFINITE:
        raise FloatingPointError(f"non-finite state after step at t={t:.6g} s")
    return VehicleState.from_array(out)


def simulate(scenario, sim: SimConfig, steering: SteeringParams,
             force: ForceParams, params: VehicleParams,
             control: bool = True) -> Trace:
    """Integrate from the post-impact state at t=0 to the horizon.

    A run that leaves the model's validity envelope is not an exception: the
    partial trace is returned with ``failure`` set.
    """
    if not control:
        steering, force = uncontrolled(steering, force)
    s0 = scenario.initial_state().as_array()
    if not s0[0] >= VX_FLOOR:
        raise VxFloorError(s0[0], 0.0)
    ts, xs, us, status, t_end, vx_end = _integrate(
        sim.model.code, s0, steering.as_array(), force.as_array(),
        params.as_array(), sim.dt, sim.n_steps, int(sim.record_stride))
    failure = None
    if status == VX_BELOW_FLOOR:
        failure = (f"vx left the validity envelope (floor {VX_FLOOR} m/s) "
                   f"during the step starting at t={t_end:.6g} s")
    elif status == NONFINITE:
        failure = f"non-finite state during the step starting at t={t_end:.6g} s"
    meta = {"scenario": scenario, "steering": steering, "force": force,
            "params": params, "control": control}
    return Trace(ts, xs, us, sim, meta, failure)
