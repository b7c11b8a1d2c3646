"""Single-track vehicle models.

Two right-hand sides share one state layout ``(vx, vy, wz, X, Y, psi)``:

* ``generalized``: single-track Ackermann model with steering-coupled rolling
  friction, aerodynamic drag and a tractive force acting through both axles.
* ``reference``: classical 3DOF single-track model with linear tyres, i.e. the
  generalized model with every rolling-friction term removed.

Velocities are body-frame, the pose is global. The scalar kernels are compiled
with numba so the integrator in :mod:`vehrecover.sim` can call them in a tight
loop; the public functions wrap them with dataclasses and precondition checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numba import njit

VX_FLOOR = 0.5  # m/s, the vy/vx and wz/vx terms are singular at vx -> 0

# indices into the packed parameter vector used by the kernels
P_MASS, P_IZ, P_LF, P_LR, P_CF, P_CR, P_MU0, P_MU1, P_G, P_KD = range(10)

STATE_NAMES = ("vx", "vy", "wz", "x", "y", "psi")


class Model(str, Enum):
    GENERALIZED = "generalized"
    REFERENCE = "reference"

    @property
    def code(self) -> int:
        return 0 if self is Model.GENERALIZED else 1


class VxFloorError(ValueError):
    """Longitudinal speed dropped below the validity floor of the model."""

    def __init__(self, vx: float, t: float | None = None):
        self.vx = vx
        self.t = t
        where = "" if t is None else f" at t={t:.6g} s"
        super().__init__(f"vx={vx:.6g} m/s below floor {VX_FLOOR} m/s{where}")


@dataclass(frozen=True)
class VehicleParams:
    mass: float = 1750.0            # kg
    yaw_inertia: float = 2350.0     # kg m^2
    dist_front: float = 1.2         # m, CG to front axle
    dist_rear: float = 1.6          # m, CG to rear axle
    cornering_front: float = 12e4   # N/rad
    cornering_rear: float = 12e4    # N/rad
    mu0: float = 0.015
    mu1: float = 7e-6               # s^2/m^2
    gravity: float = 9.8            # m/s^2
    drag_lumped: float = 0.98       # N s^2/m^2, drag force = drag_lumped * vx^2

    def __post_init__(self):
        for name in ("mass", "yaw_inertia", "dist_front", "dist_rear",
                     "cornering_front", "cornering_rear", "gravity"):
            if not getattr(self, name) > 0:
                raise ValueError(f"VehicleParams.{name} must be > 0")
        for name in ("drag_lumped", "mu0", "mu1"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"VehicleParams.{name} must be >= 0")

    def as_array(self) -> np.ndarray:
        return np.array([self.mass, self.yaw_inertia, self.dist_front,
                         self.dist_rear, self.cornering_front,
                         self.cornering_rear, self.mu0, self.mu1,
                         self.gravity, self.drag_lumped], dtype=np.float64)

    @property
    def wheelbase(self) -> float:
        return self.dist_front + self.dist_rear


@dataclass(frozen=True)
class VehicleState:
    vx: float
    vy: float = 0.0
    wz: float = 0.0
    x: float = 0.0
    y: float = 0.0
    psi: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.vx, self.vy, self.wz, self.x, self.y, self.psi],
                        dtype=np.float64)

    @classmethod
    def from_array(cls, a) -> "VehicleState":
        return cls(*(float(v) for v in a))

    def mirrored(self) -> "VehicleState":
        """Reflection about the desired path (the global x-axis)."""
        return VehicleState(self.vx, -self.vy, -self.wz, self.x, -self.y, -self.psi)


@dataclass(frozen=True)
class ControlInput:
    steer: float = 0.0           # rad
    tractive_force: float = 0.0  # N

    def __post_init__(self):
        if not abs(self.steer) < math.pi / 2:
            raise ValueError("|steer| must be < pi/2")


@njit(cache=True, nogil=True)
def _rhs(model, vx, vy, wz, psi, steer, force, p):
    m = p[P_MASS]
    iz = p[P_IZ]
    lf = p[P_LF]
    lr = p[P_LR]
    cf2 = 2.0 * p[P_CF]
    cr2 = 2.0 * p[P_CR]
    c = math.cos(steer)
    s = math.sin(steer)
    if model == 0:
        fric = (p[P_MU0] + p[P_MU1] * vx * vx) * p[P_G]
    else:
        fric = 0.0

    dvx = (force / m * (c + 1.0)
           - cf2 / m * steer * s
           + cf2 / m * (vy / vx) * s
           + cf2 / m * lf * (wz / vx) * s
           - fric * (c - 1.0)
           - p[P_KD] / m * vx * vx
           + wz * vy)
    dvy = (force / m * s
           + cf2 / m * steer * c
           - cf2 * c / m * (vy / vx)
           - cr2 / m * (vy / vx)
           - cf2 * lf * c / m * (wz / vx)
           + cr2 * lr / m * (wz / vx)
           - fric * s
           - wz * vx)
    dwz = (lf / iz * cf2 * steer * c
           - (cf2 * lf * c - cr2 * lr) / iz * (vy / vx)
           - (cf2 * lf * lf * c + cr2 * lr * lr) / iz * (wz / vx)
           + lf / iz * force * s
           - fric * m * lf / iz * s)
    cp = math.cos(psi)
    sp = math.sin(psi)
    return dvx, dvy, dwz, vx * cp - vy * sp, vx * sp + vy * cp, wz


def _check(state: VehicleState, inp: ControlInput):
    if not state.vx >= VX_FLOOR:
        raise VxFloorError(state.vx)
    if not abs(inp.steer) < math.pi / 2:
        raise ValueError("|steer| must be < pi/2")


def rhs(model: Model | str, state: VehicleState, inp: ControlInput,
        params: VehicleParams) -> np.ndarray:
    model = Model(model)
    _check(state, inp)
    out = _rhs(model.code, state.vx, state.vy, state.wz, state.psi,
               inp.steer, inp.tractive_force, params.as_array())
    return np.array(out)


def rhs_generalized(state: VehicleState, inp: ControlInput,
                    params: VehicleParams) -> np.ndarray:
    """Time derivative ``(vx', vy', wz', X', Y', psi')`` of the generalized model."""
    return rhs(Model.GENERALIZED, state, inp, params)


def rhs_reference(state: VehicleState, inp: ControlInput,
                  params: VehicleParams) -> np.ndarray:
    """Time derivative of the linear-tyre 3DOF reference model.

    In force form::

        F_yf = 2 C_af (steer - (vy + lf wz) / vx)
        F_yr = -2 C_ar (vy - lr wz) / vx
        m vx'        = F (1 + cos steer) - F_yf sin steer - K_d vx^2 + m wz vy
        m (vy' + wz vx) = F_yf cos steer + F_yr + F sin steer
        I_z wz'      = lf (F_yf cos steer + F sin steer) - lr F_yr
    """
    return rhs(Model.REFERENCE, state, inp, params)


def lateral_subsystem_matrix(vx: float, params: VehicleParams) -> np.ndarray:
    """Matrix A with ``(vy', wz') = A @ (vy, wz)`` at zero steer and frozen vx.

    Identical for both models, since every friction term carries a factor of
    ``sin(steer)`` or ``cos(steer) - 1`` in the lateral and yaw equations.
    """
    if not vx >= VX_FLOOR:
        raise VxFloorError(vx)
    m, iz = params.mass, params.yaw_inertia
    lf, lr = params.dist_front, params.dist_rear
    cf2, cr2 = 2 * params.cornering_front, 2 * params.cornering_rear
    return np.array([
        [-(cf2 + cr2) / (m * vx), -(cf2 * lf - cr2 * lr) / (m * vx) - vx],
        [-(cf2 * lf - cr2 * lr) / (iz * vx), -(cf2 * lf**2 + cr2 * lr**2) / (iz * vx)],
    ])
