"""Open-loop recovery controls built from windowed half-sine pulses.

Steering is the sum of two pulses scaled by a signed direction gain::

    steer(t) = k_dir * (a1 * hs(t; tau0, tau1) + a2 * hs(t; tau2, tau3))

and the tractive force is a cruise force plus one pulse::

    F(t) = f_initial + a_c * hs(t; tau_c1, tau_c2)

where ``hs(t; a, b) = sin(pi (t - a) / (b - a))`` on ``[a, b)`` and zero
elsewhere (a sine of period ``2 (b - a)`` phased to start at ``a``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numba import njit

from .dynamics import VX_FLOOR, Model, VehicleParams, VxFloorError

STEERING_FIELDS = ("a1", "a2", "k_dir", "tau0", "tau1", "tau2", "tau3")
FORCE_FIELDS = ("f_initial", "a_c", "tau_c1", "tau_c2")


@dataclass(frozen=True)
class SteeringParams:
    a1: float
    a2: float
    k_dir: float
    tau0: float
    tau1: float
    tau2: float
    tau3: float

    def __post_init__(self):
        if not (self.tau0 < self.tau1 <= self.tau2 < self.tau3):
            raise ValueError("steering windows must satisfy tau0 < tau1 <= tau2 < tau3")
        if not self.a1 >= 0:
            raise ValueError("steering amplitude a1 must be >= 0")
        # a2 keeps its sign: it absorbs the signed second-pulse gain
        if not abs(self.k_dir) * max(abs(self.a1), abs(self.a2)) < math.pi / 2:
            raise ValueError("peak steering |k_dir| * max(a1, |a2|) must be < pi/2")

    def as_array(self) -> np.ndarray:
        return np.array([self.k_dir, self.a1, self.tau0, self.tau1,
                         self.a2, self.tau2, self.tau3], dtype=np.float64)

    def peak(self) -> float:
        return abs(self.k_dir) * max(abs(self.a1), abs(self.a2))


@dataclass(frozen=True)
class ForceParams:
    f_initial: float
    a_c: float
    tau_c1: float
    tau_c2: float

    def __post_init__(self):
        if not self.tau_c1 < self.tau_c2:
            raise ValueError("force window must satisfy tau_c1 < tau_c2")

    def as_array(self) -> np.ndarray:
        return np.array([self.f_initial, self.a_c, self.tau_c1, self.tau_c2],
                        dtype=np.float64)


def uncontrolled(steering: SteeringParams, force: ForceParams):
    """Same windows, zero pulse amplitudes: steer == 0 and F == f_initial."""
    return replace(steering, a1=0.0, a2=0.0), replace(force, a_c=0.0)


@njit(cache=True, nogil=True)
def _window(t, a, b):
    if a <= t and t < b:
        return 1.0
    return 0.0


@njit(cache=True, nogil=True)
def _pulse(t, amp, a, b):
    if a <= t and t < b:
        return amp * math.sin(math.pi * (t - a) / (b - a))
    return 0.0


@njit(cache=True, nogil=True)
def _steering(t, s):
    # + 0.0 turns k_dir * 0.0 == -0.0 into 0.0
    return s[0] * (_pulse(t, s[1], s[2], s[3]) + _pulse(t, s[4], s[5], s[6])) + 0.0


@njit(cache=True, nogil=True)
def _force(t, f):
    return f[0] + _pulse(t, f[1], f[2], f[3])


def window(t: float, a: float, b: float) -> float:
    """``u(t - a) - u(t - b)`` with the unit step ``u(s) = 1`` for ``s >= 0``."""
    if not a < b:
        raise ValueError("window requires a < b")
    return _window(t, a, b)


def steering(t: float, p: SteeringParams) -> float:
    return _steering(t, p.as_array())


def tractive_force(t: float, p: ForceParams) -> float:
    return _force(t, p.as_array())


def cruise_force(vx0: float, params: VehicleParams,
                 model: Model | str = Model.GENERALIZED) -> float:
    """Tractive force holding straight-line motion at ``vx0``.

    At zero steer both models reduce to ``m vx' = 2 F - K_d vx^2``: the friction
    terms vanish with ``cos(0) - 1`` and the tyre terms with ``sin(0)``.
    """
    Model(model)
    if not vx0 >= VX_FLOOR:
        raise VxFloorError(vx0)
    return params.drag_lumped * vx0 * vx0 / 2.0
