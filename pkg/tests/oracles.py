"""Independent reference computations used by the tests.

Nothing here imports from the package: the model equations are transcribed
term by term in plain Python, the reference model is assembled from tyre
forces, the control laws use the frequency/phase form with explicit unit
steps, and RK4 is a textbook loop.
"""
import math

import numpy as np

TABLE1 = dict(m=1750.0, Iz=2350.0, lf=1.2, lr=1.6, Caf=12e4, Car=12e4,
              mu0=0.015, mu1=7e-6, g=9.8, Kd=0.98)


def generalized_terms(vx, vy, wz, psi, d, F, p=TABLE1):
    """(vx', vy', wz', X', Y', psi') of the generalized model, one term per line."""
    m, Iz, lf, lr = p["m"], p["Iz"], p["lf"], p["lr"]
    Caf, Car, g = p["Caf"], p["Car"], p["g"]
    mu = p["mu0"] + p["mu1"] * vx ** 2
    dvx = 0.0
    dvx += F / m * (math.cos(d) + 1)
    dvx -= 2 * Caf / m * d * math.sin(d)
    dvx += 2 * Caf / m * vy / vx * math.sin(d)
    dvx += 2 * Caf / m * lf * wz / vx * math.sin(d)
    dvx -= mu * g * (math.cos(d) - 1)
    dvx -= p["Kd"] / m * vx ** 2
    dvx += wz * vy
    dvy = 0.0
    dvy += F / m * math.sin(d)
    dvy += 2 * Caf / m * d * math.cos(d)
    dvy -= 1 / m * 2 * Caf * math.cos(d) * vy / vx
    dvy -= 1 / m * 2 * Car * vy / vx
    dvy -= 1 / m * 2 * Caf * lf * math.cos(d) * wz / vx
    dvy += 1 / m * 2 * Car * lr * wz / vx
    dvy -= mu * g * math.sin(d)
    dvy -= wz * vx
    dwz = 0.0
    dwz += lf / Iz * 2 * Caf * d * math.cos(d)
    dwz -= 1 / Iz * (2 * Caf * lf * math.cos(d) - 2 * Car * lr) * vy / vx
    dwz -= 1 / Iz * (2 * Caf * lf ** 2 * math.cos(d) + 2 * Car * lr ** 2) * wz / vx
    dwz += lf / Iz * F * math.sin(d)
    dwz -= mu * m * g * lf / Iz * math.sin(d)
    X = vx * math.cos(psi) - vy * math.sin(psi)
    Y = vx * math.sin(psi) + vy * math.cos(psi)
    return np.array([dvx, dvy, dwz, X, Y, wz])


def reference_forces(vx, vy, wz, psi, d, F, p=TABLE1):
    """Reference model from linear tyre forces and Newton-Euler in the body frame."""
    m, Iz, lf, lr = p["m"], p["Iz"], p["lf"], p["lr"]
    Fyf = 2 * p["Caf"] * (d - (vy + lf * wz) / vx)
    Fyr = -2 * p["Car"] * (vy - lr * wz) / vx
    dvx = (F * (1 + math.cos(d)) - Fyf * math.sin(d) - p["Kd"] * vx ** 2) / m + wz * vy
    dvy = (Fyf * math.cos(d) + Fyr + F * math.sin(d)) / m - wz * vx
    dwz = (lf * (Fyf * math.cos(d) + F * math.sin(d)) - lr * Fyr) / Iz
    X = vx * math.cos(psi) - vy * math.sin(psi)
    Y = vx * math.sin(psi) + vy * math.cos(psi)
    return np.array([dvx, dvy, dwz, X, Y, wz])


def unit_step(s):
    return 1.0 if s >= 0 else 0.0


def pulse_phase_form(t, A, t_start, t_end):
    """A sin(w t - phi) [u(t - t_start) - u(t - t_end)], T = 2 (t_end - t_start)."""
    T = 2 * (t_end - t_start)
    w = 2 * math.pi / T
    phi = 2 * math.pi / T * t_start
    return A * math.sin(w * t - phi) * (unit_step(t - t_start) - unit_step(t - t_end))


def steering_phase_form(t, a1, a2, k_dir, tau0, tau1, tau2, tau3):
    return k_dir * (pulse_phase_form(t, a1, tau0, tau1) + pulse_phase_form(t, a2, tau2, tau3))


def force_phase_form(t, f_i, a_c, tc1, tc2):
    return f_i + pulse_phase_form(t, a_c, tc1, tc2)


def rk4_loop(f, y0, dt, n):
    """Classical RK4 for y' = f(t, y), n steps from t = 0."""
    y = np.array(y0, dtype=float)
    for k in range(n):
        t = k * dt
        k1 = f(t, y)
        k2 = f(t + dt / 2, y + dt / 2 * k1)
        k3 = f(t + dt / 2, y + dt / 2 * k2)
        k4 = f(t + dt, y + dt * k3)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y
