"""Smoothed approximate rarefaction profile driven by the Burgers equation.

The fan is generated by the exact smooth solution of the inviscid Burgers
equation with tanh-mollified Riemann data of width sigma; the gas profile
follows by inverting lambda_1 along the isentrope of the left state.
"""

from __future__ import annotations

import numpy as np

from ..gas import GasState, theta_on_isentrope
from ..riemann import WavePattern, isentrope_u1
from .fields import SpaceTimeField, constant_field, d_dx


def _w_sigma(x0, w_minus, w_plus, sigma):
    return 0.5 * (w_plus + w_minus) + 0.5 * (w_plus - w_minus) * np.tanh(x0 / sigma)


def _w_sigma_prime(x0, w_minus, w_plus, sigma):
    return 0.5 * (w_plus - w_minus) / (sigma * np.cosh(x0 / sigma) ** 2)


def burgers_smooth(w_minus: float, w_plus: float, sigma: float, t: float, x):
    """Exact smooth Burgers solution with tanh data of width sigma.

    Solves w = w_sigma(x0), x = x0 + w_sigma(x0) * t by monotone Newton
    iteration (characteristics of increasing data never cross).  Returns
    (w, w_x) with the x-derivative computed analytically.
    """
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    if w_minus > w_plus:
        raise ValueError("rarefaction data need w_minus <= w_plus")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if w_minus == w_plus:
        w = np.full_like(x, w_minus)
        wx = np.zeros_like(x)
        return (float(w[0]), float(wx[0])) if scalar else (w, wx)

    x0 = x - 0.5 * (w_plus + w_minus) * t
    lo = x - w_plus * t - sigma
    hi = x - w_minus * t + sigma
    for _ in range(100):
        w = _w_sigma(x0, w_minus, w_plus, sigma)
        f = x0 + w * t - x
        fp = 1.0 + _w_sigma_prime(x0, w_minus, w_plus, sigma) * t
        step = f / fp
        x0_new = np.clip(x0 - step, lo, hi)
        if np.max(np.abs(x0_new - x0)) < 1e-14 * (1.0 + np.max(np.abs(x0))):
            x0 = x0_new
            break
        x0 = x0_new
    w = _w_sigma(x0, w_minus, w_plus, sigma)
    wp = _w_sigma_prime(x0, w_minus, w_plus, sigma)
    wx = wp / (1.0 + wp * t)
    return (float(w[0]), float(wx[0])) if scalar else (w, wx)


def rarefaction_arrays(pattern: WavePattern, sigma: float, t: float, x_grid):
    """Profile arrays (V, U1, Theta, E) and analytic x-derivatives at time t."""
    left = pattern.left
    w_minus, w_plus = pattern.fan_left, pattern.fan_right
    w, wx = burgers_smooth(w_minus, w_plus, sigma, t, x_grid)
    # invert lambda_1(V, s_-) = w on the isentrope of the left state
    coef = np.sqrt(10.0 * left.theta) * left.v ** (1.0 / 3.0) / 3.0
    V = (coef / (-w)) ** 0.75
    Theta = theta_on_isentrope(V, left.s)
    U1 = isentrope_u1(left, V)
    # chain rule: dlambda_1/dV = -(4/3) lambda_1 / V, dU1/dV = -lambda_1, dTheta/dV = -(2/3) Theta/V
    V_x = wx * V / (-(4.0 / 3.0) * w)
    U1_x = -w * V_x
    Theta_x = -(2.0 / 3.0) * Theta / V * V_x
    E = Theta + 0.5 * U1**2
    E_x = Theta_x + U1 * U1_x
    vals = {"V": V, "U1": U1, "U2": np.zeros_like(V), "U3": np.zeros_like(V),
            "Theta": Theta, "E": E}
    dvals = {"V": V_x, "U1": U1_x, "U2": np.zeros_like(V), "U3": np.zeros_like(V),
             "Theta": Theta_x, "E": E_x}
    return vals, dvals


def build_rarefaction_profile(pattern: WavePattern, sigma: float, times, x_grid) -> SpaceTimeField:
    """Smoothed rarefaction component on x_grid at the requested times."""
    x_grid = np.asarray(x_grid, dtype=float)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if pattern.strengths[0] == 0.0:
        return constant_field(x_grid, times, pattern.left)
    vals = {k: np.empty((len(times), len(x_grid))) for k in
            ("V", "U1", "U2", "U3", "Theta", "E")}
    dvals = {k: np.empty_like(v) for k, v in vals.items()}
    for i, t in enumerate(times):
        vt, dt_ = rarefaction_arrays(pattern, sigma, float(t), x_grid)
        for k in vals:
            vals[k][i] = vt[k]
            dvals[k][i] = dt_[k]
    f = SpaceTimeField(x_grid=x_grid, t_grid=times, values=vals, dvalues=dvals)
    f.fill_derivatives()
    return f
