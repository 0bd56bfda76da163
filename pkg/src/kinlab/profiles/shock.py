"""Navier-Stokes traveling-wave shock profile for the 3-family.

The once-integrated conservation laws reduce the profile to a planar ODE in
(V, Theta).  In the stretched variable zeta = eta / eps the system is
Knudsen-free, so a single orbit serves every eps; the physical profile is
recovered by eta = eps * zeta with eta = x - s3 * t.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator

from ..gas import GasState, pressure
from ..riemann import WavePattern
from ..transport import default_kappa, default_mu
from .fields import SpaceTimeField, constant_field


class ShockProfileError(RuntimeError):
    """Unstable-manifold integration failed to connect the end states."""


@dataclass
class ShockOrbit:
    """Heteroclinic orbit in the stretched variable, centered at mid volume."""

    zeta: np.ndarray
    V: np.ndarray
    Theta: np.ndarray
    s3: float
    left: GasState    # mid_upper: eta -> -inf
    right: GasState   # eta -> +inf

    def __post_init__(self):
        self._V = PchipInterpolator(self.zeta, self.V, extrapolate=False)
        self._T = PchipInterpolator(self.zeta, self.Theta, extrapolate=False)

    def u1_of_v(self, V):
        return self.left.u1 - self.s3 * (V - self.left.v)

    def sample(self, zeta):
        zeta = np.asarray(zeta, dtype=float)
        V = self._V(zeta)
        T = self._T(zeta)
        V = np.where(zeta < self.zeta[0], self.left.v, V)
        V = np.where(zeta > self.zeta[-1], self.right.v, V)
        T = np.where(zeta < self.zeta[0], self.left.theta, T)
        T = np.where(zeta > self.zeta[-1], self.right.theta, T)
        return V, T


def _profile_rhs_factory(left: GasState, s3: float, mu, kappa):
    """Right-hand side of (V, Theta)' in zeta from the first integrals."""
    p_l, u_l, E_l = left.p, left.u1, left.E

    def rhs(_z, y):
        V, T = y
        U1 = u_l - s3 * (V - left.v)
        P = 2.0 * T / (3.0 * V)
        F1 = s3**2 * (V - left.v) + P - p_l
        E = T + 0.5 * U1**2
        G2 = -s3 * (E - E_l) + P * U1 - p_l * u_l - U1 * F1
        dV = -V * F1 / ((4.0 / 3.0) * mu(T) * s3)
        dT = V * G2 / kappa(T)
        return [dV, dT]

    return rhs


def _jacobian_fd(rhs, y, h=1e-8):
    f0 = np.asarray(rhs(0.0, y))
    J = np.empty((2, 2))
    for j in range(2):
        yp = list(y)
        yp[j] += h
        J[:, j] = (np.asarray(rhs(0.0, yp)) - f0) / h
    return J


def solve_shock_orbit(pattern: WavePattern, mu=default_mu, kappa=default_kappa,
                      seed_displacement: float = 1e-6) -> ShockOrbit:
    """Integrate the unstable manifold of the mid_upper rest point to the right state."""
    left, right, s3 = pattern.mid_upper, pattern.right, pattern.s3
    delta = pattern.strengths[2]
    if delta <= 0.0:
        raise ShockProfileError("pattern has zero shock strength")
    rhs = _profile_rhs_factory(left, s3, mu, kappa)

    J = _jacobian_fd(rhs, [left.v, left.theta])
    eigvals, eigvecs = np.linalg.eig(J)
    unstable = np.where(eigvals.real > 0.0)[0]
    if len(unstable) == 0:
        raise ShockProfileError("mid_upper end has no unstable direction")
    k = unstable[np.argmax(eigvals.real[unstable])]
    direction = eigvecs[:, k].real
    direction /= np.linalg.norm(direction)
    if direction[0] * (right.v - left.v) < 0.0:
        direction = -direction
    y0 = np.array([left.v, left.theta]) + seed_displacement * delta * direction

    # admissible box with cushions; leaving it means the orbit missed the saddle
    v_lo, v_hi = sorted((left.v, right.v))
    t_lo, t_hi = sorted((left.theta, right.theta))
    box = (v_lo - 0.5 * delta, v_hi + 0.5 * delta, t_lo - 0.5 * delta, t_hi + 0.5 * delta)

    def near_right(_z, y):
        return abs(y[0] - right.v) + abs(y[1] - right.theta) - 1e-11 * max(1.0, delta)

    near_right.terminal = True

    def out_of_box(_z, y):
        inside = (box[0] < y[0] < box[1]) and (box[2] < y[1] < box[3])
        return 1.0 if inside else -1.0

    out_of_box.terminal = True

    span = 600.0 / max(delta, 1e-3)
    fwd = solve_ivp(rhs, (0.0, span), y0, rtol=1e-11, atol=1e-13,
                    events=[near_right, out_of_box], dense_output=False, max_step=span / 400)
    end_err = abs(fwd.y[0, -1] - right.v) + abs(fwd.y[1, -1] - right.theta)
    if end_err > 1e-9 * max(1.0, delta):
        raise ShockProfileError(f"orbit terminus misses the right state by {end_err}")

    # left tail from the saddle linearization: state = X_- + d exp(lam_u zeta) dir
    lam_u = eigvals.real[k]
    z_tail = np.linspace(-40.0 / lam_u, 0.0, 200, endpoint=False)
    amp = seed_displacement * delta * np.exp(lam_u * z_tail)
    zeta = np.concatenate([z_tail, fwd.t])
    V = np.concatenate([left.v + amp * direction[0], fwd.y[0]])
    Theta = np.concatenate([left.theta + amp * direction[1], fwd.y[1]])
    keep = np.concatenate([[True], np.diff(zeta) > 0])
    zeta, V, Theta = zeta[keep], V[keep], Theta[keep]

    # recenter: V equals the endpoint average at zeta = 0
    v_mid = 0.5 * (left.v + right.v)
    order = np.argsort(V)
    z_mid = float(np.interp(v_mid, V[order], zeta[order]))
    zeta = zeta - z_mid
    return ShockOrbit(zeta=zeta, V=V, Theta=Theta, s3=s3, left=left, right=right)


def build_shock_profile(pattern: WavePattern, eps: float, x_grid,
                        mu=default_mu, kappa=default_kappa, times=(0.0,),
                        orbit: ShockOrbit | None = None) -> SpaceTimeField:
    """Shock component on x_grid at the requested times; eta = x - s3 t."""
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    x_grid = np.asarray(x_grid, dtype=float)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if pattern.strengths[2] == 0.0:
        return constant_field(x_grid, times, pattern.right)
    if orbit is None:
        orbit = solve_shock_orbit(pattern, mu=mu, kappa=kappa)
    rhs = _profile_rhs_factory(orbit.left, orbit.s3, mu, kappa)

    shape = (len(times), len(x_grid))
    vals = {k: np.zeros(shape) for k in ("V", "U1", "U2", "U3", "Theta", "E")}
    dvals = {k: np.zeros(shape) for k in ("V", "U1", "U2", "U3", "Theta", "E")}
    for i, t in enumerate(times):
        zeta = (x_grid - orbit.s3 * t) / eps
        V, T = orbit.sample(zeta)
        U1 = orbit.u1_of_v(V)
        dV, dT = rhs(0.0, [V, T])
        inside = (zeta >= orbit.zeta[0]) & (zeta <= orbit.zeta[-1])
        V_x = np.where(inside, dV / eps, 0.0)
        T_x = np.where(inside, dT / eps, 0.0)
        U1_x = -orbit.s3 * V_x
        vals["V"][i], vals["U1"][i], vals["Theta"][i] = V, U1, T
        vals["E"][i] = T + 0.5 * U1**2
        dvals["V"][i], dvals["U1"][i], dvals["Theta"][i] = V_x, U1_x, T_x
        dvals["E"][i] = T_x + U1 * U1_x
    f = SpaceTimeField(x_grid=x_grid, t_grid=times, values=vals, dvalues=dvals)
    f.fill_derivatives()
    return f
