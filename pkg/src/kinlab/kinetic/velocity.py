"""Discrete velocity grid and Chu-reduced Maxwellians."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..gas import R_GAS


class QuadratureValidationError(RuntimeError):
    """Velocity grid fails to integrate Maxwellian moments accurately."""


def gaussian_moments(rho, u, rtheta, k_max=4):
    """Closed-form moments int xi^k rho N(u, rtheta) d xi for k = 0..k_max."""
    c2 = rtheta
    out = [rho,
           rho * u,
           rho * (u**2 + c2),
           rho * (u**3 + 3 * u * c2),
           rho * (u**4 + 6 * u**2 * c2 + 3 * c2**2)]
    return out[: k_max + 1]


@dataclass
class VelocityGrid:
    """Uniform xi_1 grid with trapezoidal weights."""

    xi_min: float
    xi_max: float
    n_xi: int = 128
    nodes: np.ndarray = field(init=False)
    weights: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.xi_max <= self.xi_min:
            raise ValueError("need xi_max > xi_min")
        self.nodes = np.linspace(self.xi_min, self.xi_max, self.n_xi)
        d = self.nodes[1] - self.nodes[0]
        w = np.full(self.n_xi, d)
        w[0] = w[-1] = 0.5 * d
        self.weights = w

    @classmethod
    def for_states(cls, states, n_xi: int = 128, span: float = 8.0,
                   validate: bool = True) -> "VelocityGrid":
        """Grid covering u1 +- span * sqrt(R theta) over the given gas states."""
        u_lo = min(s.u1 for s in states)
        u_hi = max(s.u1 for s in states)
        th = max(s.theta for s in states)
        half = span * np.sqrt(R_GAS * th)
        grid = cls(xi_min=u_lo - half, xi_max=u_hi + half, n_xi=n_xi)
        if validate:
            grid.validate_against(states)
        return grid

    def integrate(self, f: np.ndarray) -> np.ndarray:
        """Integral over xi_1; f may carry leading axes."""
        return f @ self.weights

    def validate_against(self, states, tol: float = 1e-8):
        """Check Maxwellian moments of degree <= 4 against closed forms."""
        for s in states:
            g, _ = reduced_maxwellian(1.0 / s.v, s.u1, s.theta, self)
            exact = gaussian_moments(1.0 / s.v, s.u1, R_GAS * s.theta)
            for k, ref in enumerate(exact):
                got = self.integrate(self.nodes**k * g)
                scale = max(abs(ref), (R_GAS * s.theta) ** (k / 2) / s.v)
                if abs(got - ref) > tol * scale:
                    raise QuadratureValidationError(
                        f"moment {k} off by {abs(got - ref)} at state {s}"
                    )
        return self


def reduced_maxwellian(rho, u1, theta, vgrid: VelocityGrid):
    """Chu-reduced pair (g_M, h_M) of the drifting Maxwellian.

    g_M integrates the 3-D Maxwellian over the transverse velocities;
    h_M carries the transverse energy, exactly 2 R theta g_M.
    """
    rho = np.asarray(rho, dtype=float)
    u1 = np.asarray(u1, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any(rho <= 0.0) or np.any(theta <= 0.0):
        raise ValueError("reduced_maxwellian needs rho > 0 and theta > 0")
    rt = R_GAS * theta
    xi = vgrid.nodes
    if rho.ndim > 0:
        xi = xi[None, :]
        rho, u1, rt = rho[:, None], u1[:, None], rt[:, None]
    g = rho / np.sqrt(2.0 * np.pi * rt) * np.exp(-((xi - u1) ** 2) / (2.0 * rt))
    h = 2.0 * rt * g
    return g, h
