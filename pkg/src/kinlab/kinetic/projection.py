"""Macro-micro decomposition utilities and the equilibrium-distance diagnostic."""

from __future__ import annotations

import numpy as np

from ..gas import GasState, R_GAS
from .solver import MacroFields, ReducedKineticState
from .velocity import VelocityGrid, reduced_maxwellian


def micro_distance(state: ReducedKineticState, reference: MacroFields,
                   star: GasState) -> np.ndarray:
    """Weighted L2 distance of (g, h) to the reduced Maxwellian of `reference`.

    d(x)^2 = int [ (g - g_ref)^2 + (h - h_ref)^2 / (2 R theta_star)^2 ] / g_star d xi,
    the reduced surrogate of the Maxwellian-weighted velocity-space norm with
    the global weight built from `star`.
    """
    vg = state.vgrid
    g_ref, h_ref = reduced_maxwellian(reference.rho, reference.u1, reference.theta, vg)
    g_star, _ = reduced_maxwellian(1.0 / star.v, star.u1, star.theta, vg)
    guard = g_star > 1e-300
    w = np.where(guard, 1.0 / np.where(guard, g_star, 1.0), 0.0)
    scale = (2.0 * R_GAS * star.theta) ** 2
    quad = (state.g - g_ref) ** 2 * w + (state.h - h_ref) ** 2 * w / scale
    return np.sqrt(vg.integrate(quad))


def micro_part_norm(state: ReducedKineticState, star: GasState) -> np.ndarray:
    """Distance of the state to the Maxwellian of its own moments."""
    from .solver import moments

    return micro_distance(state, moments(state), star)


class VelocityQuadrature3D:
    """Tensor-product trapezoidal rule over the full velocity space."""

    def __init__(self, state: GasState, n_xi: int = 48, span: float = 8.0):
        half = span * np.sqrt(R_GAS * state.theta)
        axes = []
        for u in (state.u1, state.u2, state.u3):
            axes.append(VelocityGrid(u - half, u + half, n_xi))
        self.axes = axes
        self.XI = np.meshgrid(*(a.nodes for a in axes), indexing="ij")
        w1, w2, w3 = (a.weights for a in axes)
        self.W = w1[:, None, None] * w2[None, :, None] * w3[None, None, :]

    def integrate(self, values: np.ndarray) -> float:
        return float(np.sum(values * self.W))


def maxwellian_3d(state: GasState, XI):
    rt = R_GAS * state.theta
    rho = 1.0 / state.v
    q = ((XI[0] - state.u1) ** 2 + (XI[1] - state.u2) ** 2 + (XI[2] - state.u3) ** 2)
    return rho / np.sqrt((2.0 * np.pi * rt) ** 3) * np.exp(-q / (2.0 * rt))


def projection_basis(state: GasState, quad: VelocityQuadrature3D):
    """Orthonormal five-vector basis chi_0..chi_4 of the local Maxwellian."""
    XI = quad.XI
    M = maxwellian_3d(state, XI)
    rho = 1.0 / state.v
    rt = R_GAS * state.theta
    u = (state.u1, state.u2, state.u3)
    chis = [M / np.sqrt(rho)]
    for i in range(3):
        chis.append((XI[i] - u[i]) / np.sqrt(rt * rho) * M)
    q = sum((XI[i] - u[i]) ** 2 for i in range(3))
    chis.append((q / rt - 3.0) * M / np.sqrt(6.0 * rho))
    return np.stack(chis), M


def macro_micro_project(f_samples, state: GasState, n_xi: int = 48, span: float = 8.0):
    """Split a velocity distribution into Maxwellian-space and microscopic parts.

    f_samples is a callable of the three velocity-component arrays.  Returns
    (P0f, P1f, quad) sampled on the tensor quadrature grid.
    """
    quad = VelocityQuadrature3D(state, n_xi=n_xi, span=span)
    chis, M = projection_basis(state, quad)
    f = f_samples(*quad.XI)
    coeffs = [quad.integrate(f * chi / M) for chi in chis]
    P0 = sum(c * chi for c, chi in zip(coeffs, chis))
    return P0, f - P0, quad


def gram_matrix(state: GasState, n_xi: int = 48, span: float = 8.0) -> np.ndarray:
    """<chi_i, chi_j> under the 1/M inner product; identity for an exact rule."""
    quad = VelocityQuadrature3D(state, n_xi=n_xi, span=span)
    chis, M = projection_basis(state, quad)
    G = np.empty((5, 5))
    for i in range(5):
        for j in range(5):
            G[i, j] = quad.integrate(chis[i] * chis[j] / M)
    return G


def collision_invariant_moments(values: np.ndarray, quad: VelocityQuadrature3D
                                ) -> np.ndarray:
    """Moments against (1, xi_1, xi_2, xi_3, |xi|^2 / 2)."""
    XI = quad.XI
    phis = [np.ones_like(XI[0]), XI[0], XI[1], XI[2],
            0.5 * (XI[0] ** 2 + XI[1] ** 2 + XI[2] ** 2)]
    return np.array([quad.integrate(values * phi) for phi in phis])
