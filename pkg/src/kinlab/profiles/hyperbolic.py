"""Linear hyperbolic correction waves on moving wave-pattern backgrounds.

Wave I carries the viscous error of the smoothed rarefaction: its diagonal
variables solve a 3-system with mixed data (zero at t = h for the 1-family,
zero at t = T for the others).  Wave II removes the non-conservative error
of the viscous contact wave: a 5-system solved entirely backward from zero
terminal data.  Both are advected by semi-Lagrangian characteristic tracing
with monotone cubic interpolation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from ..transport import default_kappa, default_mu
from .fields import SpaceTimeField, d_dx
from .rarefaction import rarefaction_arrays


class CflViolation(RuntimeError):
    """Requested time step exceeds dx / max|lambda|."""


@dataclass
class HyperbolicWaveField:
    """Correction components over (t, x) plus the diagonal variables."""

    x_grid: np.ndarray
    t_grid: np.ndarray
    names: tuple
    d_or_b: np.ndarray        # (n_comp, n_t, n_x) physical components
    diag: np.ndarray          # (n_comp, n_t, n_x) diagonal variables
    right_field: np.ndarray   # (n_t, n_x, n_comp, n_comp) eigenvector field
    extras: dict = field(default_factory=dict)

    def at_time(self, t: float) -> np.ndarray:
        i = int(np.argmin(np.abs(self.t_grid - t)))
        if abs(self.t_grid[i] - t) > 1e-9 * max(1.0, abs(t)):
            raise KeyError(f"time {t} not stored")
        return self.d_or_b[:, i, :]

    def component(self, name: str) -> np.ndarray:
        return self.d_or_b[self.names.index(name)]

    def l2_norms(self) -> np.ndarray:
        """sqrt(int |w|^2 dx) of the physical vector at each stored time."""
        dx = float(self.x_grid[1] - self.x_grid[0])
        return np.sqrt(np.sum(self.d_or_b**2, axis=(0, 2)) * dx)


def _pressure_partial_fields(V, U1, E, U2=None, U3=None):
    P = 2.0 * np.asarray(E) / (3.0 * V)
    if U2 is None:
        usq = U1**2
    else:
        usq = U1**2 + U2**2 + U3**2
    P = (2.0 * E - usq) / (3.0 * V)
    return P, -P / V, -2.0 * U1 / (3.0 * V), 2.0 / (3.0 * V)


def eigen_fields_3(V, U1, Theta):
    """Batched (lambdas, L, R) of the slab 3x3 Jacobian over field arrays."""
    E = Theta + 0.5 * U1**2
    P, P_v, P_u1, P_E = _pressure_partial_fields(V, U1, E)
    c = np.sqrt(10.0 * Theta) / (3.0 * V)
    lam = np.stack([-c, np.zeros_like(c), c], axis=-1)          # (..., 3)
    ones = np.ones_like(c)
    cols = []
    for j in range(3):
        lj = lam[..., j]
        r = np.stack([ones, -lj, (-lj**2 - P_v + P_u1 * lj) / P_E], axis=-1)
        r = r / np.linalg.norm(r, axis=-1, keepdims=True)
        cols.append(r)
    R = np.stack(cols, axis=-1)                                  # (..., 3, 3)
    L = np.linalg.inv(R)
    return lam, L, R


def eigen_fields_5(V, U1, U2, U3, E):
    """Batched (lambdas, L, R) of the 5x5 Jacobian with the pinned 0-family lefts."""
    P, P_v, P_u1, P_E = _pressure_partial_fields(V, U1, E, U2, U3)
    P_u2 = -2.0 * U2 / (3.0 * V)
    P_u3 = -2.0 * U3 / (3.0 * V)
    Theta = E - 0.5 * (U1**2 + U2**2 + U3**2)
    c = np.sqrt(10.0 * Theta) / (3.0 * V)
    zeros = np.zeros_like(c)
    ones = np.ones_like(c)
    lam = np.stack([-c, zeros, zeros, zeros, c], axis=-1)

    def acoustic(lj):
        r = np.stack([ones, -lj, zeros, zeros, (-lj**2 - P_v + P_u1 * lj) / P_E], axis=-1)
        return r / np.linalg.norm(r, axis=-1, keepdims=True)

    n1 = np.stack([ones, zeros, zeros, zeros, -P_v / P_E], axis=-1)
    n2 = np.stack([zeros, zeros, ones, zeros, -P_u2 / P_E], axis=-1)
    n3 = np.stack([zeros, zeros, zeros, ones, -P_u3 / P_E], axis=-1)
    N = np.stack([n1, n2, n3], axis=-1)                          # (..., 5, 3)
    l21 = np.stack([P, -U1, zeros, zeros, ones], axis=-1)
    l22 = np.stack([zeros, zeros, ones, zeros, zeros], axis=-1)
    l23 = np.stack([zeros, zeros, zeros, ones, zeros], axis=-1)
    L2 = np.stack([l21, l22, l23], axis=-2)                      # (..., 3, 5)
    M = L2 @ N                                                   # (..., 3, 3)
    R_null = N @ np.linalg.inv(M)                                # (..., 5, 3)
    R = np.concatenate(
        [acoustic(-c)[..., None], R_null, acoustic(c)[..., None]], axis=-1
    )
    L = np.linalg.inv(R)
    return lam, L, R


def _interp_to(x_grid, values, x_query):
    f = PchipInterpolator(x_grid, values, extrapolate=False)
    out = f(np.clip(x_query, x_grid[0], x_grid[-1]))
    return out


class _CharacteristicSystem:
    """Diagonal system B_t + (Lambda B)_x = S + C B on precomputed level data."""

    def __init__(self, x_grid, t_nodes, lam, dlam_dx, sources, coupling):
        self.x = np.asarray(x_grid, dtype=float)
        self.t = np.asarray(t_nodes, dtype=float)
        self.lam = lam                # (n_t, n_c, n_x)
        self.dlam = dlam_dx           # (n_t, n_c, n_x)
        self.S = sources              # (n_t, n_c, n_x)
        self.C = coupling             # (n_t, n_c, n_c, n_x)
        self.n_c = lam.shape[1]
        dt = np.max(np.abs(np.diff(self.t)))
        max_lam = np.max(np.abs(lam))
        dx = self.x[1] - self.x[0]
        if max_lam > 0 and dt > dx / max_lam * (1.0 + 1e-12):
            raise CflViolation(f"dt = {dt} exceeds dx/max|lambda| = {dx / max_lam}")

    def _rhs(self, level, B, comps):
        out = np.empty((len(comps), len(self.x)))
        for i, ci in enumerate(comps):
            acc = self.S[level, ci].copy()
            for j, cj in enumerate(comps):
                acc += self.C[level, ci, cj] * B[j]
            acc -= self.dlam[level, ci] * B[i]
            out[i] = acc
        return out

    def _sweep(self, comps, levels, sign):
        """March over consecutive level pairs; sign=-1 backward, +1 forward."""
        n_t = len(self.t)
        B = np.zeros((len(comps), n_t, len(self.x)))
        for idx in levels:
            src_level = idx - sign  # level where data are known
            dt = abs(self.t[idx] - self.t[src_level])
            B_known = B[:, src_level, :]
            rhs_known = self._rhs(src_level, B_known, comps)
            # trace to the known level: foot = x + lam * (t_known - t_new)
            tau = self.t[src_level] - self.t[idx]
            dt_signed = -tau
            tails = np.empty_like(B_known)
            feet = []
            for i, ci in enumerate(comps):
                lam_avg = 0.5 * (self.lam[idx, ci] + self.lam[src_level, ci])
                foot = self.x + lam_avg * tau
                feet.append(foot)
                tails[i] = _interp_to(self.x, B_known[i], foot)
            rhs_tail = np.empty_like(tails)
            for i in range(len(comps)):
                rhs_tail[i] = _interp_to(self.x, rhs_known[i], feet[i])
            # Heun along the characteristic
            B_pred = tails + dt_signed * rhs_tail
            rhs_new = self._rhs(idx, B_pred, comps)
            B[:, idx, :] = tails + 0.5 * dt_signed * (rhs_tail + rhs_new)
        return B

    def solve_backward(self, comps):
        """Zero terminal data at the last level, marching to the first."""
        return self._sweep(comps, range(len(self.t) - 2, -1, -1), sign=-1)

    def solve_forward(self, comps, extra_source=None):
        """Zero initial data at the first level, marching to the last."""
        if extra_source is not None:
            self.S = self.S + extra_source
        return self._sweep(comps, range(1, len(self.t)), sign=+1)


def _check_span(t_nodes, h, T):
    t_nodes = np.asarray(t_nodes, dtype=float)
    if abs(t_nodes[0] - h) > 1e-12 or abs(t_nodes[-1] - T) > 1e-12:
        raise ValueError("t_nodes must span exactly [h, T]")
    return t_nodes


def build_hyperbolic_wave_I(rar: SpaceTimeField, eps: float, sigma: float,
                            h: float, T: float, mu=default_mu, kappa=default_kappa
                            ) -> HyperbolicWaveField:
    """Correction wave carrying the viscous error of the rarefaction profile.

    Solves the diagonalized 3-system on the rarefaction background: the
    0- and 3-families integrate backward from zero data at T, the 1-family
    forward from zero data at h.  Requires rar sampled with dx <= sigma/10.
    """
    x = rar.x_grid
    t_nodes = _check_span(rar.t_grid, h, T)
    dx = rar.dx
    if dx > sigma / 10.0 * (1.0 + 1e-9):
        raise ValueError(f"dx = {dx} too coarse for sigma = {sigma}; need dx <= sigma/10")
    n_t, n_x = len(t_nodes), len(x)

    V, U1, Theta = rar.values["V"], rar.values["U1"], rar.values["Theta"]
    V_x, U1_x, Theta_x = rar.dvalues["V"], rar.dvalues["U1"], rar.dvalues["Theta"]

    lam_e, L, R = eigen_fields_3(V, U1, Theta)       # (n_t, n_x, 3[, 3])
    lam1 = lam_e[..., 0]
    lam1_x = -(4.0 / 3.0) * lam1 * V_x / V           # chain rule on the isentrope
    lam = np.stack([lam1, np.zeros_like(lam1), -lam1], axis=1)          # (n_t, 3, n_x)
    dlam = np.stack([lam1_x, np.zeros_like(lam1_x), -lam1_x], axis=1)

    # viscous sources of the Navier-Stokes system on the rarefaction background
    flux_mom = mu(Theta) * U1_x / V
    flux_heat = kappa(Theta) * Theta_x / V
    flux_work = mu(Theta) * U1 * U1_x / V
    H1 = (4.0 / 3.0) * eps * d_dx(flux_mom, dx)
    H2 = eps * d_dx(flux_heat, dx) + (4.0 / 3.0) * eps * d_dx(flux_work, dx)
    Hvec = np.stack([np.zeros_like(H1), H1, H2], axis=-1)               # (n_t, n_x, 3)
    S_diag = np.einsum("txij,txj->txi", L, Hvec).transpose(0, 2, 1)     # (n_t, 3, n_x)

    # coupling L_x R (Lambda - lam1 I); the 1-family column drops out exactly
    L_x = d_dx(L.transpose(0, 2, 3, 1), dx).transpose(0, 3, 1, 2)
    shift = lam_e - lam_e[..., :1]
    D_shift = shift[..., None, :] * np.eye(3)
    C = (L_x @ R @ D_shift).transpose(0, 2, 3, 1)                       # (n_t, 3, 3, n_x)

    sys = _CharacteristicSystem(x, t_nodes, lam, dlam, S_diag, C)
    D23 = sys.solve_backward([1, 2])
    extra = np.zeros_like(S_diag)
    extra[:, 0, :] = np.einsum("tx,tx->tx", C[:, 0, 1, :], D23[0]) + np.einsum(
        "tx,tx->tx", C[:, 0, 2, :], D23[1]
    )
    D1 = sys.solve_forward([0], extra_source=extra)

    D = np.concatenate([D1, D23], axis=0)                               # (3, n_t, n_x)
    d_phys = np.einsum("txij,jtx->itx", R, D)
    return HyperbolicWaveField(
        x_grid=x, t_grid=t_nodes, names=("d1", "d2", "d3"),
        d_or_b=d_phys, diag=D, right_field=R,
        extras={"lam": lam, "sources": Hvec},
    )


def gaussian_contact_source(pattern, eps: float, c_tail: float, amplitude: float = 1.0):
    """Model source provider with the contact-error Gaussian envelope.

    Each of the four non-mass components gets
    amplitude * delta_CD * eps * (1+t)^-2 * exp(-c x^2 / (eps (1+t))),
    entering the 5-system right-hand side with a minus sign.
    """
    delta_cd = pattern.strengths[1]

    def provider(t, x):
        env = amplitude * delta_cd * eps * (1.0 + t) ** -2 * np.exp(
            -c_tail * x**2 / (eps * (1.0 + t))
        )
        zero = np.zeros_like(env)
        return np.stack([zero, -env, -env, -env, -env])

    return provider


def build_hyperbolic_wave_II(composite_bar: SpaceTimeField, sources,
                             h: float, T: float) -> HyperbolicWaveField:
    """Correction wave removing the contact-error sources on the composite background.

    All five diagonal variables integrate backward in time from identically
    zero terminal data at t = T; `sources` maps (t, x_grid) to the 5-vector
    right-hand side (first component zero, then -Q_i).
    """
    x = composite_bar.x_grid
    t_nodes = _check_span(composite_bar.t_grid, h, T)
    dx = composite_bar.dx
    n_t, n_x = len(t_nodes), len(x)

    Vb = composite_bar.values["V"]
    U1b = composite_bar.values["U1"]
    U2b = composite_bar.values["U2"]
    U3b = composite_bar.values["U3"]
    Eb = composite_bar.values["E"]
    lam_e, L, R = eigen_fields_5(Vb, U1b, U2b, U3b, Eb)

    lam = lam_e.transpose(0, 2, 1)                                      # (n_t, 5, n_x)
    dlam = d_dx(lam, dx)

    Svec = np.empty((n_t, n_x, 5))
    for i, t in enumerate(t_nodes):
        Svec[i] = sources(float(t), x).T
    S_diag = np.einsum("txij,txj->txi", L, Svec).transpose(0, 2, 1)

    L_x = d_dx(L.transpose(0, 2, 3, 1), dx).transpose(0, 3, 1, 2)
    L_t = np.gradient(L, t_nodes, axis=0, edge_order=2)
    Lam_mat = lam_e[..., None, :] * np.eye(5)
    C = (L_t @ R + L_x @ R @ Lam_mat).transpose(0, 2, 3, 1)

    sys = _CharacteristicSystem(x, t_nodes, lam, dlam, S_diag, C)
    B = sys.solve_backward([0, 1, 2, 3, 4])
    if np.any(B[:, -1, :] != 0.0):
        raise AssertionError("terminal data of wave II must vanish identically")
    b_phys = np.einsum("txij,jtx->itx", R, B)
    return HyperbolicWaveField(
        x_grid=x, t_grid=t_nodes, names=("b1", "b21", "b22", "b23", "b3"),
        d_or_b=b_phys, diag=B, right_field=R,
        extras={"lam": lam, "sources": Svec},
    )
