"""Viscous contact wave from the self-similar nonlinear diffusion equation.

The temperature solves -(eta/2) T' = (a(T) T')' with a(T) = 9 p+ kappa(T) / (10 T)
on eta = x / sqrt(eps (1 + t)), connecting the two contact-side temperatures.
Specific volume and normal velocity follow from pressure matching and the
once-integrated mass equation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, solve_bvp
from scipy.interpolate import PchipInterpolator

from ..riemann import WavePattern
from ..transport import default_kappa
from .fields import SpaceTimeField, constant_field


class ContactBvpError(RuntimeError):
    """Self-similar boundary value problem failed to converge."""


@dataclass
class ContactWaveSolution:
    """Self-similar temperature layer and its diagnostics."""

    eta_grid: np.ndarray
    theta_hat: np.ndarray
    theta_hat_prime: np.ndarray
    p_plus: float
    theta_left: float
    theta_right: float
    theta_nf: np.ndarray | None = None
    theta_nf_prime: np.ndarray | None = None
    tail_c: float = np.nan       # fitted Gaussian rate, min over both sides
    tail_r2: float = np.nan      # worst-side goodness of the ln|T'| vs eta^2 fit

    def __post_init__(self):
        self._th = PchipInterpolator(self.eta_grid, self.theta_hat, extrapolate=False)
        self._thp = PchipInterpolator(self.eta_grid, self.theta_hat_prime, extrapolate=False)
        if self.theta_nf is not None:
            self._nf = PchipInterpolator(self.eta_grid, self.theta_nf, extrapolate=False)
            self._nfp = PchipInterpolator(self.eta_grid, self.theta_nf_prime, extrapolate=False)

    def theta(self, eta):
        out = self._th(np.asarray(eta, dtype=float))
        out = np.where(np.asarray(eta) < self.eta_grid[0], self.theta_left, out)
        return np.where(np.asarray(eta) > self.eta_grid[-1], self.theta_right, out)

    def theta_prime(self, eta):
        out = self._thp(np.asarray(eta, dtype=float))
        return np.where(np.isnan(out), 0.0, out)

    def nf(self, eta):
        if self.theta_nf is None:
            return np.zeros_like(np.asarray(eta, dtype=float))
        out = self._nf(np.asarray(eta, dtype=float))
        return np.where(np.isnan(out), 0.0, out)

    def nf_prime(self, eta):
        if self.theta_nf is None:
            return np.zeros_like(np.asarray(eta, dtype=float))
        out = self._nfp(np.asarray(eta, dtype=float))
        return np.where(np.isnan(out), 0.0, out)

    def ode_residual(self, a_func) -> np.ndarray:
        """Residual of (a(T) T')' + (eta/2) T' by 4th-order differences of T alone."""
        eta = self.eta_grid
        h = eta[1] - eta[0]
        T = self.theta_hat
        q = a_func(T) * _fd4_first(T, h)
        return _fd4_first(q, h)[4:-4] + 0.5 * eta[4:-4] * _fd4_first(T, h)[4:-4]


def _fd4_first(arr, h):
    """4th-order centered first derivative; low-order one-sided at the edges."""
    out = np.empty_like(arr)
    out[2:-2] = (arr[:-4] - 8 * arr[1:-3] + 8 * arr[3:-1] - arr[4:]) / (12 * h)
    out[:2] = (arr[1:3] - arr[0:2]) / h
    out[-2:] = (arr[-2:] - arr[-3:-1]) / h
    return out


def _fit_gaussian_tail(eta, thp):
    """Linear fit of ln|T'| vs eta^2 per side; returns (c, worst r2)."""
    results = []
    amp = np.max(np.abs(thp))
    for side in (eta < 0.0, eta > 0.0):
        mask = side & (np.abs(thp) > 1e-10 * amp) & (np.abs(thp) < 0.5 * amp)
        if np.count_nonzero(mask) < 10:
            continue
        xs = eta[mask] ** 2
        ys = np.log(np.abs(thp[mask]))
        A = np.column_stack([xs, np.ones_like(xs)])
        coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
        fit = A @ coef
        ss_res = np.sum((ys - fit) ** 2)
        ss_tot = np.sum((ys - np.mean(ys)) ** 2)
        r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
        results.append((-coef[0], r2))
    if not results:
        return np.nan, np.nan
    c = min(r[0] for r in results)
    r2 = min(r[1] for r in results)
    return c, r2


def solve_contact_similarity(theta_left: float, theta_right: float, p_plus: float,
                             kappa=default_kappa, eta_max: float = 12.0,
                             n_eta: int = 3001, nf_coeffs=None, eps_nf: float = 0.0
                             ) -> ContactWaveSolution:
    """Solve the self-similar layer -(eta/2) T' = (a(T) T')' with T(-inf/+inf) given."""

    def a_func(theta):
        return 9.0 * p_plus * kappa(theta) / (10.0 * theta)

    eta = np.linspace(-eta_max, eta_max, n_eta)
    if theta_left == theta_right:
        sol = ContactWaveSolution(
            eta_grid=eta, theta_hat=np.full_like(eta, theta_left),
            theta_hat_prime=np.zeros_like(eta), p_plus=p_plus,
            theta_left=theta_left, theta_right=theta_right,
        )
        sol.tail_c, sol.tail_r2 = np.nan, np.nan
        return sol

    # first-order system in (T, q = a(T) T')
    def rhs(e, y):
        a = a_func(y[0])
        return np.vstack([y[1] / a, -0.5 * e * y[1] / a])

    def bc(ya, yb):
        return np.array([ya[0] - theta_left, yb[0] - theta_right])

    guess_T = theta_left + (theta_right - theta_left) * 0.5 * (1.0 + np.tanh(eta))
    guess_q = a_func(guess_T) * np.gradient(guess_T, eta)
    bvp = solve_bvp(rhs, bc, eta, np.vstack([guess_T, guess_q]),
                    tol=1e-10, max_nodes=200000)
    if not bvp.success:
        raise ContactBvpError(f"solve_bvp failed: {bvp.message}")
    T = bvp.sol(eta)[0]
    q = bvp.sol(eta)[1]
    Tp = q / a_func(T)

    nf = nf_prime = None
    if nf_coeffs is not None:
        nf, nf_prime = _solve_nonfluid(eta, T, Tp, a_func, p_plus, nf_coeffs, eps_nf)

    sol = ContactWaveSolution(
        eta_grid=eta, theta_hat=T, theta_hat_prime=Tp, p_plus=p_plus,
        theta_left=theta_left, theta_right=theta_right,
        theta_nf=nf, theta_nf_prime=nf_prime,
    )
    sol.tail_c, sol.tail_r2 = _fit_gaussian_tail(eta, Tp)
    return sol


def _solve_nonfluid(eta, T, Tp, a_func, p_plus, nf_coeffs, eps):
    """Non-fluid correction by quadrature of the once-integrated linear equation.

    With W = d(anti-derivative)/d(eta), the similarity form reduces to
    (a W)' + (eta/2) W = -(3/5) eps S(eta), solved with a vanishing left tail.
    """
    g11, g12, g13, g14 = nf_coeffs
    h = eta[1] - eta[0]
    Tpp = np.gradient(Tp, eta)
    G = g11(T) + 2.0 / (3.0 * p_plus) * g12(T) + g13(T)
    S = G * Tp**2 + g14(T) * Tpp
    a = a_func(T)
    # integrating factor for Y = a W:  Y' + (eta/(2a)) Y = -(3/5) eps S
    phi = cumulative_trapezoid(eta / (2.0 * a), eta, initial=0.0)
    phi -= phi.min()  # keep the exponent bounded before exponentiation
    integrand = -0.6 * eps * S * np.exp(phi)
    Y = np.exp(-phi) * cumulative_trapezoid(integrand, eta, initial=0.0)
    W = Y / a
    # theta_nf is W itself in similarity variables; its eta-derivative by differences
    return W, np.gradient(W, eta, edge_order=2)


def build_contact_profile(pattern: WavePattern, eps: float, times, x_grid,
                          kappa=default_kappa, nf_coeffs=None):
    """Viscous contact component on x_grid; returns (field, similarity solution).

    The contact pressures of the pattern must match (they do for any solved
    R1-CD-S3 pattern); eta = x / sqrt(eps (1 + t)).
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    x_grid = np.asarray(x_grid, dtype=float)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    star, upper = pattern.mid_star, pattern.mid_upper
    if abs(star.p - upper.p) > 1e-8 * star.p:
        raise ValueError("contact pressures of the pattern do not match")
    p_plus = pattern.p_contact
    u1c = star.u1

    sol = solve_contact_similarity(star.theta, upper.theta, p_plus, kappa=kappa,
                                   nf_coeffs=nf_coeffs, eps_nf=eps)

    def a_func(theta):
        return 9.0 * p_plus * kappa(theta) / (10.0 * theta)

    if pattern.strengths[1] == 0.0 and nf_coeffs is None:
        field = constant_field(x_grid, times, star)
        return field, sol

    # optional non-fluid source envelope S(eta) for the velocity correction
    S_nf = None
    if nf_coeffs is not None:
        g11, g12, g13, g14 = nf_coeffs
        T0, T0p = sol.theta_hat, sol.theta_hat_prime
        G = g11(T0) + 2.0 / (3.0 * p_plus) * g12(T0) + g13(T0)
        S_arr = G * T0p**2 + g14(T0) * np.gradient(T0p, sol.eta_grid, edge_order=2)
        S_nf = PchipInterpolator(sol.eta_grid, S_arr, extrapolate=False)

    shape = (len(times), len(x_grid))
    vals = {k: np.zeros(shape) for k in ("V", "U1", "U2", "U3", "Theta", "E")}
    dvals = {k: np.zeros(shape) for k in ("V", "U1", "U2", "U3", "Theta", "E")}
    for i, t in enumerate(times):
        scale = np.sqrt(eps * (1.0 + t))
        eta = x_grid / scale
        Th = sol.theta(eta)
        Thp = sol.theta_prime(eta)
        nf = sol.nf(eta)
        nfp = sol.nf_prime(eta)
        theta_cd = Th + nf
        theta_cd_x = (Thp + nfp) / scale
        V = 2.0 * theta_cd / (3.0 * p_plus)
        V_x = 2.0 * theta_cd_x / (3.0 * p_plus)
        # once-integrated mass flux: eps a T_x + eps (a T^nf)_x + (3/5) Delta_11
        a_here = a_func(Th)
        flux = eps * a_here * Thp / scale
        if nf_coeffs is not None:
            flux = flux + eps * np.gradient(a_here * nf, eta, edge_order=2) / scale
            S_here = np.nan_to_num(S_nf(eta))
            flux = flux + 0.6 * eps * S_here / (1.0 + t)
        U1 = u1c + 2.0 / (3.0 * p_plus) * flux
        U1_x = np.gradient(U1, x_grid, edge_order=2)
        vals["V"][i], vals["U1"][i], vals["Theta"][i] = V, U1, theta_cd
        vals["E"][i] = theta_cd + 0.5 * U1**2
        dvals["V"][i], dvals["U1"][i], dvals["Theta"][i] = V_x, U1_x, theta_cd_x
        dvals["E"][i] = theta_cd_x + U1 * U1_x
    field = SpaceTimeField(x_grid=x_grid, t_grid=times, values=vals, dvalues=dvals)
    field.fill_derivatives()
    return field, sol
