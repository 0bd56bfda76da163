"""Experiment driver: Knudsen sweeps over the excluded-neighborhood region,
scaling-law studies for the wave constructions, and report emission."""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import PchipInterpolator

from .gas import GasState, char_speed
from .riemann import WavePattern, euler_solution_arrays, solve_riemann
from .transport import make_conductivity, make_viscosity
from . import profiles as prof
from .kinetic import (
    MacroFields,
    VelocityGrid,
    maxwellian_state,
    micro_distance,
    moments,
    run as kinetic_run,
)


@dataclass
class SweepConfig:
    """Configuration of a convergence sweep; all fields deterministic."""

    left: GasState
    right: GasState
    eps_list: tuple
    h: float = 0.1
    T: float = 0.5
    n_x: int = 2000
    n_xi: int = 128
    x_span: tuple | None = None       # Eulerian domain; auto-sized when None
    snapshots: tuple = ()             # defaults to 5 times in [h, T]
    init_mode: str = "composite"      # or "sharp"
    cfl: float = 0.9
    mu0: float = 1.0
    prandtl: float = 1.0
    star_theta_factor: float = 0.75
    with_wave1: bool = True
    with_wave2: bool = True
    grid_self_check: bool = False
    lagrangian_pad: float = 0.4

    def __post_init__(self):
        eps = tuple(float(e) for e in self.eps_list)
        if any(e2 >= e1 for e1, e2 in zip(eps, eps[1:])):
            raise ValueError("eps_list must be strictly decreasing")
        if not (0.0 < self.h < self.T):
            raise ValueError("need 0 < h < T")
        object.__setattr__(self, "eps_list", eps)
        if not self.snapshots:
            self.snapshots = tuple(np.linspace(self.h, self.T, 5))


@dataclass
class SweepResult:
    eps: list
    sup_errors: list
    l2_errors: list
    sup_errors_composite: list
    runtimes: list
    n_x: int
    n_xi: int
    fitted_order: float
    fit_residual: float
    envelope_ratios: list
    grid_check: dict | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SweepResult":
        return cls(**json.loads(text))


def sigma_region_mask(t: float, m: np.ndarray, h: float, s3: float) -> np.ndarray:
    """Membership in the excluded-neighborhood region at time t (m Lagrangian)."""
    return (np.abs(m) >= h) & (np.abs(m - s3 * t) >= h)


def _star_state(pattern: WavePattern, factor: float) -> GasState:
    ms = pattern.mid_star
    return GasState(v=ms.v, u1=ms.u1, theta=factor * ms.theta)


def _lagrangian_window(pattern: WavePattern, eps: float, h: float, T: float,
                       sigma: float, pad: float):
    tail_pad = max(8.0 * np.sqrt(eps * (1.0 + T)), 6.0 * sigma, pad)
    m_lo = pattern.fan_left * T - tail_pad
    m_hi = pattern.s3 * T + tail_pad
    return m_lo, m_hi


def _eulerian_map(composite: prof.CompositeProfile, t: float):
    """Monotone Eulerian position X(m) of the composite at time t."""
    i = composite.total.time_index(t)
    V = composite.total.values["V"][i]
    m = composite.x_grid
    X = cumulative_trapezoid(V, m, initial=0.0)
    X -= np.interp(0.0, m, X)
    X += composite.pattern.mid_star.u1 * t
    return m, X


@dataclass
class EpsRunResult:
    eps: float
    sup_error: float
    l2_error: float
    sup_error_composite: float
    runtime: float
    snapshots: list = field(default_factory=list)  # per-snapshot dict of arrays


def run_single_eps(config: SweepConfig, pattern: WavePattern, eps: float,
                   n_x: int | None = None, keep_snapshots: bool = False
                   ) -> EpsRunResult:
    """One kinetic run at Knudsen number eps measured against the Euler solution."""
    t_start = time.perf_counter()
    n_x = n_x or config.n_x
    h, T = config.h, config.T
    sigma = eps ** 0.2
    mu = make_viscosity(config.mu0)
    kappa = make_conductivity(config.mu0, config.prandtl)

    dm = min(sigma / 10.0, np.sqrt(eps) / 10.0)
    m_lo, m_hi = _lagrangian_window(pattern, eps, h, T, sigma, config.lagrangian_pad)
    m_grid = np.arange(m_lo, m_hi + dm, dm)
    composite = prof.build_composite(
        pattern, eps, h, T, m_grid, times=config.snapshots, sigma=sigma,
        mu=mu, kappa=kappa, with_wave1=config.with_wave1, with_wave2=config.with_wave2,
    )

    # Eulerian solver grid
    if config.x_span is not None:
        x_lo, x_hi = config.x_span
    else:
        m0, X0 = _eulerian_map(composite, h)
        c_max = max(abs(char_speed(s, fam, "eulerian"))
                    for s in (pattern.left, pattern.mid_star, pattern.mid_upper, pattern.right)
                    for fam in (1, 3))
        x_lo = X0[0] - c_max * (T - h) - 0.3
        x_hi = X0[-1] + c_max * (T - h) + 0.3
    x = np.linspace(x_lo, x_hi, n_x)

    states = (pattern.left, pattern.mid_star, pattern.mid_upper, pattern.right)
    vgrid = VelocityGrid.for_states(states, n_xi=config.n_xi)
    star = _star_state(pattern, config.star_theta_factor)

    if config.init_mode == "composite":
        m0, X0 = _eulerian_map(composite, h)
        m_of_x = PchipInterpolator(X0, m0, extrapolate=False)
        m_init = m_of_x(np.clip(x, X0[0], X0[-1]))
        snap = composite.at_time(h)
        rho0 = 1.0 / np.interp(m_init, composite.x_grid, snap["V"])
        u10 = np.interp(m_init, composite.x_grid, snap["U1"])
        th0 = np.interp(m_init, composite.x_grid, snap["Theta"])
        # left/right of the window carry the exact end states
        rho0 = np.where(x < X0[0], 1.0 / pattern.left.v, rho0)
        u10 = np.where(x < X0[0], pattern.left.u1, u10)
        th0 = np.where(x < X0[0], pattern.left.theta, th0)
        rho0 = np.where(x > X0[-1], 1.0 / pattern.right.v, rho0)
        u10 = np.where(x > X0[-1], pattern.right.u1, u10)
        th0 = np.where(x > X0[-1], pattern.right.theta, th0)
        t0 = h
        m_left0 = float(m_init[0]) if np.isfinite(m_init[0]) else m0[0]
        m_left0 = float(np.interp(x[0], X0, m0)) if X0[0] <= x[0] <= X0[-1] else None
        if m_left0 is None:
            # left boundary sits in the unperturbed left state
            m_left0 = m0[0] - (X0[0] - x[0]) / pattern.left.v
    else:  # sharp Riemann data from t = 0
        rho0 = np.where(x < 0.0, 1.0 / pattern.left.v, 1.0 / pattern.right.v)
        u10 = np.where(x < 0.0, pattern.left.u1, pattern.right.u1)
        th0 = np.where(x < 0.0, pattern.left.theta, pattern.right.theta)
        t0 = 0.0
        m_left0 = x[0] / pattern.left.v

    state = maxwellian_state(x, vgrid, rho0, u10, th0, eps, time=t0, bc="outflow")
    snaps = kinetic_run(state, T, snapshot_times=config.snapshots,
                        cfl=config.cfl, mu0=config.mu0)

    # boundary sanity: waves must not have reached the domain ends
    final = moments(snaps[-1])
    for idx, ref in ((0, pattern.left), (-1, pattern.right)):
        if abs(final.rho[idx] - 1.0 / ref.v) > 1e-3 / ref.v:
            raise RuntimeError("wave reached the domain boundary before T")

    flux_left = pattern.left.u1 / pattern.left.v
    sup_err = l2_err = sup_comp = 0.0
    snap_records = []
    for st in snaps:
        if st.time < h - 1e-12 or not np.any(np.isclose(st.time, config.snapshots)):
            continue
        mac = moments(st)
        m_field = m_left0 - (st.time - t0) * flux_left + cumulative_trapezoid(
            mac.rho, x, initial=0.0
        )
        Vt, U1t, Tht = euler_solution_arrays(pattern, st.time, m_field)
        ref = MacroFields(rho=1.0 / Vt, u1=U1t, theta=Tht, E=Tht + 0.5 * U1t**2)
        dist = micro_distance(st, ref, star)

        mask = sigma_region_mask(st.time, m_field, h, pattern.s3)
        assert np.all(np.abs(m_field[mask]) >= h)
        assert np.all(np.abs(m_field[mask] - pattern.s3 * st.time) >= h)
        if np.any(mask):
            sup_err = max(sup_err, float(np.max(dist[mask])))
            l2_err = max(l2_err, float(np.sqrt(np.sum(dist[mask] ** 2) * st.dx)))

        csnap = composite.at_time(st.time)
        rho_c = 1.0 / np.interp(m_field, composite.x_grid, csnap["V"])
        u1_c = np.interp(m_field, composite.x_grid, csnap["U1"])
        th_c = np.interp(m_field, composite.x_grid, csnap["Theta"])
        ref_c = MacroFields(rho=rho_c, u1=u1_c, theta=th_c, E=th_c + 0.5 * u1_c**2)
        dist_c = micro_distance(st, ref_c, star)
        if np.any(mask):
            sup_comp = max(sup_comp, float(np.max(dist_c[mask])))

        if keep_snapshots:
            snap_records.append({
                "t": st.time, "x": x.copy(), "m": m_field,
                "rho": mac.rho, "u1": mac.u1, "theta": mac.theta, "E": mac.E,
                "micro_norm": micro_distance(st, mac, star),
                "rho_ref": ref.rho, "u1_ref": ref.u1, "theta_ref": ref.theta,
                "rho_comp": ref_c.rho, "u1_comp": ref_c.u1, "theta_comp": ref_c.theta,
            })

    return EpsRunResult(
        eps=eps, sup_error=sup_err, l2_error=l2_err, sup_error_composite=sup_comp,
        runtime=time.perf_counter() - t_start, snapshots=snap_records,
    )


def fit_order(eps, errors):
    """OLS slope of ln(error) vs ln(eps) plus the fit residual."""
    if len(eps) < 3:
        raise ValueError("order fit needs at least 3 eps values")
    x = np.log(np.asarray(eps, dtype=float))
    y = np.log(np.asarray(errors, dtype=float))
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((y - A @ coef) ** 2)))
    return float(coef[0]), resid


def envelope_ratio(eps, error):
    return float(error / (eps ** 0.2 * abs(np.log(eps))))


def run_convergence_sweep(config: SweepConfig, keep_snapshots: bool = False,
                          ) -> tuple[SweepResult, list]:
    """Kinetic-versus-Euler distance over the excluded region for each eps."""
    pattern = solve_riemann(config.left, config.right)
    runs = []
    for eps in config.eps_list:
        runs.append(run_single_eps(config, pattern, eps, keep_snapshots=keep_snapshots))

    grid_check = None
    if config.grid_self_check:
        fine = run_single_eps(config, pattern, config.eps_list[0], n_x=2 * config.n_x)
        coarse = runs[0].sup_error
        rel = abs(fine.sup_error - coarse) / max(coarse, 1e-300)
        grid_check = {"sup_coarse": coarse, "sup_fine": fine.sup_error,
                      "rel_change": rel, "passed": bool(rel < 0.05)}

    sup_errors = [r.sup_error for r in runs]
    order, resid = fit_order(config.eps_list, sup_errors)
    result = SweepResult(
        eps=list(config.eps_list),
        sup_errors=sup_errors,
        l2_errors=[r.l2_error for r in runs],
        sup_errors_composite=[r.sup_error_composite for r in runs],
        runtimes=[r.runtime for r in runs],
        n_x=config.n_x, n_xi=config.n_xi,
        fitted_order=order, fit_residual=resid,
        envelope_ratios=[envelope_ratio(e, s) for e, s in zip(config.eps_list, sup_errors)],
        grid_check=grid_check,
    )
    return result, runs


# ---------------------------------------------------------------------------
# scaling studies

STRONG_FAN_RATIOS = (1.0 / 2.5, 1.05, 0.9)


def make_curve_pattern(rar_ratio: float, cd_ratio: float, shock_ratio: float,
                       right: GasState = GasState(v=1.0, u1=0.0, theta=1.0)
                       ) -> WavePattern:
    """Pattern built by walking backward along the three wave curves."""
    from .riemann import contact_connect, rarefaction_connect, shock_connect

    upper, _ = shock_connect(right, right.v * shock_ratio)
    star = contact_connect(upper, upper.v * cd_ratio)
    left = rarefaction_connect(star, star.v * rar_ratio)
    return solve_riemann(left, right)


def lp_norm(arrs, x, p):
    mag = np.sqrt(sum(a**2 for a in arrs))
    dx = x[1] - x[0]
    if np.isinf(p):
        return float(np.max(mag))
    return float((np.sum(mag**p) * dx) ** (1.0 / p))


def study_lemma21(pattern=None, sigmas=(0.2, 0.1, 0.05, 0.025), ps=(1, 2, 8),
                  t: float = 0.0):
    """Rarefaction derivative norms versus sigma; predicted slope -1 + 1/p."""
    pattern = pattern or make_curve_pattern(*STRONG_FAN_RATIOS)
    rows = []
    for p in ps:
        norms = []
        for sigma in sigmas:
            dx = sigma / 20.0
            x = np.arange(-4.0 + pattern.fan_left * t, 4.0 + pattern.fan_right * t, dx)
            vals, dvals = prof.rarefaction_arrays(pattern, sigma, t, x)
            norms.append(lp_norm((dvals["V"], dvals["U1"], dvals["Theta"]), x, p))
        slope, resid = fit_order(sigmas, norms)
        rows.append({"study": "lemma21", "p": p, "sigmas": list(sigmas),
                     "norms": norms, "slope": slope,
                     "predicted": -1.0 + 1.0 / p, "fit_residual": resid})
    return rows


def _wave1_norms(pattern, eps_list, h, T, mu, kappa):
    norms = []
    for eps in eps_list:
        sigma = eps ** 0.2
        dx = min(sigma / 10.0, np.sqrt(eps) / 10.0)
        x_lo = pattern.fan_left * T - 8.0 * sigma
        x_hi = max(0.5, pattern.fan_right * T) + 8.0 * sigma
        x = np.arange(x_lo, x_hi, dx)
        t_nodes = prof.compose.composite_time_nodes(
            h, T, x, max(abs(pattern.fan_left), abs(pattern.fan_right)))
        rar = prof.build_rarefaction_profile(pattern, sigma, t_nodes, x)
        w1 = prof.build_hyperbolic_wave_I(rar, eps, sigma, h, T, mu=mu, kappa=kappa)
        norms.append(float(np.max(w1.l2_norms() ** 2)))
    return norms


def study_lemma22(pattern=None, eps_list=(1e-2, 5e-3, 2.5e-3), h=0.1, T=1.0,
                  mu0=1.0, prandtl=1.0):
    """Wave-I squared norms versus eps at sigma = eps^(1/5); predicted 9/5."""
    pattern = pattern or make_curve_pattern(*STRONG_FAN_RATIOS)
    mu = make_viscosity(mu0)
    kappa = make_conductivity(mu0, prandtl)
    norms = _wave1_norms(pattern, eps_list, h, T, mu, kappa)
    slope, resid = fit_order(eps_list, norms)
    return [{"study": "lemma22", "eps": list(eps_list), "norms": norms,
             "slope": slope, "predicted": 1.8, "fit_residual": resid}]


def study_lemma26(pattern=None, eps_list=(1e-2, 5e-3, 2.5e-3), h=0.1, T=0.5,
                  mu0=1.0, prandtl=1.0):
    """Wave-II squared norms and shock-weighted dissipation; predicted 5/2."""
    pattern = pattern or make_curve_pattern(0.88, 1.25, 0.88)
    mu = make_viscosity(mu0)
    kappa = make_conductivity(mu0, prandtl)
    norms, dissip = [], []
    for eps in eps_list:
        sigma = eps ** 0.2
        dx = min(sigma / 10.0, np.sqrt(eps) / 10.0)
        m_lo, m_hi = _lagrangian_window(pattern, eps, h, T, sigma, 0.4)
        x = np.arange(m_lo, m_hi, dx)
        comp = prof.build_composite(pattern, eps, h, T, x, sigma=sigma,
                                    mu=mu, kappa=kappa, with_wave2=True)
        w2 = comp.wave2
        n2 = w2.l2_norms() ** 2
        norms.append(float(np.max(n2)))
        w_shock = np.abs(comp.shock.dvalues["U1"])
        dens = np.sum(w_shock * np.sum(w2.d_or_b**2, axis=0), axis=1) * dx
        dissip.append(float(np.trapezoid(dens, w2.t_grid)))
    rows = []
    for name, vals in (("lemma26", norms), ("lemma26_dissipation", dissip)):
        slope, resid = fit_order(eps_list, vals)
        rows.append({"study": name, "eps": list(eps_list), "norms": vals,
                     "slope": slope, "predicted": 2.5, "fit_residual": resid})
    return rows


def study_shock_tail(pattern=None, eps_list=(2e-2, 1e-2), mu0=1.0, prandtl=1.0):
    """Exponential tail rates of the shock profile; eps-halving doubles them."""
    pattern = pattern or make_curve_pattern(0.95, 1.05, 0.8)
    mu = make_viscosity(mu0)
    kappa = make_conductivity(mu0, prandtl)
    orbit = prof.solve_shock_orbit(pattern, mu=mu, kappa=kappa)
    rates = []
    for eps in eps_list:
        # tail rate in eta: fit ln|V - v_end| on each side of the orbit
        side_rates = []
        for sgn, end in ((-1, orbit.left.v), (+1, orbit.right.v)):
            zeta = orbit.zeta * eps
            dv = np.abs(orbit.V - end)
            mask = (np.sign(orbit.zeta) == sgn) & (dv > 1e-9) & (
                dv < 0.2 * abs(orbit.right.v - orbit.left.v))
            A = np.column_stack([np.abs(zeta[mask]), np.ones(np.count_nonzero(mask))])
            coef, *_ = np.linalg.lstsq(A, np.log(dv[mask]), rcond=None)
            side_rates.append(-coef[0])
        rates.append(side_rates)
    rows = []
    for side in (0, 1):
        ratio = rates[1][side] / rates[0][side] * (eps_list[1] / eps_list[0]) / 0.5
        # ratio of rates normalized by the eps ratio; 1.0 means perfect 1/eps scaling
        rows.append({"study": "shock_tail", "side": "left" if side == 0 else "right",
                     "eps": list(eps_list), "rates": [r[side] for r in rates],
                     "rate_ratio": rates[1][side] / rates[0][side],
                     "predicted_ratio": eps_list[0] / eps_list[1]})
    return rows


def study_contact_tail(pattern=None, mu0=1.0, prandtl=1.0):
    """Gaussian decay of the contact similarity layer: ln|T'| linear in eta^2."""
    pattern = pattern or make_curve_pattern(0.95, 1.3, 0.95)
    kappa = make_conductivity(mu0, prandtl)
    sol = prof.solve_contact_similarity(
        pattern.mid_star.theta, pattern.mid_upper.theta, pattern.p_contact, kappa=kappa)
    return [{"study": "contact_tail", "tail_c": sol.tail_c, "r2": sol.tail_r2}]


def run_scaling_study(which: str, **kwargs):
    studies = {
        "lemma21": study_lemma21,
        "lemma22": study_lemma22,
        "lemma26": study_lemma26,
        "shock_tail": study_shock_tail,
        "contact_tail": study_contact_tail,
    }
    if which not in studies:
        raise ValueError(f"unknown study {which!r}; choose from {sorted(studies)}")
    return studies[which](**kwargs)


# ---------------------------------------------------------------------------
# report emission

SWEEP_CSV_COLUMNS = ("eps", "sup_error", "l2_error", "fitted_order", "envelope_ratio")


def emit_report(result: SweepResult | None, path, fmt: str = "csv") -> None:
    """Write a sweep report; CSV column order is part of the contract."""
    try:
        if fmt == "json":
            with open(path, "w") as fh:
                fh.write(result.to_json() if result is not None else "{}")
            return
        if fmt != "csv":
            raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(SWEEP_CSV_COLUMNS)
            if result is None:
                return
            n = len(result.eps)
            for i in range(n):
                order = result.fitted_order if i == n - 1 else ""
                writer.writerow([
                    repr(result.eps[i]), repr(result.sup_errors[i]),
                    repr(result.l2_errors[i]), repr(order) if order != "" else "",
                    repr(result.envelope_ratios[i]),
                ])
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
