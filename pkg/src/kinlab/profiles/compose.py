"""Superposition of the wave components and the Lagrangian/Eulerian transform."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import PchipInterpolator

from ..riemann import WavePattern
from ..transport import default_kappa, default_mu
from .contact import ContactWaveSolution, build_contact_profile
from .fields import COMPONENTS, SpaceTimeField
from .hyperbolic import (
    HyperbolicWaveField,
    build_hyperbolic_wave_I,
    build_hyperbolic_wave_II,
    gaussian_contact_source,
)
from .rarefaction import build_rarefaction_profile
from .shock import ShockOrbit, build_shock_profile, solve_shock_orbit


def superpose(rar: SpaceTimeField, dI, contact: SpaceTimeField,
              shock: SpaceTimeField, dII, pattern: WavePattern) -> SpaceTimeField:
    """Assemble the composite wave pattern from its parts.

    V = V_R1 + d1 + V_CD + V_S3 - (v_* + v^*) + b1, likewise for U1 and the
    energy; the transverse velocities carry the contact part plus b2i, and
    the temperature is recovered from the assembled energy.
    """
    x, t = rar.x_grid, rar.t_grid
    for f in (contact, shock):
        if len(f.x_grid) != len(x) or len(f.t_grid) != len(t):
            raise ValueError("all parts must share the grid and times")

    star, upper = pattern.mid_star, pattern.mid_upper
    zeros = np.zeros_like(rar.values["V"])
    d1 = dI.component("d1") if dI is not None else zeros
    d2 = dI.component("d2") if dI is not None else zeros
    d3 = dI.component("d3") if dI is not None else zeros
    b1 = dII.component("b1") if dII is not None else zeros
    b21 = dII.component("b21") if dII is not None else zeros
    b22 = dII.component("b22") if dII is not None else zeros
    b23 = dII.component("b23") if dII is not None else zeros
    b3 = dII.component("b3") if dII is not None else zeros

    V = rar.values["V"] + d1 + contact.values["V"] + shock.values["V"] - (star.v + upper.v) + b1
    U1 = (rar.values["U1"] + d2 + contact.values["U1"] + shock.values["U1"]
          - (star.u1 + upper.u1) + b21)
    E = (rar.values["E"] + d3 + contact.values["E"] + shock.values["E"]
         - (star.E + upper.E) + b3)
    U2 = contact.values["U2"] + b22
    U3 = contact.values["U3"] + b23
    Theta = E - 0.5 * (U1**2 + U2**2 + U3**2)

    out = SpaceTimeField(x_grid=x, t_grid=t, values={
        "V": V, "U1": U1, "U2": U2, "U3": U3, "Theta": Theta, "E": E,
    })
    out.fill_derivatives()
    out.validate(tol=1e-10)
    return out


@dataclass
class CompositeProfile:
    """All wave parts over [h, T] plus their superpositions."""

    pattern: WavePattern
    eps: float
    sigma: float
    x_grid: np.ndarray
    t_grid: np.ndarray
    rarefaction: SpaceTimeField
    contact: SpaceTimeField
    contact_similarity: ContactWaveSolution
    shock: SpaceTimeField
    wave1: HyperbolicWaveField | None
    wave2: HyperbolicWaveField | None
    bar: SpaceTimeField
    total: SpaceTimeField
    shock_orbit: ShockOrbit | None = None

    def at_time(self, t: float) -> dict:
        return self.total.at_time(t)

    def decomposition_at(self, t: float) -> dict:
        """Per-wave component columns used by the CLI --decompose output."""
        i = self.total.time_index(t)
        out = {
            "V_R1": self.rarefaction.values["V"][i],
            "V_CD": self.contact.values["V"][i],
            "V_S3": self.shock.values["V"][i],
        }
        out["d1"] = (self.wave1.component("d1")[i] if self.wave1 is not None
                     else np.zeros_like(out["V_R1"]))
        out["b1"] = (self.wave2.component("b1")[i] if self.wave2 is not None
                     else np.zeros_like(out["V_R1"]))
        return out


def composite_time_nodes(h: float, T: float, x_grid, max_speed: float,
                         include=()) -> np.ndarray:
    """CFL-satisfying time levels on [h, T] containing the requested times."""
    dx = float(x_grid[1] - x_grid[0])
    n = max(int(np.ceil((T - h) * max_speed / dx)) + 2, 8)
    nodes = set(np.linspace(h, T, n))
    for t in include:
        if not (h - 1e-12 <= t <= T + 1e-12):
            raise ValueError(f"requested time {t} outside [h, T]")
        nodes.add(float(t))
    return np.array(sorted(nodes))


def build_composite(pattern: WavePattern, eps: float, h: float, T: float,
                    x_grid, times=(), sigma: float | None = None,
                    mu=default_mu, kappa=default_kappa,
                    with_wave1: bool = True, with_wave2: bool = True,
                    wave2_amplitude: float = 1.0, tail_c_fallback: float = 0.25
                    ) -> CompositeProfile:
    """Build every wave component over [h, T] and superpose them.

    sigma defaults to eps^(1/5).  Requested snapshot `times` are inserted
    into the internal time levels so profile values there are exact.
    """
    if sigma is None:
        sigma = eps ** 0.2
    x_grid = np.asarray(x_grid, dtype=float)
    lam_max = max(abs(pattern.fan_left), abs(pattern.fan_right),
                  abs(pattern.s3), 1e-6)
    t_nodes = composite_time_nodes(h, T, x_grid, lam_max, include=times)

    rar = build_rarefaction_profile(pattern, sigma, t_nodes, x_grid)
    wave1 = None
    if with_wave1 and pattern.strengths[0] > 0.0:
        wave1 = build_hyperbolic_wave_I(rar, eps, sigma, h, T, mu=mu, kappa=kappa)

    contact, csol = build_contact_profile(pattern, eps, t_nodes, x_grid, kappa=kappa)
    orbit = None
    if pattern.strengths[2] > 0.0:
        orbit = solve_shock_orbit(pattern, mu=mu, kappa=kappa)
    shock = build_shock_profile(pattern, eps, x_grid, mu=mu, kappa=kappa,
                                times=t_nodes, orbit=orbit)

    bar = superpose(rar, wave1, contact, shock, None, pattern)
    wave2 = None
    if with_wave2:
        c_tail = csol.tail_c if np.isfinite(csol.tail_c) else tail_c_fallback
        provider = gaussian_contact_source(pattern, eps, c_tail, amplitude=wave2_amplitude)
        wave2 = build_hyperbolic_wave_II(bar, provider, h, T)
        total = superpose(rar, wave1, contact, shock, wave2, pattern)
    else:
        total = bar

    return CompositeProfile(
        pattern=pattern, eps=eps, sigma=sigma, x_grid=x_grid, t_grid=t_nodes,
        rarefaction=rar, contact=contact, contact_similarity=csol, shock=shock,
        wave1=wave1, wave2=wave2, bar=bar, total=total, shock_orbit=orbit,
    )


def lagrangian_to_eulerian(fld: SpaceTimeField, t: float,
                           anchor_speed: float | None = None) -> SpaceTimeField:
    """Resample a Lagrangian-frame snapshot onto a uniform Eulerian grid.

    The Eulerian position is X(x) = X0 + int_0^x V(t, xi) d xi with the
    anchor X0 = anchor_speed * t; by default the anchor speed is the fluid
    velocity at the Lagrangian origin (the contact is a particle path).
    """
    i = fld.time_index(t)
    V = fld.values["V"][i]
    if np.any(V <= 0.0):
        raise ValueError("V must stay positive for a monotone coordinate map")
    x = fld.x_grid
    X = cumulative_trapezoid(V, x, initial=0.0)
    X -= np.interp(0.0, x, X)  # X(0) before anchoring
    if anchor_speed is None:
        anchor_speed = float(np.interp(0.0, x, fld.values["U1"][i]))
    X += anchor_speed * t
    x_eul = np.linspace(X[0], X[-1], len(x))
    vals = {}
    for name in COMPONENTS:
        vals[name] = PchipInterpolator(X, fld.values[name][i])(x_eul)
    out = SpaceTimeField(x_grid=x_eul, t_grid=np.array([t]),
                         values={k: v[None, :] for k, v in vals.items()})
    out.fill_derivatives()
    return out


def eulerian_to_lagrangian(fld: SpaceTimeField, t: float, anchor_position: float
                           ) -> SpaceTimeField:
    """Inverse transform: mass coordinate m(x) = int rho with m(anchor) = 0."""
    i = fld.time_index(t)
    rho = 1.0 / fld.values["V"][i]
    x = fld.x_grid
    m = cumulative_trapezoid(rho, x, initial=0.0)
    m -= np.interp(anchor_position, x, m)
    m_grid = np.linspace(m[0], m[-1], len(x))
    vals = {}
    for name in COMPONENTS:
        vals[name] = PchipInterpolator(m, fld.values[name][i])(m_grid)
    out = SpaceTimeField(x_grid=m_grid, t_grid=np.array([t]),
                         values={k: v[None, :] for k, v in vals.items()})
    out.fill_derivatives()
    return out
