"""Exact wave-curve algebra and Riemann solver for the R1-CD-S3 pattern.

The solver produces the generic configuration rarefaction / contact / shock
with the contact sitting at x = 0 in Lagrangian coordinates, together with
the shock speed, fan edge speeds and per-family wave strengths.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .gas import (
    GasState,
    GasDomainError,
    char_speed,
    entropy,
    pressure,
    sound_speed_lagrangian,
    theta_on_isentrope,
)


class ConfigurationMismatch(ValueError):
    """The data do not produce an R1-CD-S3 wave pattern."""


class NoConvergence(RuntimeError):
    """Root finding failed to converge within the iteration cap."""


class InadmissibleShock(ValueError):
    """Requested shock state violates the Lax entropy condition."""


@dataclass(frozen=True)
class WavePattern:
    """Solved Riemann structure for R1-CD-S3 data."""

    left: GasState
    mid_star: GasState
    mid_upper: GasState
    right: GasState
    s3: float
    fan_left: float
    fan_right: float
    strengths: tuple  # (delta_R1, delta_CD, delta_S3)
    total_strength: float

    @property
    def p_contact(self) -> float:
        """Matched pressure across the contact."""
        return self.mid_star.p

    def to_dict(self) -> dict:
        d = {
            "left": asdict(self.left),
            "mid_star": asdict(self.mid_star),
            "mid_upper": asdict(self.mid_upper),
            "right": asdict(self.right),
            "s3": self.s3,
            "fan_left": self.fan_left,
            "fan_right": self.fan_right,
            "strengths": list(self.strengths),
            "total_strength": self.total_strength,
        }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "WavePattern":
        states = {k: GasState(**d[k]) for k in ("left", "mid_star", "mid_upper", "right")}
        return cls(
            s3=d["s3"],
            fan_left=d["fan_left"],
            fan_right=d["fan_right"],
            strengths=tuple(d["strengths"]),
            total_strength=d["total_strength"],
            **states,
        )


def isentrope_u1(anchor: GasState, v) -> np.ndarray:
    """u1 on the 1-isentrope curve through `anchor`, closed-form integral of lambda_1.

    u1(v) = u1_a - int_{v_a}^{v} lambda_1(eta, s_a) d eta
          = u1_a - sqrt(10*theta_a) * v_a^(1/3) * (v^(-1/3) - v_a^(-1/3)).
    """
    v = np.asarray(v, dtype=float)
    return anchor.u1 - np.sqrt(10.0 * anchor.theta) * anchor.v ** (1.0 / 3.0) * (
        v ** (-1.0 / 3.0) - anchor.v ** (-1.0 / 3.0)
    )


def _isentrope_state(anchor: GasState, v: float) -> GasState:
    theta = theta_on_isentrope(v, anchor.s)
    return GasState(v=v, u1=float(isentrope_u1(anchor, v)), theta=float(theta))


def rarefaction_connect(right_state: GasState, v: float) -> GasState:
    """Left state on the 1-rarefaction curve through `right_state` at volume v.

    Requires v <= right_state.v (v = right_state.v is the zero-strength limit);
    entropy and the 1-Riemann invariant are conserved, u2 = u3 = 0.
    """
    if v > right_state.v:
        raise ValueError(f"rarefaction curve needs v <= v_plus = {right_state.v}, got v = {v}")
    if v <= 0.0:
        raise GasDomainError("v must be positive")
    return _isentrope_state(right_state, v)


def _hugoniot_theta(right_state: GasState, v: float) -> float:
    """Temperature from e - e_+ + (p + p_+)*(v - v_+)/2 = 0 with e = theta."""
    p_plus = right_state.p
    dv = v - right_state.v
    return (right_state.theta - 0.5 * p_plus * dv) / (1.0 + dv / (3.0 * v))


def shock_connect(right_state: GasState, v: float) -> tuple[GasState, float]:
    """Left state and speed on the 3-shock curve through `right_state` at volume v.

    Solves the three Rankine-Hugoniot relations; the Lax condition
    lambda_3(right) < s3 < lambda_3(left) must hold, which restricts to
    compression v <= v_+ (equality is the zero-strength limit).
    """
    if v <= 0.0:
        raise GasDomainError("v must be positive")
    if v > right_state.v:
        raise InadmissibleShock(
            f"3-shock requires compression v <= v_plus = {right_state.v}, got v = {v}"
        )
    if v == right_state.v:
        return right_state, float(char_speed(right_state, 3, "lagrangian"))
    theta = _hugoniot_theta(right_state, v)
    p = pressure(v, theta)
    s3 = float(np.sqrt((p - right_state.p) / (right_state.v - v)))
    u1 = right_state.u1 + s3 * (right_state.v - v)
    left = GasState(v=v, u1=float(u1), theta=float(theta))
    lam_plus = char_speed(right_state, 3, "lagrangian")
    lam_minus = char_speed(left, 3, "lagrangian")
    if not (lam_plus < s3 < lam_minus):
        raise InadmissibleShock(
            f"Lax condition violated: need {lam_plus} < s3 = {s3} < {lam_minus}"
        )
    return left, s3


def contact_connect(state: GasState, v: float) -> GasState:
    """State on the contact curve through `state` at volume v: equal p and u1."""
    if v <= 0.0:
        raise GasDomainError("v must be positive")
    theta = 1.5 * state.p * v
    return GasState(v=v, u1=state.u1, theta=float(theta))


def rh_residuals(left: GasState, right: GasState, s: float) -> np.ndarray:
    """Residuals of the three Rankine-Hugoniot relations for speed s."""
    return np.array(
        [
            -s * (right.v - left.v) - (right.u1 - left.u1),
            -s * (right.u1 - left.u1) + (right.p - left.p),
            -s * (right.E - left.E) + (right.p * right.u1 - left.p * left.u1),
        ]
    )


def _pattern_from_mid_volumes(left: GasState, right: GasState, v_star: float, v_upper: float):
    """States and residuals for trial intermediate volumes (v*, v^*)."""
    mid_star = _isentrope_state(left, v_star)
    mid_upper, s3 = shock_connect(right, v_upper)
    res = np.array([mid_star.u1 - mid_upper.u1, mid_star.p - mid_upper.p])
    return mid_star, mid_upper, s3, res


def _newton_mid_volumes(left, right, v0, w0, tol=1e-12, max_iter=200):
    """Damped Newton on (v*, v^*) driving the contact mismatch to zero."""
    v, w = v0, w0
    lo = min(left.v, right.v) / 10.0
    hi_v, hi_w = 10.0 * max(left.v, right.v), right.v
    for _ in range(max_iter):
        _, _, _, res = _pattern_from_mid_volumes(left, right, v, w)
        if np.max(np.abs(res)) < tol:
            return v, w
        # finite-difference Jacobian; step inward when at the admissible edge
        hv = 1e-7 * max(v, 1.0)
        hw = 1e-7 * max(w, 1.0)
        if w + hw > hi_w:
            hw = -hw
        _, _, _, res_v = _pattern_from_mid_volumes(left, right, v + hv, w)
        _, _, _, res_w = _pattern_from_mid_volumes(left, right, v, w + hw)
        J = np.column_stack([(res_v - res) / hv, (res_w - res) / hw])
        try:
            step = np.linalg.solve(J, -res)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        base = np.linalg.norm(res)
        while lam > 1e-8:
            vn = min(max(v + lam * step[0], lo), hi_v)
            wn = min(max(w + lam * step[1], lo), hi_w)
            try:
                _, _, _, res_n = _pattern_from_mid_volumes(left, right, vn, wn)
            except (InadmissibleShock, GasDomainError):
                lam *= 0.5
                continue
            if np.linalg.norm(res_n) < base:
                v, w = vn, wn
                break
            lam *= 0.5
        else:
            break
    return None


def _bisect_contact_pressure(left, right, tol=1e-14, max_iter=200):
    """Fallback: bisection on the contact pressure p_c in (p_+, p_-)."""
    p_minus, p_plus = left.p, right.p

    def u_mismatch(pc):
        theta_star = left.theta * (pc / p_minus) ** (2.0 / 5.0)
        v_star = 2.0 * theta_star / (3.0 * pc)
        u_star = float(isentrope_u1(left, v_star))
        v_upper = right.v * (pc + 4.0 * p_plus) / (4.0 * pc + p_plus)
        s3 = np.sqrt((pc - p_plus) / (right.v - v_upper))
        u_upper = right.u1 + s3 * (right.v - v_upper)
        return u_star - u_upper, v_star, v_upper

    a, b = p_plus * (1.0 + 1e-15), p_minus
    fa = u_mismatch(a)[0]
    fb = u_mismatch(b)[0]
    if fa * fb > 0:
        raise ConfigurationMismatch(
            "contact pressure not bracketed in (p_+, p_-); data are not R1-CD-S3"
        )
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        fm = u_mismatch(m)[0]
        if fa * fm <= 0:
            b = m
        else:
            a, fa = m, fm
        if b - a < tol * max(1.0, m):
            break
    pc = 0.5 * (a + b)
    _, v_star, v_upper = u_mismatch(pc)
    return v_star, v_upper


def solve_riemann(left: GasState, right: GasState, tol: float = 1e-12) -> WavePattern:
    """Solve the Riemann problem assuming the R1-CD-S3 configuration.

    Finds intermediate volumes (v*, v^*) by damped Newton on the contact
    mismatch (u1, p), falling back to bisection on the contact pressure.
    Raises ConfigurationMismatch when the data require another pattern.
    """
    if left.u2 != 0.0 or left.u3 != 0.0 or right.u2 != 0.0 or right.u3 != 0.0:
        raise ValueError("Riemann data must have u2 = u3 = 0")

    if left == right:
        lam1 = char_speed(left, 1, "lagrangian")
        return WavePattern(
            left=left, mid_star=left, mid_upper=left, right=right,
            s3=float(char_speed(right, 3, "lagrangian")),
            fan_left=float(lam1), fan_right=float(lam1),
            strengths=(0.0, 0.0, 0.0), total_strength=0.0,
        )

    # R1-CD-S3 requires p_+ <= p_c <= p_-; reject other orderings up front
    if right.p > left.p * (1.0 + 1e-12):
        raise ConfigurationMismatch(
            f"need p_plus <= p_minus for R1-CD-S3, got p_-={left.p}, p_+={right.p}"
        )

    sol = _newton_mid_volumes(left, right, left.v, right.v, tol=tol)
    if sol is None:
        v_star, v_upper = _bisect_contact_pressure(left, right)
        sol = _newton_mid_volumes(left, right, v_star, v_upper, tol=tol)
        if sol is None:
            raise NoConvergence("Riemann solver did not converge")
    v_star, v_upper = sol
    mid_star, mid_upper, s3, res = _pattern_from_mid_volumes(left, right, v_star, v_upper)
    if np.max(np.abs(res)) > 1e-9:
        raise NoConvergence(f"contact mismatch {res} above tolerance")
    if v_star < left.v - 1e-12:
        raise ConfigurationMismatch("1-wave is a shock; only R1-CD-S3 is supported")

    d = np.array([right.v - left.v, right.u1 - left.u1, right.theta - left.theta])
    delta = float(np.linalg.norm(d))
    delta_r1 = float(np.linalg.norm([
        mid_star.v - left.v, mid_star.u1 - left.u1, mid_star.theta - left.theta,
    ]))
    delta_cd = abs(mid_upper.theta - mid_star.theta)
    delta_s3 = float(np.linalg.norm([
        right.v - mid_upper.v, right.u1 - mid_upper.u1, right.theta - mid_upper.theta,
    ]))
    return WavePattern(
        left=left, mid_star=mid_star, mid_upper=mid_upper, right=right,
        s3=float(s3),
        fan_left=float(char_speed(left, 1, "lagrangian")),
        fan_right=float(char_speed(mid_star, 1, "lagrangian")),
        strengths=(delta_r1, delta_cd, delta_s3),
        total_strength=delta,
    )


def _fan_state(pattern: WavePattern, xi: float) -> GasState:
    """Self-similar fan state where lambda_1(v, s_-) = xi (xi < 0 inside the fan)."""
    s_minus = pattern.left.s
    # lambda_1(v, s) = -sqrt(10*theta_-) v_-^(1/3) / (3 v^(4/3)) on the isentrope
    coef = np.sqrt(10.0 * pattern.left.theta) * pattern.left.v ** (1.0 / 3.0) / 3.0
    v = (coef / (-xi)) ** 0.75
    theta = theta_on_isentrope(v, s_minus)
    return GasState(v=float(v), u1=float(isentrope_u1(pattern.left, v)), theta=float(theta))


def euler_solution(pattern: WavePattern, t: float, x: float) -> GasState:
    """Pointwise inviscid Riemann solution at time t > 0 (Lagrangian frame).

    Contact sits at x = 0, shock travels at s3 > 0, the rarefaction fan
    occupies fan_left <= x/t <= fan_right on the left half line.
    """
    if t <= 0.0:
        raise ValueError("t must be positive")
    xi = x / t
    if xi < pattern.fan_left:
        return pattern.left
    if xi <= pattern.fan_right:
        return _fan_state(pattern, xi)
    if xi < 0.0:
        return pattern.mid_star
    if xi < pattern.s3:
        return pattern.mid_upper
    return pattern.right


def euler_solution_arrays(pattern: WavePattern, t: float, x: np.ndarray):
    """Vectorized euler_solution: arrays (v, u1, theta) over the grid x."""
    if t <= 0.0:
        raise ValueError("t must be positive")
    x = np.asarray(x, dtype=float)
    xi = x / t
    v = np.empty_like(xi)
    u1 = np.empty_like(xi)
    theta = np.empty_like(xi)

    lft = xi < pattern.fan_left
    fan = (~lft) & (xi <= pattern.fan_right)
    mid = (~lft) & (~fan) & (xi < 0.0)
    upp = (xi >= 0.0) & (xi < pattern.s3)
    rgt = xi >= pattern.s3

    for mask, st in ((lft, pattern.left), (mid, pattern.mid_star),
                     (upp, pattern.mid_upper), (rgt, pattern.right)):
        v[mask], u1[mask], theta[mask] = st.v, st.u1, st.theta
    if np.any(fan):
        coef = np.sqrt(10.0 * pattern.left.theta) * pattern.left.v ** (1.0 / 3.0) / 3.0
        vf = (coef / (-xi[fan])) ** 0.75
        v[fan] = vf
        theta[fan] = theta_on_isentrope(vf, pattern.left.s)
        u1[fan] = isentrope_u1(pattern.left, vf)
    return v, u1, theta
