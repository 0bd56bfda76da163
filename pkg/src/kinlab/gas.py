"""Thermodynamics and characteristic structure of the monatomic ideal gas.

Everything is written in Lagrangian coordinates for a gamma = 5/3 gas with
the gas constant normalized to R = 2/3, so that the internal energy equals
the temperature and p = 2*theta/(3*v).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

R_GAS = 2.0 / 3.0
GAMMA = 5.0 / 3.0


class GasDomainError(ValueError):
    """Raised when a thermodynamic quantity is evaluated outside v, theta > 0."""


@dataclass(frozen=True)
class GasState:
    """Fluid state (v, u1, u2, u3, theta) in Lagrangian variables."""

    v: float
    u1: float
    u2: float = 0.0
    u3: float = 0.0
    theta: float = 1.0

    def __post_init__(self):
        if not (self.v > 0.0 and self.theta > 0.0):
            raise GasDomainError(f"need v > 0 and theta > 0, got v={self.v}, theta={self.theta}")

    @property
    def e(self) -> float:
        """Internal energy; equals theta under R = 2/3."""
        return self.theta

    @property
    def E(self) -> float:
        """Total specific energy theta + |u|^2/2."""
        return self.theta + 0.5 * (self.u1**2 + self.u2**2 + self.u3**2)

    @property
    def p(self) -> float:
        return pressure(self.v, self.theta)

    @property
    def s(self) -> float:
        return entropy(self.v, self.theta)

    def as_tuple(self):
        return (self.v, self.u1, self.u2, self.u3, self.theta)


@dataclass(frozen=True)
class Eigensystem:
    """Eigendecomposition L A R = diag(lambdas), L R = I of a flux Jacobian."""

    lambdas: np.ndarray
    left: np.ndarray   # rows are left eigenvectors
    right: np.ndarray  # columns are right eigenvectors


def pressure(v, theta):
    """Pressure p = 2*theta/(3*v)."""
    if np.any(np.asarray(v) <= 0.0) or np.any(np.asarray(theta) <= 0.0):
        raise GasDomainError("pressure needs v > 0 and theta > 0")
    return 2.0 * theta / (3.0 * v)


def entropy(v, theta):
    """Specific entropy s = ln(theta) + (2/3) ln(v), normalized so s(1, 1) = 0."""
    if np.any(np.asarray(v) <= 0.0) or np.any(np.asarray(theta) <= 0.0):
        raise GasDomainError("entropy needs v > 0 and theta > 0")
    return np.log(theta) + (2.0 / 3.0) * np.log(v)


def theta_on_isentrope(v, s):
    """Temperature on the isentrope s at specific volume v."""
    return np.exp(s - (2.0 / 3.0) * np.log(v))


def sound_speed_lagrangian(v, theta):
    """Positive acoustic speed sqrt(10*theta)/(3*v) in Lagrangian coordinates."""
    return np.sqrt(10.0 * theta) / (3.0 * v)


def char_speed(state: GasState, family: int, frame: str = "lagrangian") -> float:
    """Characteristic speed of the acoustic family 1 or 3.

    Lagrangian: -/+ sqrt(10*theta)/(3*v).  Eulerian: u1 -/+ sqrt(10*theta)/3.
    """
    if family not in (1, 3):
        raise ValueError(f"family must be 1 or 3, got {family}")
    sign = -1.0 if family == 1 else 1.0
    if frame == "lagrangian":
        return sign * sound_speed_lagrangian(state.v, state.theta)
    if frame == "eulerian":
        return state.u1 + sign * np.sqrt(10.0 * state.theta) / 3.0
    raise ValueError(f"frame must be 'lagrangian' or 'eulerian', got {frame!r}")


def _pressure_partials(v, u, E):
    """Partials of p = (2E - |u|^2)/(3v) in conserved variables (v, u, E)."""
    u = np.asarray(u, dtype=float)
    p = (2.0 * E - np.sum(u * u)) / (3.0 * v)
    p_v = -p / v
    p_u = -2.0 * u / (3.0 * v)
    p_E = 2.0 / (3.0 * v)
    return p, p_v, p_u, p_E


def flux_jacobian_3x3(state: GasState) -> np.ndarray:
    """Jacobian of the Lagrangian Euler flux in (v, u1, E) for slab data.

    The three-variable system carries (v, u1, E = theta + u1^2/2); transverse
    velocities are outside it, so they are dropped from the conserved energy.
    """
    E_slab = state.theta + 0.5 * state.u1**2
    p, p_v, p_u, p_E = _pressure_partials(state.v, [state.u1], E_slab)
    u1 = state.u1
    return np.array(
        [
            [0.0, -1.0, 0.0],
            [p_v, p_u[0], p_E],
            [u1 * p_v, p + u1 * p_u[0], u1 * p_E],
        ]
    )


def flux_jacobian_5x5(state: GasState) -> np.ndarray:
    """Jacobian of the Lagrangian Euler flux in (v, u1, u2, u3, E)."""
    u = np.array([state.u1, state.u2, state.u3])
    p, p_v, p_u, p_E = _pressure_partials(state.v, u, state.E)
    u1 = state.u1
    A = np.zeros((5, 5))
    A[0, 1] = -1.0
    A[1, :] = [p_v, p_u[0], p_u[1], p_u[2], p_E]
    # (p*u1) partials; rows 2 and 3 (transverse velocities) carry no flux
    A[4, :] = [u1 * p_v, p + u1 * p_u[0], u1 * p_u[1], u1 * p_u[2], u1 * p_E]
    return A


def _acoustic_right(lam, p_v, p_u1, p_E, n):
    """Right eigenvector (1, -lam, [0, 0,] r_E) of the Jacobian for lam != 0."""
    r_E = (-lam * lam - p_v + p_u1 * lam) / p_E
    if n == 3:
        r = np.array([1.0, -lam, r_E])
    else:
        r = np.array([1.0, -lam, 0.0, 0.0, r_E])
    return r


def _sign_normalize(r):
    """Unit Euclidean norm with the first nonzero entry positive."""
    r = r / np.linalg.norm(r)
    for x in r:
        if x != 0.0:
            return r if x > 0 else -r
    return r


def flux_jacobian_eigensystem(state: GasState, system: str = "three_by_three") -> Eigensystem:
    """Eigendecomposition of the Lagrangian flux Jacobian.

    Eigenvalues come out sorted ascending with the 0 speed(s) exact.  For
    the five-variable system the left eigenvectors of the 0-family are
    pinned to (P, -U1, 0, 0, 1), (0, 0, 1, 0, 0) and (0, 0, 0, 1, 0); the
    matching right vectors are the dual basis inside the null space.
    """
    c = sound_speed_lagrangian(state.v, state.theta)
    if system == "three_by_three":
        E_slab = state.theta + 0.5 * state.u1**2
        _, p_v, p_u, p_E = _pressure_partials(state.v, [state.u1], E_slab)
        lambdas = np.array([-c, 0.0, c])
        cols = [_sign_normalize(_acoustic_right(lam, p_v, p_u[0], p_E, 3)) for lam in lambdas]
        right = np.column_stack(cols)
        left = np.linalg.inv(right)
        return Eigensystem(lambdas=lambdas, left=left, right=right)
    if system == "five_by_five":
        u = np.array([state.u1, state.u2, state.u3])
        p, p_v, p_u, p_E = _pressure_partials(state.v, u, state.E)
        lambdas = np.array([-c, 0.0, 0.0, 0.0, c])
        r_minus = _sign_normalize(_acoustic_right(-c, p_v, p_u[0], p_E, 5))
        r_plus = _sign_normalize(_acoustic_right(c, p_v, p_u[0], p_E, 5))
        # null space of A: r2 = 0 and p_v r1 + p_u2 r3 + p_u3 r4 + p_E r5 = 0
        n_basis = np.array(
            [
                [1.0, 0.0, 0.0, 0.0, -p_v / p_E],
                [0.0, 0.0, 1.0, 0.0, -p_u[1] / p_E],
                [0.0, 0.0, 0.0, 1.0, -p_u[2] / p_E],
            ]
        ).T  # columns
        l2 = np.array(
            [
                [p, -state.u1, 0.0, 0.0, 1.0],
                [0.0, 0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0, 0.0],
            ]
        )
        # dual basis: right null columns with l2 . r = identity
        r_null = n_basis @ np.linalg.inv(l2 @ n_basis)
        right = np.column_stack([r_minus, r_null[:, 0], r_null[:, 1], r_null[:, 2], r_plus])
        left = np.linalg.inv(right)
        return Eigensystem(lambdas=lambdas, left=left, right=right)
    raise ValueError(f"system must be 'three_by_three' or 'five_by_five', got {system!r}")
