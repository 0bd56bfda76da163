"""Space-time field container for wave-profile components."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

COMPONENTS = ("V", "U1", "U2", "U3", "Theta", "E")


def d_dx(arr: np.ndarray, dx: float) -> np.ndarray:
    """Centered first x-derivative with one-sided stencils at the boundary."""
    out = np.empty_like(arr)
    out[..., 1:-1] = (arr[..., 2:] - arr[..., :-2]) / (2.0 * dx)
    out[..., 0] = (arr[..., 1] - arr[..., 0]) / dx
    out[..., -1] = (arr[..., -1] - arr[..., -2]) / dx
    return out


def d2_dx2(arr: np.ndarray, dx: float) -> np.ndarray:
    """Centered second x-derivative with one-sided stencils at the boundary."""
    out = np.empty_like(arr)
    out[..., 1:-1] = (arr[..., 2:] - 2.0 * arr[..., 1:-1] + arr[..., :-2]) / dx**2
    out[..., 0] = out[..., 1]
    out[..., -1] = out[..., -2]
    return out


@dataclass
class SpaceTimeField:
    """Profile components sampled on a uniform x-grid at one or more times.

    values maps component name -> array of shape (n_t, n_x); dvalues and
    d2values hold first and second x-derivatives (analytic where the builder
    has them, centered differences otherwise).
    """

    x_grid: np.ndarray
    t_grid: np.ndarray
    values: dict = field(default_factory=dict)
    dvalues: dict = field(default_factory=dict)
    d2values: dict = field(default_factory=dict)

    @property
    def dx(self) -> float:
        return float(self.x_grid[1] - self.x_grid[0])

    def fill_derivatives(self, names=None):
        """Populate missing derivative arrays by centered differences."""
        for name in names or self.values:
            if name not in self.dvalues:
                self.dvalues[name] = d_dx(self.values[name], self.dx)
            if name not in self.d2values:
                self.d2values[name] = d2_dx2(self.values[name], self.dx)
        return self

    def validate(self, tol: float = 1e-12):
        """Check positivity of V, Theta and the energy identity E = Theta + |U|^2/2."""
        if np.any(self.values["V"] <= 0.0) or np.any(self.values["Theta"] <= 0.0):
            raise ValueError("field positivity violated: V or Theta <= 0")
        kinetic = sum(self.values[k] ** 2 for k in ("U1", "U2", "U3")) / 2.0
        err = np.max(np.abs(self.values["E"] - self.values["Theta"] - kinetic))
        if err > tol:
            raise ValueError(f"energy identity violated by {err}")
        return self

    def time_index(self, t: float) -> int:
        i = int(np.argmin(np.abs(self.t_grid - t)))
        if abs(self.t_grid[i] - t) > 1e-9 * max(1.0, abs(t)):
            raise KeyError(f"time {t} not on the field's t_grid")
        return i

    def at_time(self, t: float) -> dict:
        """Component arrays at one stored time."""
        i = self.time_index(t)
        return {k: v[i] for k, v in self.values.items()}


def constant_field(x_grid, t_grid, state) -> SpaceTimeField:
    """Field holding a single constant gas state."""
    x_grid = np.asarray(x_grid, dtype=float)
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    shape = (len(t_grid), len(x_grid))
    vals = {
        "V": np.full(shape, state.v),
        "U1": np.full(shape, state.u1),
        "U2": np.full(shape, state.u2),
        "U3": np.full(shape, state.u3),
        "Theta": np.full(shape, state.theta),
        "E": np.full(shape, state.E),
    }
    f = SpaceTimeField(x_grid=x_grid, t_grid=t_grid, values=vals)
    for name in COMPONENTS:
        f.dvalues[name] = np.zeros(shape)
        f.d2values[name] = np.zeros(shape)
    return f
