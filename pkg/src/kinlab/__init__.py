"""Kinetic-to-Euler hydrodynamic limit laboratory.

Core pieces: exact Riemann wave-curve algebra for the monatomic gas in
Lagrangian coordinates, viscous/smoothed wave profiles with hyperbolic
correction waves, a Chu-reduced BGK discrete-velocity solver, and an
experiment harness that measures convergence at small Knudsen number.
"""

from .gas import GasState, Eigensystem, pressure, entropy, char_speed, flux_jacobian_eigensystem
from .riemann import (
    WavePattern,
    rarefaction_connect,
    shock_connect,
    contact_connect,
    solve_riemann,
    euler_solution,
    euler_solution_arrays,
)

__all__ = [
    "GasState",
    "Eigensystem",
    "pressure",
    "entropy",
    "char_speed",
    "flux_jacobian_eigensystem",
    "WavePattern",
    "rarefaction_connect",
    "shock_connect",
    "contact_connect",
    "solve_riemann",
    "euler_solution",
    "euler_solution_arrays",
]
