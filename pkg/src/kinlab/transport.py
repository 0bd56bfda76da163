"""Temperature-dependent transport coefficients shared by the viscous profiles
and the BGK solver.

The BGK collision surrogate fixes Prandtl number 1, so the default heat
conductivity is the BGK-consistent kappa = (5/2) R mu / Pr.
"""

from __future__ import annotations

import numpy as np

from .gas import R_GAS


def make_viscosity(mu0: float = 1.0):
    """mu(theta) = mu0 * sqrt(theta)."""

    def mu(theta):
        return mu0 * np.sqrt(theta)

    return mu


def make_conductivity(mu0: float = 1.0, prandtl: float = 1.0):
    """kappa(theta) = (5/2) R mu(theta) / Pr."""

    mu = make_viscosity(mu0)

    def kappa(theta):
        return 2.5 * R_GAS * mu(theta) / prandtl

    return kappa


default_mu = make_viscosity()
default_kappa = make_conductivity()
