from .fields import SpaceTimeField, constant_field, d_dx, d2_dx2
from .rarefaction import burgers_smooth, build_rarefaction_profile, rarefaction_arrays
from .contact import ContactWaveSolution, build_contact_profile, solve_contact_similarity
from .shock import ShockOrbit, build_shock_profile, solve_shock_orbit
from .hyperbolic import (
    HyperbolicWaveField,
    build_hyperbolic_wave_I,
    build_hyperbolic_wave_II,
    eigen_fields_3,
    eigen_fields_5,
    gaussian_contact_source,
)
from .compose import (
    CompositeProfile,
    build_composite,
    eulerian_to_lagrangian,
    lagrangian_to_eulerian,
    superpose,
)

__all__ = [
    "SpaceTimeField",
    "constant_field",
    "d_dx",
    "d2_dx2",
    "burgers_smooth",
    "build_rarefaction_profile",
    "rarefaction_arrays",
    "ContactWaveSolution",
    "build_contact_profile",
    "solve_contact_similarity",
    "ShockOrbit",
    "build_shock_profile",
    "solve_shock_orbit",
    "HyperbolicWaveField",
    "build_hyperbolic_wave_I",
    "build_hyperbolic_wave_II",
    "eigen_fields_3",
    "eigen_fields_5",
    "gaussian_contact_source",
    "CompositeProfile",
    "build_composite",
    "eulerian_to_lagrangian",
    "lagrangian_to_eulerian",
    "superpose",
]
