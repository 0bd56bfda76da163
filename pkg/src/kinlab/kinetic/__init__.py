from .velocity import VelocityGrid, QuadratureValidationError, gaussian_moments, reduced_maxwellian
from .solver import (
    CorruptedState,
    MacroFields,
    PositivityError,
    ReducedKineticState,
    conserved_totals,
    maxwellian_state,
    moments,
    relax_exact,
    run,
    step,
    transport_sweep,
)
from .projection import (
    VelocityQuadrature3D,
    collision_invariant_moments,
    gram_matrix,
    macro_micro_project,
    maxwellian_3d,
    micro_distance,
    micro_part_norm,
    projection_basis,
)

__all__ = [
    "VelocityGrid",
    "QuadratureValidationError",
    "gaussian_moments",
    "reduced_maxwellian",
    "CorruptedState",
    "MacroFields",
    "PositivityError",
    "ReducedKineticState",
    "conserved_totals",
    "maxwellian_state",
    "moments",
    "relax_exact",
    "run",
    "step",
    "transport_sweep",
    "VelocityQuadrature3D",
    "collision_invariant_moments",
    "gram_matrix",
    "macro_micro_project",
    "maxwellian_3d",
    "micro_distance",
    "micro_part_norm",
    "projection_basis",
]
