"""Gradient flow of curvature energies on open planar curves.

Simulates the L2 gradient flow of bending-plus-length energies under
clamped and navier boundary conditions, catalogs the stationary curves
reachable below an energy budget, and verifies the convergence
structure of the flow against that catalog.
"""

from ._kernels import BACKEND
from .catalog import (
    EquilibriumRecord,
    OrbitParams,
    chord_vectors,
    energy_blowup_check,
    find_clamped_equilibria,
    find_navier_equilibria,
    kappa_extremes,
    partial_periods,
    period_L,
    reconstruct,
    write_catalog,
)
from .curve import (
    DiscreteCurve,
    curvature,
    hausdorff_distance,
    resample_arclength,
    sobolev_norm,
    tangent_normal,
)
from .energy import (
    EnergyParams,
    EnergyReport,
    coercivity_check,
    coercivity_constant,
    energy,
    first_variation_check,
    potential_F,
    velocity_field,
)
from .errors import (
    ElasticaError,
    InvalidInputError,
    NumericError,
    OutOfDomainError,
    PreconditionError,
    StagnationError,
    StepFailureError,
)
from .flow import (
    BoundarySpec,
    FlowState,
    Trajectory,
    bc_residual,
    energy_decay_residual,
    evolution_identity_residuals,
    run,
    step,
    write_run,
)
from .monitor import (
    ConvergenceVerdict,
    distance_to_set,
    lipschitz_estimate,
    verdict,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundarySpec",
    "ConvergenceVerdict",
    "DiscreteCurve",
    "ElasticaError",
    "EnergyParams",
    "EnergyReport",
    "EquilibriumRecord",
    "FlowState",
    "InvalidInputError",
    "NumericError",
    "OrbitParams",
    "OutOfDomainError",
    "PreconditionError",
    "StagnationError",
    "StepFailureError",
    "Trajectory",
    "bc_residual",
    "chord_vectors",
    "coercivity_check",
    "coercivity_constant",
    "curvature",
    "distance_to_set",
    "energy",
    "energy_blowup_check",
    "energy_decay_residual",
    "evolution_identity_residuals",
    "find_clamped_equilibria",
    "find_navier_equilibria",
    "first_variation_check",
    "hausdorff_distance",
    "kappa_extremes",
    "lipschitz_estimate",
    "partial_periods",
    "period_L",
    "potential_F",
    "reconstruct",
    "resample_arclength",
    "run",
    "sobolev_norm",
    "step",
    "tangent_normal",
    "velocity_field",
    "verdict",
    "write_catalog",
    "write_run",
]
