"""Minimal phase-space energies of distributions under affine maps.

The package computes how much potential energy a nonnegative phase-space
distribution can shed under affine coordinate changes whose linear part is
either volume preserving or symplectic, together with the discrete
rearrangement floor on lattices and randomized verification tools.
"""

from .distributions import (
    BallIndicator,
    Distribution,
    EllipsoidIndicator,
    Gaussian,
    Grid,
    Mixture,
    Moments,
    Particles,
    QuadraticPotential,
    ball_volume,
    density,
    moment_energy,
    moments,
    potential_energy,
    rasterize,
    sphere_surface_area,
    translate,
)
from .energy import (
    AffineMap,
    BumpOnTailSplit,
    EnergyReport,
    bump_on_tail_1d,
    degenerate_limit,
    linear_gardner_energy,
    linear_gromov_energy,
    sl_optimal_map,
    sp_optimal_map,
    symplectic_rotation,
    verify_map_optimality,
)
from .errors import (
    CellCapExceeded,
    DegenerateMoments,
    DimensionError,
    EmptyDistribution,
    NotPositiveDefinite,
    NotSemidefinite,
    NumericalInstability,
    PhaseMinError,
    SchemaError,
)
from .linalg import (
    EigenDecomposition,
    is_symplectic,
    pd_power,
    sym_eig,
    symmetrize,
    symplectic_form,
    symplectic_residual,
)
from .restack import (
    RestackProblem,
    RestackResult,
    restack,
    restack_convergence,
    restack_grid,
)
from .verify import (
    NonsqueezeSearch,
    SymplecticSampler,
    TraceMinimumCheck,
    check_trace_minimum,
    cylinder_contains,
    cylinder_necessary_conditions,
    ellipsoid_cylinder_energy,
    ellipsoids_equivalent,
    expm_batch,
    nonsqueeze_search,
    random_spd,
    sample_symplectic,
)
from .williamson import (
    WilliamsonDecomposition,
    symplectic_eigenvalues,
    williamson,
)

__version__ = "0.1.0"

__all__ = [
    "AffineMap",
    "BallIndicator",
    "BumpOnTailSplit",
    "CellCapExceeded",
    "DegenerateMoments",
    "DimensionError",
    "Distribution",
    "EigenDecomposition",
    "EllipsoidIndicator",
    "EmptyDistribution",
    "EnergyReport",
    "Gaussian",
    "Grid",
    "Mixture",
    "Moments",
    "NonsqueezeSearch",
    "NotPositiveDefinite",
    "NotSemidefinite",
    "NumericalInstability",
    "Particles",
    "PhaseMinError",
    "QuadraticPotential",
    "RestackProblem",
    "RestackResult",
    "SchemaError",
    "SymplecticSampler",
    "TraceMinimumCheck",
    "WilliamsonDecomposition",
    "ball_volume",
    "bump_on_tail_1d",
    "check_trace_minimum",
    "cylinder_contains",
    "cylinder_necessary_conditions",
    "degenerate_limit",
    "density",
    "ellipsoid_cylinder_energy",
    "ellipsoids_equivalent",
    "expm_batch",
    "is_symplectic",
    "linear_gardner_energy",
    "linear_gromov_energy",
    "moment_energy",
    "moments",
    "nonsqueeze_search",
    "pd_power",
    "potential_energy",
    "random_spd",
    "rasterize",
    "restack",
    "restack_convergence",
    "restack_grid",
    "sample_symplectic",
    "sl_optimal_map",
    "sp_optimal_map",
    "sphere_surface_area",
    "sym_eig",
    "symmetrize",
    "symplectic_eigenvalues",
    "symplectic_form",
    "symplectic_residual",
    "symplectic_rotation",
    "translate",
    "verify_map_optimality",
    "williamson",
]
