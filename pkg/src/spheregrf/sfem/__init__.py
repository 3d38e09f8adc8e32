"""P1 surface finite elements and SPD solvers."""

from spheregrf.sfem.assembly import (
    FemField,
    FemOperators,
    SparseSymmetricMatrix,
    assemble_mass,
    assemble_stiffness,
    helmholtz_matrix,
    l2_inner,
)
from spheregrf.sfem.solver import (
    CGResult,
    ConvergenceError,
    SolverConfig,
    conjugate_gradient,
    solve_spd,
)

__all__ = [
    "CGResult",
    "ConvergenceError",
    "FemField",
    "FemOperators",
    "SolverConfig",
    "SparseSymmetricMatrix",
    "assemble_mass",
    "assemble_stiffness",
    "conjugate_gradient",
    "helmholtz_matrix",
    "l2_inner",
    "solve_spd",
]
