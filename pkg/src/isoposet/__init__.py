"""Computational toolkit for partial-isometry posets and 2-nest operator spaces.

Finite-dimensional (C^d) implementations of: the Halmos-McLaughlin order
with infima, suprema, and complete covers; the operator space attached to
a chain of partial isometries, with the algebra / left-ideal criterion
and constructive counterexamples; rank-one membership and finite-rank
decomposition; and minimal-norm interpolation ``T x = y`` / ``T* x = y``
with certified optimal constants.
"""

from . import errors
from .finite_rank import (
    Decomposition,
    RankOne,
    canonical_rank_representation,
    decompose_finite_rank,
    e_minus,
    rank_one_membership,
)
from .interpolation import (
    InterpolationSolution,
    InterpolationWorkspace,
    TailData,
    TriangularResult,
    adjoint_bound,
    chain_bound,
    chain_interpolate,
    chain_interpolate_adjoint,
    tail_constant,
    triangular_interpolate,
)
from .linalg import (
    DEFAULT_TOL,
    MAX_DIM,
    Subspace,
    Tolerances,
    inner,
    matrix_eq,
    numerical_rank,
    orthonormal_kernel,
    orthonormal_range,
    spectral_norm,
    subspace_intersection,
    subspace_leq,
    svd_factor,
)
from .matrixio import (
    MatrixFile,
    NamedMatrix,
    Report,
    parse_matrix_file,
    write_matrix_file,
)
from .pisom import (
    PartialIsometry,
    PowerPIReport,
    complete_cover,
    hm_leq,
    hw_invariants,
    infimum,
    partial_isometry_residuals,
    supremum,
    validate_partial_isometry,
    zero_isometry,
)
from .randomgen import haar_unitary, random_chain, random_partial_isometry
from .twonest import (
    AlgebraReport,
    Chain,
    MembershipReport,
    XYWitness,
    algebra_criterion,
    build_chain,
    counterexample_xy,
    membership,
    project_onto_nest_algebra,
    project_onto_space,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraReport",
    "Chain",
    "DEFAULT_TOL",
    "Decomposition",
    "InterpolationSolution",
    "InterpolationWorkspace",
    "MAX_DIM",
    "MatrixFile",
    "MembershipReport",
    "NamedMatrix",
    "PartialIsometry",
    "PowerPIReport",
    "RankOne",
    "Report",
    "Subspace",
    "TailData",
    "Tolerances",
    "TriangularResult",
    "XYWitness",
    "adjoint_bound",
    "algebra_criterion",
    "build_chain",
    "canonical_rank_representation",
    "chain_bound",
    "chain_interpolate",
    "chain_interpolate_adjoint",
    "complete_cover",
    "counterexample_xy",
    "decompose_finite_rank",
    "e_minus",
    "errors",
    "haar_unitary",
    "hm_leq",
    "hw_invariants",
    "infimum",
    "inner",
    "matrix_eq",
    "membership",
    "numerical_rank",
    "orthonormal_kernel",
    "orthonormal_range",
    "parse_matrix_file",
    "partial_isometry_residuals",
    "project_onto_nest_algebra",
    "project_onto_space",
    "random_chain",
    "random_partial_isometry",
    "rank_one_membership",
    "spectral_norm",
    "subspace_intersection",
    "subspace_leq",
    "supremum",
    "svd_factor",
    "tail_constant",
    "triangular_interpolate",
    "validate_partial_isometry",
    "write_matrix_file",
    "zero_isometry",
]
