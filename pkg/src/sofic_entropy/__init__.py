"""Finite-level sofic entropy estimates for modules over F_q[G]."""

from .entropy import (
    EntropyEstimate,
    EntropyRecord,
    PartialModulePatch,
    PatchCoverageError,
    PrincipalPresentation,
    RelativeEstimateRecord,
    addition_check,
    assemble_maps,
    folner_entropy,
    free_module_patch,
    principal_estimates,
    quotient_patch,
    relative_estimate,
    zero_divisor_probe,
)
from .expr import ExpressionError, parse_group, parse_matrix, parse_ring_expression
from .field import (
    FieldSpec,
    FqMatrix,
    RankKernelResult,
    ResourceError,
    SparseTriplets,
    apply,
    echelon_rank_kernel,
    rank,
    subspace_dims,
)
from .group import (
    FinitePermGroup,
    FreeGroup,
    GroupMismatchError,
    GroupRingElem,
    GroupRingMatrix,
    IntegerLattice,
    cyclic_group,
    dihedral_group,
    matrix_star,
    ring_add,
    ring_mul,
    star,
    support,
    symmetric_group,
)
from .sofic import (
    Ladder,
    SoficApprox,
    build_finite_regular,
    build_free_random,
    build_lattice_quotient,
    defect_report,
    evaluate,
    good_set,
)

__version__ = "0.1.0"

__all__ = [
    "ExpressionError",
    "parse_group",
    "parse_matrix",
    "parse_ring_expression",
    "EntropyEstimate",
    "EntropyRecord",
    "FieldSpec",
    "FinitePermGroup",
    "FqMatrix",
    "FreeGroup",
    "GroupMismatchError",
    "GroupRingElem",
    "GroupRingMatrix",
    "IntegerLattice",
    "Ladder",
    "PartialModulePatch",
    "PatchCoverageError",
    "PrincipalPresentation",
    "RankKernelResult",
    "RelativeEstimateRecord",
    "ResourceError",
    "SoficApprox",
    "SparseTriplets",
    "addition_check",
    "apply",
    "assemble_maps",
    "build_finite_regular",
    "build_free_random",
    "build_lattice_quotient",
    "cyclic_group",
    "defect_report",
    "dihedral_group",
    "echelon_rank_kernel",
    "evaluate",
    "folner_entropy",
    "free_module_patch",
    "good_set",
    "matrix_star",
    "principal_estimates",
    "quotient_patch",
    "rank",
    "relative_estimate",
    "ring_add",
    "ring_mul",
    "star",
    "subspace_dims",
    "support",
    "symmetric_group",
    "zero_divisor_probe",
]
