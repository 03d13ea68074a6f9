"""Desk-scale workbench for commutator cocycle spaces over finite tracial
matrix algebras: trace representations, trace-weighted dimensions of
invariant Hilbert-Schmidt subspaces, dual operators for prescribed
derivations, spectral clamp experiments, and group-algebra inputs."""

__version__ = "0.1.0"

from .algebra import (
    GnsStructure,
    TracialAlgebra,
    build_algebra,
    generation_check,
    gns_structure,
)
from .cocycles import (
    DeltaReport,
    cocycle_map,
    compute_H0,
    compute_H1,
    compute_H2,
    delta_report,
)
from .cutoff import (
    CutoffFamily,
    ScalarFamily,
    apply_cutoff,
    commutator_identity_check,
    convergence_sweep,
    cutoff_eval,
    matrix_function,
    quotient_eval,
    spectral_radius,
)
from .derivations import (
    DerivationSpec,
    DualOperatorReport,
    antisymmetrize,
    antisymmetrize_identity_residual,
    conjugate_variable,
    construct_dual_operator,
    derivation_well_defined,
    fisher_report,
    inner_spec,
    phi_star,
)
from .errors import (
    CenterResolutionError,
    ChainViolation,
    ComputationError,
    ConfigError,
    FreedimError,
    IllDefined,
    IntegralityError,
    NotGenerating,
    NotGeneratingSet,
    NotInvariant,
    NotSelfAdjoint,
    ResidualTooLarge,
    ShapeMismatch,
    TooLarge,
    UnsupportedFormat,
    WeightError,
)
from .groups import (
    BettiInput,
    FiniteGroupTable,
    SchreierGraph,
    betti_delta_formula,
    counterexample_report,
    cyclic_group,
    direct_product,
    from_mult_table,
    permutation_from_cycles,
    regular_rep_algebra,
    schreier_graph,
    schreier_rank,
    symmetric_element_index,
    symmetric_group,
    word_str,
)
from .vndim import (
    CentralDecomposition,
    HsSubspace,
    VnDimensionReport,
    central_decomposition,
    hs_subspace,
    invariant_closure,
    numerical_span,
    subspace_distance,
    vn_dimension,
    vn_dimension_report,
)

__all__ = [name for name in dir() if not name.startswith("_")]
