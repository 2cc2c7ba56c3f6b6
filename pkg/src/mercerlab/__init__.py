"""Numerical laboratory for Jensen-Mercer operator inequalities.

Evaluates the operator Jensen-Mercer inequality, its curvature-corrected and
log-convexity refinements, and quasi-arithmetic Mercer means on dense
Hermitian matrices with unital families of positive linear maps, rendering
PSD-order verdicts with eigenvalue witnesses.
"""

from .errors import (
    ArityMismatch,
    BadWeights,
    BudgetExhausted,
    DimensionMismatch,
    DomainMismatch,
    DuplicatePoints,
    FunctionDomainError,
    HypothesisNotMet,
    InvalidInterval,
    InverseDomainError,
    MercerLabError,
    MissingSecondDerivative,
    NonHermitianInput,
    NonpositiveFunction,
    OutOfInterval,
    SingularNormalizer,
    SpectrumOutOfDomain,
)
from .functions import (
    CurvatureBounds,
    ScalarFunction,
    curvature_bounds,
    inverse_entry,
    is_log_convex_on,
    loewner_matrix_diagnostic,
    parse_function_spec,
    refined_vs_geometric_gap,
)
from .linalg import (
    HermitianOperator,
    OrderVerdict,
    Relation,
    SpectralBounds,
    SpectralDecomposition,
    apply_scalar_function,
    apply_to_spectrum,
    default_order_tolerance,
    loewner_compare,
    spectral_decompose,
    spectrum_range,
)
from .maps import (
    Compression,
    MapFamily,
    Pinching,
    PositiveLinearMap,
    ScaledSum,
    WeightedTrace,
    apply_map,
    family_sum,
    normalize_family,
    unitality_defect,
)
from .mercer import (
    InequalityReport,
    MercerInstance,
    chain_middle,
    chord,
    chord_reflected,
    contract_pairs,
    diamond_plain,
    evaluate_chain,
    log_convex_middle,
    mercer_lhs,
    mercer_rhs_classic,
    refined_bounds,
    scalar_mercer_check,
)
from .quasimeans import (
    QuasiArithmeticSpec,
    compare_means,
    curvature_bound_expected_relation,
    curvature_mean_bound,
    diamond_phi,
    incomparability_probe,
    log_convex_mean_sandwich,
    mercer_quasi_mean,
    predicted_mean_relation,
    resolve_spec,
)
from .sampling import generator, haar_unitary, random_hermitian, random_unital_family, trial_seed

__version__ = "0.1.0"
