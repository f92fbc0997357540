"""Certified two-sided l^p operator-norm bounds for nonnegative
upper-triangular Toeplitz operators, with Hardy-type q-inequality
verification."""

from .core import (
    Exponent,
    QParam,
    ToleranceConfig,
    TruncatedSequence,
    compensated_sum,
    conjugate_exponent,
    lp_norm,
)
from .operators import (
    ToeplitzKernel,
    TruncatedMatrix,
    apply_cesaro,
    apply_qhardy_direct,
    apply_toeplitz,
    cesaro_section,
    materialize,
    q_hardy_kernel,
)
from .qcalc import (
    GridFunction,
    HardyParams,
    default_truncation,
    discrete_form_sides,
    hardy_integral_sides,
    jackson_integral,
    q_bracket,
    reduce_to_discrete,
)
from .certify import (
    InequalityReport,
    NormCertificate,
    PowerIterationResult,
    SchurWeights,
    best_possibility_search,
    certify_norm,
    indicator_witness,
    power_iteration_lower_bound,
    schur_bound,
    toeplitz_schur_bound,
    verify_discrete_inequality,
)

__version__ = "0.1.0"
