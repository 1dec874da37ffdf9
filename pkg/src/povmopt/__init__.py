"""Minimum-error quantum measurement optimization with gap certificates.

Computes optimal discrimination measurements for prior-weighted state
ensembles by a monotone fixed-point iteration, and certifies how far any
given measurement is from optimal via two-sided bounds on the success
probability gap.
"""

from .errors import (
    DimensionError,
    NumericalError,
    PreconditionError,
    ValidationError,
)
from .linalg import (
    SpectralDecomposition,
    eigh,
    is_psd,
    operator_norm,
    positive_part,
    positive_projection,
    real_part,
    trace_norm,
)
from .model import (
    Ensemble,
    Povm,
    ValidationReport,
    lagrange_operator,
    shifted_basis_ensemble,
    shifted_basis_povm,
    square_root_measurement,
    success_probability,
    uniform_povm,
    validate_ensemble,
    validate_povm,
)
from .optimality import (
    DEFAULT_P_GRID,
    GapCertificate,
    ResidualReport,
    check_optimal,
    gap_lower_bound,
    gap_upper_bound,
    p_dimension_projector,
    residuals,
)
from .iteration import (
    IterationConfig,
    IterationTrace,
    StepRecord,
    bc_modification,
    iterate_step,
    run,
)
from .oracles import (
    ConvergedOperatorReport,
    certify_converged_L,
    helstrom_two_state,
    qubit_grid_search,
)

__version__ = "0.1.0"

__all__ = [
    "DimensionError",
    "NumericalError",
    "PreconditionError",
    "ValidationError",
    "SpectralDecomposition",
    "eigh",
    "is_psd",
    "operator_norm",
    "positive_part",
    "positive_projection",
    "real_part",
    "trace_norm",
    "Ensemble",
    "Povm",
    "ValidationReport",
    "lagrange_operator",
    "shifted_basis_ensemble",
    "shifted_basis_povm",
    "square_root_measurement",
    "success_probability",
    "uniform_povm",
    "validate_ensemble",
    "validate_povm",
    "DEFAULT_P_GRID",
    "GapCertificate",
    "ResidualReport",
    "check_optimal",
    "gap_lower_bound",
    "gap_upper_bound",
    "p_dimension_projector",
    "residuals",
    "IterationConfig",
    "IterationTrace",
    "StepRecord",
    "bc_modification",
    "iterate_step",
    "run",
    "ConvergedOperatorReport",
    "certify_converged_L",
    "helstrom_two_state",
    "qubit_grid_search",
    "__version__",
]
