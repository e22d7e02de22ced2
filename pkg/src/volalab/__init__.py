"""Sign-asymmetric logarithmic volatility models.

Simulation, quasi-maximum-likelihood fitting, stability diagnostics and
symmetry tests for the sign-gated log-GARCH and the EGARCH, plus the
logarithmic duration model obtained by folding durations and trade
directions into one signed series.
"""

__version__ = "0.1.0"

from ._kernels import COMPILED, backend_name
from ._rng import stream
from .data_io import (
    acd_transform,
    floor_small_returns,
    load_series_csv,
    prices_to_log_returns,
    write_series_csv,
)
from .diagnostics import (
    AnyLogMomentCheck,
    CompanionSystem,
    DiagnosticsReport,
    HillEstimate,
    LeverageReport,
    LyapunovEstimate,
    TailReport,
    VectorSystem,
    check_any_log_moment,
    companion_system,
    compute_lambda,
    cramer_condition_catalog,
    diagnose,
    hill_estimate,
    leverage_covariance_11,
    lyapunov_closed_11,
    lyapunov_mc,
    moment_matrix_A,
    moment_matrix_C,
    moment_order_11,
    spectral_radius,
    tail_index_11,
    vector_system,
)
from .errors import (
    CapExceededError,
    CovarianceUnavailableError,
    DegeneracyError,
    EstimationError,
    ExplosionError,
    InvalidInputError,
    NotApplicableError,
    VolalabError,
)
from .estimate import (
    FitOptions,
    FitResult,
    asymptotic_covariance,
    fit_egarch,
    fit_log_garch,
    grad_log_sigma2,
    param_names,
    qmle_objective,
)
from .inference import ComparisonReport, WaldReport, compare_models, wald_symmetry
from .innovations import InnovationSpec, custom, normal, student_t, two_point
from .model import (
    DEFAULT_FLOOR,
    ArmaRep,
    EgarchParams,
    InitPolicy,
    LogGarchParams,
    Series,
    VolPath,
    arma_representation,
    egarch_contraction_margin,
    filter_egarch,
    filter_log_garch,
    lag_poly_roots_outside,
)
from .montecarlo import StudyResult, run_replications
from .simulate import (
    AcdSample,
    ImpactCurves,
    SimConfig,
    impact_curves,
    matched_impact_trio,
    simulate_egarch,
    simulate_log_acd,
    simulate_log_garch,
)

__all__ = [
    "__version__",
    "COMPILED",
    "backend_name",
    "stream",
    "acd_transform",
    "floor_small_returns",
    "load_series_csv",
    "prices_to_log_returns",
    "write_series_csv",
    "AnyLogMomentCheck",
    "CompanionSystem",
    "DiagnosticsReport",
    "HillEstimate",
    "LeverageReport",
    "LyapunovEstimate",
    "TailReport",
    "VectorSystem",
    "check_any_log_moment",
    "companion_system",
    "compute_lambda",
    "cramer_condition_catalog",
    "diagnose",
    "hill_estimate",
    "leverage_covariance_11",
    "lyapunov_closed_11",
    "lyapunov_mc",
    "moment_matrix_A",
    "moment_matrix_C",
    "moment_order_11",
    "spectral_radius",
    "tail_index_11",
    "vector_system",
    "CapExceededError",
    "CovarianceUnavailableError",
    "DegeneracyError",
    "EstimationError",
    "ExplosionError",
    "InvalidInputError",
    "NotApplicableError",
    "VolalabError",
    "FitOptions",
    "FitResult",
    "asymptotic_covariance",
    "fit_egarch",
    "fit_log_garch",
    "grad_log_sigma2",
    "param_names",
    "qmle_objective",
    "ComparisonReport",
    "WaldReport",
    "compare_models",
    "wald_symmetry",
    "InnovationSpec",
    "custom",
    "normal",
    "student_t",
    "two_point",
    "DEFAULT_FLOOR",
    "ArmaRep",
    "EgarchParams",
    "InitPolicy",
    "LogGarchParams",
    "Series",
    "VolPath",
    "arma_representation",
    "egarch_contraction_margin",
    "filter_egarch",
    "filter_log_garch",
    "lag_poly_roots_outside",
    "StudyResult",
    "run_replications",
    "AcdSample",
    "ImpactCurves",
    "SimConfig",
    "impact_curves",
    "matched_impact_trio",
    "simulate_egarch",
    "simulate_log_acd",
    "simulate_log_garch",
]
