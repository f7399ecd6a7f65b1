"""Simulation and drift estimation for a two-factor affine diffusion: a
square-root (CIR) factor Y driving the volatility of a mean-reverting
factor X.  Simulate paths, reduce them to sufficient statistics, evaluate
the closed-form likelihood and least-squares drift estimators, their
asymptotic covariances, and Monte Carlo checks of consistency and
asymptotic normality."""

__version__ = "0.1.0"

from .errors import (
    AffineError,
    DegenerateDenominator,
    DegenerateMoments,
    InvalidGrid,
    InvalidParams,
    LengthMismatch,
    NegativeY0,
    NonpositiveY,
    NotSubcritical,
    StepTooLarge,
    TruncationTooShort,
)
from .model import (
    Criticality,
    ModelParams,
    StationaryMoments,
    classify,
    mean_at,
    riccati_v,
    stationary_char,
    stationary_moments_closed,
)
from .simulate import (
    GridSpec,
    RngStream,
    SamplePath,
    Scheme,
    read_path_csv,
    simulate,
    simulate_stationary_start,
    write_path_csv,
)
from .pathstats import (
    SufficientStats,
    ito_x_dx,
    stieltjes_sum,
    sufficient_stats,
    sufficient_stats_prefix,
    time_integral,
)
from .estimators import (
    LseFull,
    MleFull,
    loglik,
    lse_discrete,
    lse_full,
    lse_theta_known_m,
    mle_full,
    mle_theta_known_m,
)
from .asymptotics import (
    LseCovariance,
    MleCovariance,
    hybrid_moments,
    moments_by_simulation,
    sigma_lse,
    sigma_mle,
    theta_lse_variance_known_m,
    theta_mle_variance_known_m,
    variance_orderings,
)
from .experiment import (
    ESTIMATOR_NAMES,
    ExperimentConfig,
    ExperimentReport,
    run_consistency,
    run_normality,
)
