"""Finite-size secret key rates for Gaussian-modulated CV-QKD, with joint
optimization of the modulation variance and the error-correction code."""

from .core import (
    ChannelParams,
    FiniteSizeConfig,
    Protocol,
    SkrBreakdown,
    WorstCaseBounds,
    delta_n,
    finite_size_bounds,
    holevo_bound,
    mutual_information,
    nominal_bounds,
    reconciliation_efficiency,
    skr_finite,
    snr,
)
from .errors import (
    ConfigError,
    CovarianceError,
    CvqkdError,
    FitError,
    InfeasibleDistributionError,
    NoFeasiblePointError,
    ParameterEstimationError,
)
from .fer import (
    FerMeasurementSet,
    FerModel,
    FitResult,
    GaussianComponent,
    ReanchoredFer,
    eval_fer,
    fit_fer,
    reanchor_to_snr,
)
from .optimize import (
    CodeChoice,
    MethodComparison,
    OptimizationResult,
    ReoptimizationReport,
    SweepRow,
    compare_methods,
    optimize_va,
    reoptimize_live,
    select_code,
    sweep,
)
from . import presets, recon

__version__ = "0.1.0"

__all__ = [
    "ChannelParams",
    "FiniteSizeConfig",
    "Protocol",
    "SkrBreakdown",
    "WorstCaseBounds",
    "delta_n",
    "finite_size_bounds",
    "holevo_bound",
    "mutual_information",
    "nominal_bounds",
    "reconciliation_efficiency",
    "skr_finite",
    "snr",
    "FerModel",
    "FerMeasurementSet",
    "FitResult",
    "GaussianComponent",
    "ReanchoredFer",
    "eval_fer",
    "fit_fer",
    "reanchor_to_snr",
    "OptimizationResult",
    "MethodComparison",
    "CodeChoice",
    "ReoptimizationReport",
    "SweepRow",
    "optimize_va",
    "sweep",
    "compare_methods",
    "select_code",
    "reoptimize_live",
    "presets",
    "recon",
    "CvqkdError",
    "ConfigError",
    "CovarianceError",
    "FitError",
    "InfeasibleDistributionError",
    "NoFeasiblePointError",
    "ParameterEstimationError",
]
