"""Exception types shared across the package."""


class CvqkdError(Exception):
    """Base class for domain and computation errors."""


class ParameterEstimationError(CvqkdError):
    """Worst-case channel bounds collapsed (t - dt <= 0).

    The parameter-estimation sample is too small, or the confidence
    coefficient too large, to certify a positive channel transmission.
    """


class CovarianceError(CvqkdError):
    """Covariance matrix is unphysical (negative discriminant or a
    symplectic eigenvalue below 1 beyond numerical tolerance)."""


class FitError(CvqkdError):
    """FER curve fitting failed (degenerate or insufficient data)."""


class InfeasibleDistributionError(CvqkdError):
    """Degree distribution cannot be realized at the requested size."""


class NoFeasiblePointError(CvqkdError):
    """No modulation variance satisfies the efficiency constraint."""


class ConfigError(CvqkdError):
    """Run configuration is missing keys or fails to parse."""
