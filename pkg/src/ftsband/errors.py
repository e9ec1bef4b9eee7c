"""Exception hierarchy shared by all modules."""


class FtsbandError(Exception):
    """Base class for all library errors."""


class InputError(FtsbandError):
    """Malformed user input (CSV rows, negative values under sqrt, ...)."""


class ConfigError(FtsbandError):
    """Invalid or inconsistent run configuration."""


class DimensionError(FtsbandError, ValueError):
    """Shape mismatch between operands."""


class NumericError(FtsbandError):
    """A numerical routine failed (non-convergence, overflow, ...)."""


class SingularSystemError(NumericError):
    """Linear system too ill-conditioned to solve reliably."""


class RankZeroError(NumericError):
    """All eigenvalues fell below the retention threshold."""


class NotPsdError(NumericError):
    """Matrix required to be positive semi-definite is not."""


class DegenerateHullError(NumericError):
    """Fewer than 3 points, or all points collinear."""


class DomainError(FtsbandError, ValueError):
    """Query outside the valid domain (e.g. abscissa outside a hull)."""


class TruncationError(FtsbandError, ValueError):
    """Requested truncation order exceeds the retained rank."""


class StationarityError(FtsbandError, ValueError):
    """Autoregression operator has spectral radius >= 1."""


class IncompatibleOperatorsError(NumericError):
    """Chosen autoregression and covariance operators admit no valid
    innovation covariance (it would not be PSD)."""


class SingularCovarianceError(NumericError):
    """Empirical covariance of the coefficients is numerically singular."""


class ReplicateFailureError(NumericError):
    """A bootstrap replicate kept failing after the retry budget."""


class CalibrationError(FtsbandError):
    """Every candidate in the calibration grid failed to fit."""
