"""Exception types shared across the package.

The hierarchy mirrors how the command line tool maps failures to exit
codes: bad configuration, bad input data, and numerical degeneracy are
distinct classes of error.
"""


class NpmixcureError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(NpmixcureError):
    """Invalid configuration (bad flag value, malformed grid spec, ...)."""


class DataError(NpmixcureError):
    """Input data cannot be parsed or fails validation."""


class EstimationError(NpmixcureError):
    """An estimator cannot be computed from the given sample."""


class EmptyNeighborhoodError(EstimationError):
    """All kernel weights vanish at the evaluation point."""


class NoUncensoredError(EstimationError):
    """The sample contains no uncensored observation."""


class DegenerateCureError(EstimationError):
    """The estimated probability of being uncured is zero."""


class SupportGuardError(EstimationError):
    """An evaluation point lies outside the numerically safe support."""
