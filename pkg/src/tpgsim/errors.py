"""Exception hierarchy.

Validation problems (bad configuration, misuse of an operation) and numerical
problems (truncation, failed convergence) are kept on separate branches so the
CLI can map them to distinct exit codes.
"""


class TpgError(Exception):
    """Base class for everything raised on purpose by this package."""


class ConfigError(TpgError):
    """Invalid configuration value or an inconsistent spec/layout combination."""


class UsageError(TpgError):
    """An operation was called with arguments outside its contract."""


class TruncationError(TpgError):
    """A Fock cutoff is too small for the requested computation."""

    def __init__(self, message, mode=None, suggested_cutoff=None):
        super().__init__(message)
        self.mode = mode
        self.suggested_cutoff = suggested_cutoff


class NumericalError(TpgError):
    """A numerical routine failed to meet its tolerance (norm drift, bad spectrum)."""


class UnphysicalCovarianceError(NumericalError):
    """Covariance matrix violates the uncertainty bound beyond tolerance."""


class InvalidStateError(TpgError):
    """A state object violates its invariants (norm, trace, hermiticity)."""


class ResolutionError(TpgError):
    """A phase-space or quadrature grid is too coarse or too narrow."""


class DegenerateConditioningError(TpgError):
    """Conditioning variance collapsed; gain optimization is ill-posed."""


class UnderflowError_(TpgError):
    """Outcome probability density underflowed (projection too far in the tail)."""
