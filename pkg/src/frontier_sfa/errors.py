"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: DataError -> 1,
EstimationError (and subclasses) -> 2, ConfigError -> 3.
"""


class FrontierError(Exception):
    """Base class for all package errors."""


class DataError(FrontierError):
    """Malformed input files, empty samples, or violated data invariants."""


class ParameterError(FrontierError):
    """Invalid frontier parameter vector (non-finite, out of domain, or
    inconsistent with the model specification)."""


class EstimationError(FrontierError):
    """Estimation failed: rank-deficient design, non-convergence, or a
    non-finite likelihood."""


class InferenceError(EstimationError):
    """Standard errors unavailable: Hessian not negative definite at the
    reported optimum."""

    def __init__(self, message, eigenvalues=None, condition_number=None):
        super().__init__(message)
        self.eigenvalues = eigenvalues
        self.condition_number = condition_number


class OracleError(FrontierError):
    """A numerical oracle (quadrature or Monte Carlo) failed to reach its
    required accuracy."""


class ConfigError(FrontierError):
    """Invalid run configuration: unknown keys, unparseable values, or
    unresolvable paths."""
