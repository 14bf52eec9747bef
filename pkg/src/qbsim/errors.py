"""Exception taxonomy for the simulator.

Every failure mode callers are expected to distinguish gets its own class;
all inherit from QbsimError so scripts can catch the lot in one clause.
"""


class QbsimError(Exception):
    """Base class for all simulator errors."""


class InvalidCutoffError(QbsimError):
    """Photon cutoff out of range (n_max must be >= 1)."""


class InvalidLevelError(QbsimError):
    """Unknown electronic level label or index for a site."""


class DimensionMismatchError(QbsimError):
    """Operators or states built at different cutoffs were combined."""


class DomainError(QbsimError, ValueError):
    """Scalar argument outside its physical domain."""


class InvalidRateError(QbsimError, ValueError):
    """Negative or non-finite rate constant."""


class NonUniqueSteadyStateError(QbsimError):
    """Generator kernel is not one-dimensional."""

    def __init__(self, kernel_dim: int, message: str | None = None):
        self.kernel_dim = kernel_dim
        super().__init__(message or f"generator kernel has dimension {kernel_dim}, expected 1")


class NumericalFailureError(QbsimError):
    """Propagation or linear algebra failed beyond recoverable tolerance."""


class ResonanceNotBracketedError(QbsimError):
    """Branch energy never crosses the target inside the scan range."""


class AmbiguousLabelingError(QbsimError):
    """Degenerate branch energies prevent a stable LP/MP/UP/T assignment."""

    def __init__(self, candidates, message: str | None = None):
        self.candidates = tuple(candidates)
        super().__init__(message or f"degenerate branches at energies {self.candidates}")


class UnderdeterminedFitError(QbsimError):
    """Fewer independent data than free parameters."""


class InsufficientDataError(QbsimError):
    """Too few samples inside the requested window."""


class FitDomainError(QbsimError, ValueError):
    """Data outside the domain of the fit transform (e.g. log of <= 0)."""


class IncompleteScenarioError(QbsimError):
    """Trajectory lacks a phase required by the requested metric."""


class PreconditionViolationError(QbsimError):
    """A documented physical precondition does not hold."""


class ObjectiveEvaluationError(QbsimError):
    """Objective returned a non-finite value during optimization."""

    def __init__(self, point, value, message: str | None = None):
        self.point = point
        self.value = value
        super().__init__(message or f"objective returned {value!r} at {point!r}")


class ConfigError(QbsimError, ValueError):
    """Malformed or out-of-schema run configuration."""


class RwaValidityWarning(UserWarning):
    """Couplings large enough that the rotating-wave form is questionable."""
