"""Exception types raised across the package.

Every error derives from :class:`QslError` so callers can catch the whole
family with one clause; the CLI maps each subclass to a machine-parsable
error code.
"""


class QslError(Exception):
    """Base class for all errors raised by this package."""


class NonHermitian(QslError):
    """Matrix expected to be Hermitian violates the Hermiticity tolerance."""


class NotPSD(QslError):
    """Matrix expected to be positive semidefinite has a forbidden negative eigenvalue."""


class BadDim(QslError):
    """Matrix or vector has the wrong dimensions for the operation."""


class BadMixingParameter(QslError):
    """Mixing weight outside [0, 1]."""


class NotBellDiagonal(QslError):
    """State is not Bell diagonal within tolerance."""


class DomainError(QslError):
    """Scalar argument outside its admissible range."""


class BadParams(QslError):
    """Channel parameters violate their constraints."""


class BadGeometry(QslError):
    """Geometric coupling inputs violate their constraints."""


class BadSteps(QslError):
    """Step count unusable for the fixed-step integrator."""


class IntegrationDiverged(QslError):
    """Integrated state left the physical set beyond the recoverable tolerance."""


class GridMismatch(QslError):
    """Sampled values do not fit the expected uniform time grid."""


class NoDynamics(QslError):
    """Norm averages vanish, so the speed limit time is undefined."""


class UnsupportedScenario(QslError):
    """No closest-state recipe is available for the requested scenario."""


class ParseError(QslError):
    """Configuration text is malformed."""


class ValidationError(QslError):
    """Configuration is well formed but violates a constraint."""
