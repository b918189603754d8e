"""Exception and warning types shared across the package.

Everything numerical that can fail for a *mathematical* reason gets its own
type here, so callers can distinguish "you passed a matrix of the wrong
shape" from "this matrix is singular at working precision" from "you asked
for a value at a pole".  Plain ValueError/TypeError are still used for
garden-variety argument mistakes where no finer distinction helps.
"""


class DimensionError(ValueError):
    """Array arguments have inconsistent or unsupported shapes."""


class SingularMatrixError(ArithmeticError):
    """A factorization hit a pivot that is zero at working precision."""


class PoleError(ArithmeticError):
    """A transcendental map was evaluated too close to one of its poles."""


class CapacityError(ValueError):
    """Request exceeds the sizes this implementation is built for."""


class DomainError(ValueError):
    """A quantity left the domain where the formula is defined (tau <= 0)."""


class GridAlignmentError(ValueError):
    """Time grid is incompatible with the requested block structure."""


class ConfigError(ValueError):
    """A configuration file or override is malformed or inconsistent."""


class EnvelopeWarning(UserWarning):
    """Parameters are outside the regime where the estimator is trusted."""


class DiscretizationWarning(UserWarning):
    """Step-size diagnostics suggest visible time-discretization bias."""
