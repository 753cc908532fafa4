"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`SpectralCoverError`, so callers (the CLI in particular) can tell
them apart from programming mistakes.
"""


class SpectralCoverError(Exception):
    """Base class for all package errors."""


class ShapeError(SpectralCoverError, ValueError):
    """Raised when array shapes or lengths are inconsistent."""


class NumericalError(SpectralCoverError):
    """Base class for failures of a numerical procedure on valid input."""


class ConvergenceError(NumericalError):
    """Raised when an iteration does not converge.

    Carries the number of iterations spent and the residual reached.
    """

    def __init__(self, msg, iterations, residual):
        super().__init__(msg)
        self.iterations = iterations
        self.residual = residual


class InterpolationError(NumericalError):
    """Raised when polynomial interpolation cannot be certified.

    ``condition`` is the condition estimate of the interpolation system and
    ``residual`` the relative residual on the held-out nodes (``nan`` when
    the system could not be solved at all).
    """

    def __init__(self, msg, condition, residual=float('nan')):
        super().__init__(msg)
        self.condition = condition
        self.residual = residual


class JointSpectrumError(NumericalError):
    """Raised when simultaneous triangularization cannot be certified."""

    def __init__(self, msg, residual, attempts):
        super().__init__(msg)
        self.residual = residual
        self.attempts = attempts


class CommutativityError(SpectralCoverError, ValueError):
    """Raised when a tuple of matrices fails the commutativity check."""

    def __init__(self, msg, report):
        super().__init__(msg)
        self.report = report


class NotOnHypersurfaceError(SpectralCoverError, ValueError):
    """Raised when a point is not on the hypersurface it should be on."""


class SingularPointError(SpectralCoverError, ValueError):
    """Raised when the gradient vanishes at a point of a hypersurface."""
