"""Exception types shared across the package."""


class NuboundError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(NuboundError, ValueError):
    """An argument is malformed (non-finite, wrong shape, wrong range)."""


class DegenerateEquationError(InvalidInputError):
    """Both leading coefficients of a quadratic are zero."""


class DomainError(InvalidInputError):
    """An argument lies outside the mathematical domain of the operation."""


class NoStructureError(NuboundError):
    """The potential has neither a positive local minimum nor a positive zero,
    so no expansion point can be chosen automatically (auto_r0)."""


class NoBranchError(NuboundError):
    """No real constant k makes the under-root quadratic a perfect square;
    the problem is not solvable in this normal form."""


class InvalidKError(InvalidInputError):
    """The supplied k does not certify: the under-root quadratic is not a
    perfect square to tolerance."""


class UnsupportedSigmaError(InvalidInputError):
    """The closed-form factor functions are only available for sigma(s)
    proportional to s."""


class IntegrationFailureError(NuboundError):
    """Adaptive quadrature did not reach the requested tolerance within the
    maximum bisection depth."""


class ComplexIndexError(NuboundError):
    """q + 1/4 < 0: the characteristic exponent is complex (supercritical
    inverse-square attraction) and the closed form does not apply."""


class SingularBranchError(NuboundError):
    """The eigenvalue denominator (2n + 1) + 2*sign*sqrt(q + 1/4) vanishes."""


class NonNormalizableError(NuboundError):
    """The requested state is not a bound, normalizable solution."""


class OracleConvergenceError(NuboundError):
    """Grid refinement did not converge.  The best available (unconverged)
    result, if any, is attached as ``partial``."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
