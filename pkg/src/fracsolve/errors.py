"""Exception types raised across the package.

Everything derives from FracsolveError so callers can catch broadly; the
concrete classes exist because tests and user code want to distinguish a
malformed problem from a numerical breakdown.
"""


class FracsolveError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(FracsolveError, ValueError):
    """State, order and initial-condition shapes do not agree."""


class NonPositiveOrder(FracsolveError, ValueError):
    """A differentiation order that must be positive is not."""


class NonPositiveExponent(FracsolveError, ValueError):
    """Mittag-Leffler alpha (or gamma) must be positive."""


class EmptyTimeSpan(FracsolveError, ValueError):
    """Time span is empty or inverted, or dt does not fit into it."""


class LengthMismatch(FracsolveError, ValueError):
    """Paired coefficient/order vectors differ in length."""


class ZeroLeadingCoefficient(FracsolveError, ValueError):
    """Multi-term equation whose highest-order coefficient vanishes."""


class MissingInitialConditions(FracsolveError, ValueError):
    """Fewer initial derivative values than ceil(max order) requires."""


class PoleError(FracsolveError, ValueError):
    """Gamma evaluated at a non-positive integer."""


class NonConvergence(FracsolveError, ArithmeticError):
    """A special-function regime failed its internal error estimate."""


class SingularMomentSystem(FracsolveError, ArithmeticError):
    """Starting-weight moment system could not be factorized."""


class NewtonFailed(FracsolveError, ArithmeticError):
    """Newton iteration hit its iteration cap without converging."""


class SingularJacobian(FracsolveError, ArithmeticError):
    """Newton linear solve met a numerically singular matrix."""


class NonCommensurate(FracsolveError, ValueError):
    """A method restricted to equal orders got distinct ones."""


class NoExactSolution(FracsolveError, ValueError):
    """Error measurement requested for a case without an analytical solution."""
