"""Exception hierarchy shared by the numerical and combinatorial modules."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class ConstraintError(ValueError):
    """Parameters do not satisfy the linear constraint a summation identity needs."""


class PoleError(ArithmeticError):
    """A gamma function or series denominator hits a pole."""


class SeriesNonConvergence(ArithmeticError):
    """A series failed to converge within its term budget (or cannot converge)."""


class SeriesDivergence(SeriesNonConvergence):
    """A hypergeometric series with p > q + 1 that does not terminate."""


class RangeError(ArithmeticError):
    """A computed probability fell outside [-eps, 1 + eps]."""


class QuadratureError(ArithmeticError):
    """Quadrature did not reach the requested tolerance.

    The best-effort value and its error estimate are attached.
    """

    def __init__(self, message, value, abs_error_estimate, evaluations):
        super().__init__(message)
        self.value = value
        self.abs_error_estimate = abs_error_estimate
        self.evaluations = evaluations


class BudgetExceeded(ValueError):
    """A brute-force enumeration would exceed its configured size budget."""


class IntegralityError(ArithmeticError):
    """An exact quantity that must be an integer came out non-integral."""
