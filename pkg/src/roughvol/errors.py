"""Exception hierarchy shared by the numerical modules."""


class RoughVolError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RoughVolError, ValueError):
    """An argument lies outside the domain of the operation."""


class NotPositiveDefinite(RoughVolError, ArithmeticError):
    """Cholesky factorisation failed even after the maximum diagonal jitter."""


class ImpliedVolError(RoughVolError, ArithmeticError):
    """Implied volatility inversion failed."""


class BelowIntrinsic(ImpliedVolError):
    pass


class AboveSpot(ImpliedVolError):
    pass


class NoConvergence(RoughVolError, ArithmeticError):
    pass


class EmptyBatch(RoughVolError, ValueError):
    pass


class QuadratureError(RoughVolError, ArithmeticError):
    pass


class InsufficientSignal(RoughVolError):
    """Fewer than four decay points are resolvable above Monte Carlo noise."""
