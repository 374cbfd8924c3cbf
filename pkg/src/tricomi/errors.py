"""Exception hierarchy shared by all modules."""


class TricomiError(Exception):
    """Base class for every error raised by this package."""


class DomainError(TricomiError, ValueError):
    """Argument outside the domain of the function (pole, wrong sign, ...)."""


class CutError(DomainError):
    """Evaluation on a branch cut without an explicit side of the cut."""


class ConvergenceError(TricomiError, ArithmeticError):
    """A series or iteration hit its hard cap before converging."""


class QuadratureError(TricomiError, ArithmeticError):
    """Numerical integration did not reach the requested accuracy."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class SingularLocusError(DomainError):
    """Kernel evaluated exactly on a curve where it is singular."""


class DegeneracyError(DomainError):
    """Level set with vanishing gradient inside the test-function support."""
