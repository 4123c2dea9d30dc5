"""Exception types raised across the package."""


class TaskQuantError(Exception):
    """Base class for all package errors."""


class NonHermitian(TaskQuantError, ValueError):
    pass


class NotPSD(TaskQuantError, ValueError):
    pass


class Singular(TaskQuantError, ArithmeticError):
    pass


class ConvergenceFailure(TaskQuantError, ArithmeticError):
    pass


class DimensionMismatch(TaskQuantError, ValueError):
    pass


class ResolutionTooLow(TaskQuantError, ValueError):
    """The bit budget yields fewer than two levels per real dimension."""


class Infeasible(TaskQuantError, ValueError):
    """No positive ADC support exists for the requested (eta, K_d, M) triple."""


class DegenerateProblem(TaskQuantError, ValueError):
    """Every marginal gain of the power allocation is identically zero."""


class ConfigError(TaskQuantError, ValueError):
    pass
