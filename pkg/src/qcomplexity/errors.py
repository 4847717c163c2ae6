"""Exception hierarchy shared by every module."""


class QComplexityError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(QComplexityError, ValueError):
    pass


class DegenerateTruncationError(QComplexityError):
    """Every singular value fell below the cutoff."""


class DegenerateStateError(QComplexityError):
    pass


class DegenerateProcessError(QComplexityError):
    """No past word survived the probability floor."""


class CapacityError(QComplexityError):
    pass


class InvalidStateError(QComplexityError):
    pass


class InvalidGramError(QComplexityError):
    pass


class ConvergenceError(QComplexityError):
    """An iterative solver stopped before reaching its tolerance.

    ``residual`` holds the best residual seen and ``context`` any
    caller-supplied location info (sweep, site, ...).
    """

    def __init__(self, message, residual=float("nan"), context=None):
        super().__init__(message)
        self.residual = residual
        self.context = dict(context or {})

    def __str__(self):
        base = super().__str__()
        if self.context:
            ctx = ", ".join(f"{k}={v}" for k, v in self.context.items())
            return f"{base} [{ctx}]"
        return base


class ConfigError(QComplexityError):
    pass
