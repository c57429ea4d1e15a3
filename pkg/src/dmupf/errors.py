"""Exception types shared across the package."""


class DMUPFError(Exception):
    """Base class for all errors raised by :mod:`dmupf`."""


class UsageError(DMUPFError, ValueError):
    """Arguments violate an operation's preconditions."""


class CapacityError(DMUPFError):
    """A size limit (enumeration cap, budget, subset explosion) was exceeded."""


class SingularMatrixError(DMUPFError, ZeroDivisionError):
    pass


class AccessViolation(DMUPFError):
    """A server was asked to answer a user outside its access set."""


class ParamSearchFailed(DMUPFError):
    """No sampled parameter set passed validation within the retry budget."""

    def __init__(self, message, report=None, attempts=0):
        super().__init__(message)
        self.report = report
        self.attempts = attempts
