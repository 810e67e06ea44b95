"""Exception hierarchy shared by every numerical route."""


class GwmError(Exception):
    """Base class for all errors raised by gwmax."""


class DomainError(GwmError, ValueError):
    """An argument lies outside the domain of the requested routine."""


class PoleAtOne(DomainError):
    """Zeta-type function evaluated at its pole s = 1."""


class BatemanInvalid(DomainError):
    """The ln z expansion of Lerch's transcendent does not apply."""


class BranchError(DomainError):
    """A summand argument falls on a principal branch cut."""


class ToleranceNotMet(GwmError, ArithmeticError):
    """A truncated series could not certify the requested tolerance."""


class RemainderUnbounded(GwmError, ArithmeticError):
    """The Euler-Maclaurin remainder bound could not be evaluated."""


class HorizonTooSmall(GwmError):
    """Monte Carlo horizon cannot certify the truncation target."""


class ConvergenceFailure(GwmError, ArithmeticError):
    """An iterative solver failed to converge."""
