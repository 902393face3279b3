"""Exception hierarchy.

Every failure raised by the library is either a precondition violation (bad
input, point outside a domain, ...) or a numerical failure (non-convergence,
failed certificate, ...). The CLI maps the two families to distinct exit codes.
"""


class K3PeriodError(Exception):
    """Base class for all library errors."""


class PreconditionError(K3PeriodError, ValueError):
    """Input does not satisfy the documented preconditions."""


class DomainError(PreconditionError):
    """A point or line lies outside the required domain."""


class DegenerateError(PreconditionError):
    """Dependent vectors, degenerate forms or isotropic directions."""


class NumericalError(K3PeriodError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""


class ConvergenceError(NumericalError):
    pass


class CertificateError(NumericalError):
    """A sampled positivity certificate or link verification failed."""


class CalibrationError(NumericalError):
    """A quantity expected to be constant varied beyond tolerance."""


class InfeasibleError(NumericalError):
    """No strict witness realizes the requested sign data."""


class BudgetExceededError(NumericalError):
    """A constructive procedure ran out of its step or disk budget."""
