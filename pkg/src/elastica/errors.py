"""Exception hierarchy shared by all modules."""


class ElasticaError(Exception):
    """Base class for all library errors."""


class InvalidInputError(ElasticaError):
    """Malformed or degenerate input (bad curve, bad exponent, empty catalog)."""


class OutOfDomainError(ElasticaError):
    """A parameter lies outside the mathematical domain of the operation."""


class PreconditionError(ElasticaError):
    """A documented precondition was violated by the caller."""


class NumericError(ElasticaError):
    """A numerical procedure failed to reach its accuracy target."""


class StepFailureError(ElasticaError):
    """A flow step produced NaNs or an unsolvable linear system.

    Carries the last good state so a caller can inspect or restart.
    """

    def __init__(self, message, state=None, time=None):
        super().__init__(message)
        self.state = state
        self.time = time


class StagnationError(ElasticaError):
    """Adaptive step-size control drove dt below the useful range."""
