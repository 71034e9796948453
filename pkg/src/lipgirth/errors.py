"""Exception hierarchy shared by every stage of the pipeline."""


class LipgirthError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(LipgirthError, ValueError):
    """Infeasible or out-of-range parameters."""


class GenerationError(LipgirthError, RuntimeError):
    """A random generator exhausted its retry budget."""


class ResourceCapError(LipgirthError, RuntimeError):
    """An enumeration exceeded its configured cap."""

    def __init__(self, message, cap=None, reached=None):
        super().__init__(message)
        self.cap = cap
        self.reached = reached


class NumericError(LipgirthError, ArithmeticError):
    """An iterative numerical method did not converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NonTerminationError(LipgirthError, RuntimeError):
    """A resampling or round-based process hit its cap; ``stats`` holds the partial run."""

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats


class PreconditionError(LipgirthError, ValueError):
    """An operation's documented precondition does not hold."""


class SurgeryError(PreconditionError):
    """A path surgery was requested on an invalid path; the state is left unchanged."""


class StuckError(LipgirthError, RuntimeError):
    """Regularization cannot make progress. ``state`` carries a dump for debugging."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class CertificateError(LipgirthError, RuntimeError):
    """A produced artifact failed its own post-verification."""


class StageError(LipgirthError, RuntimeError):
    """Wraps a failure inside a multi-stage pipeline, naming the stage."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
