"""Exception hierarchy shared by all modules."""


class BerhrError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(BerhrError, ValueError):
    """A configuration (simplex rows, optimal sets, experiment file) is malformed."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class ParameterError(BerhrError, ValueError):
    """A numeric parameter lies outside its admissible range."""


class PreconditionError(BerhrError, ValueError):
    """An operation was called on inputs that violate its stated precondition."""


class UnsupportedError(BerhrError):
    """The request is valid in principle but not supported (e.g. enumeration too large)."""


class InvariantViolation(BerhrError, RuntimeError):
    """A simulated state left its admissible set during a run."""

    def __init__(self, message, step=None, seed=None):
        super().__init__(f"{message} (step={step}, seed={seed})")
        self.step = step
        self.seed = seed
