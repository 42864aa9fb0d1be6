"""Exception hierarchy shared by every module."""


class AqclsError(Exception):
    pass


class ValidationError(AqclsError, ValueError):
    """Input violates a documented precondition."""


class CapacityError(ValidationError):
    """Requested Hilbert-space dimension exceeds the configured cap."""


class GapClosureError(AqclsError, ArithmeticError):
    """Spectral gap vanished on the interpolation path."""


class SimulationError(AqclsError, RuntimeError):
    """Numerical failure during time evolution."""


class ReducibleChainError(AqclsError, ValueError):
    """Markov chain is reducible, so its stationary law is not unique."""


class ConfigError(AqclsError, ValueError):
    """Malformed or invalid experiment configuration."""

    def __init__(self, message, *, line=None, field=None):
        self.line = line
        self.field = field
        prefix = ""
        if line is not None:
            prefix = f"line {line}: "
        elif field is not None:
            prefix = f"{field}: "
        super().__init__(prefix + message)
