"""Exception types raised across the package."""


class EitError(Exception):
    """Base class for all eitsim errors."""


class InvalidInputError(EitError, ValueError):
    """A physical parameter is outside its allowed range."""


class InvalidDataError(EitError, ValueError):
    """Measured or simulated samples cannot be analysed as requested."""


class FitError(EitError, RuntimeError):
    """A least-squares problem is degenerate or rank deficient."""


class NumericalError(EitError, ArithmeticError):
    """Quadrature, sampling or interpolation failed to reach tolerance.

    ``diagnostics`` carries whatever the failing routine knew at the time
    (error estimates, evaluation counts, grid sizes).
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics

    def __str__(self):
        base = super().__str__()
        if not self.diagnostics:
            return base
        extra = ", ".join(f"{k}={v!r}" for k, v in self.diagnostics.items())
        return f"{base} ({extra})"


class ConfigError(EitError, ValueError):
    """A scenario file failed to parse or validate."""
