"""Exception hierarchy shared by all modules."""


class NSGalerkinError(Exception):
    """Base class for every error raised by this package."""


class InvalidField(NSGalerkinError, ValueError):
    pass


class InvalidCoefficients(NSGalerkinError, ValueError):
    pass


class EmptyBasis(NSGalerkinError, ValueError):
    pass


class NotElliptic(NSGalerkinError, ValueError):
    pass


class AliasingError(NSGalerkinError, ValueError):
    pass


class NonSolenoidalInput(NSGalerkinError, ValueError):
    pass


class DivergedError(NSGalerkinError, FloatingPointError):
    """Raised when the integrator produces NaN/Inf; carries the step index."""

    def __init__(self, step: int, message: str = ""):
        self.step = step
        super().__init__(message or f"non-finite state at step {step}")


class DimensionError(NSGalerkinError, ValueError):
    pass


class DegeneratePlane(NSGalerkinError, ValueError):
    pass


class UnsupportedOrientation(NSGalerkinError, ValueError):
    pass


class IncompatibleRuns(NSGalerkinError, ValueError):
    pass


class MisalignedSeries(NSGalerkinError, ValueError):
    pass


class OutOfRange(NSGalerkinError, ValueError):
    pass


class DegenerateBalance(NSGalerkinError, ValueError):
    pass


class ZeroFieldRatio(NSGalerkinError, ValueError):
    pass


class ConfigError(NSGalerkinError, ValueError):
    """Configuration problem; ``line`` is the 1-based offending line (or None)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class UnknownKey(ConfigError):
    pass


class ConfigTypeError(ConfigError, TypeError):
    pass


class MissingRequired(ConfigError):
    pass
