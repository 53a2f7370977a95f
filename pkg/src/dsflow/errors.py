"""Exception types raised across the package."""


class ArgumentError(ValueError):
    """An argument lies outside the documented range."""


class DegeneracyError(ArithmeticError):
    """Curvatures left the Garding cone; the quotient is no longer defined."""

    def __init__(self, message, margin=None):
        super().__init__(message)
        self.margin = margin


class AdmissibilityError(ValueError):
    """A profile is not spacelike."""

    def __init__(self, message, margin=None):
        super().__init__(message)
        self.margin = margin


class FlowBreakdown(RuntimeError):
    """An evolution step produced an inadmissible hypersurface."""

    def __init__(self, message, margin=None, kind=None):
        super().__init__(message)
        self.margin = margin
        self.kind = kind


class DomainError(ValueError):
    """Input outside the range of a monotone function being inverted."""


class SamplerError(RuntimeError):
    """Rejection sampling ran out of attempts."""


class ConfigError(ValueError):
    """A run configuration is malformed or violates its invariants."""


class SeriesParseError(ValueError):
    """A series file could not be parsed."""

    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line
