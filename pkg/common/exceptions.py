"""Error types shared by the pricing apps."""


class PricingError(Exception):
    """Base class for every error raised by the pricing engine."""


class ParameterError(PricingError, ValueError):
    """A model or pricing parameter violates its domain."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class MarketError(ParameterError):
    """Forward, discount factor or maturity out of range."""


class DegenerateRangeError(PricingError):
    """Truncation range collapsed to a single point (a == b)."""


class PointRangeError(PricingError, ValueError):
    """A NUFFT sample point lies outside [-1/2, 1/2)."""

    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(f"point {index} = {value!r} is outside [-0.5, 0.5)")


class SizeMismatchError(PricingError, ValueError):
    """Spectrum length does not match the plan."""


class ReferenceFailure(PricingError):
    """A benchmark reference price could not be computed."""


class ConfigError(PricingError):
    """Malformed run configuration, optionally anchored to a line."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")
