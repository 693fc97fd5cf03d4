"""Exception hierarchy shared across the package."""

import math


class JumpWassError(Exception):
    """Base class for all errors raised by jumpwass."""


class DimensionMismatch(JumpWassError, ValueError):
    pass


class NotPSD(JumpWassError, ValueError):
    """A matrix expected to be symmetric positive semidefinite is not."""


class NotStochastic(JumpWassError, ValueError):
    """A transition matrix failed row-stochastic validation."""

    def __init__(self, row, deviation, message=None):
        self.row = row
        self.deviation = deviation
        super().__init__(message or f"row {row} is not a probability vector (deviation {deviation:.3g})")


class WeightInvalid(JumpWassError, ValueError):
    pass


class KernelInvalid(JumpWassError, ValueError):
    pass


class ClassMismatch(JumpWassError, TypeError):
    pass


def _approx(count):
    if count < 10**15:
        return str(count)
    return f"~1e{math.log10(count):.1f}"


class ComponentExplosion(JumpWassError, RuntimeError):
    """Exact enumeration would exceed the configured component limit."""

    def __init__(self, required, limit):
        self.required = required
        self.limit = limit
        super().__init__(f"exact propagation needs {_approx(required)} components, limit is {limit}")


class SemanticsUnsupported(JumpWassError, ValueError):
    pass


class WindowTooLarge(JumpWassError, ValueError):
    pass


class ConfigError(JumpWassError, ValueError):
    """Invalid system description; ``field`` names the offending entry."""

    def __init__(self, field, reason):
        self.field = field
        self.reason = reason
        super().__init__(f"{field}: {reason}")


class NumericalFailure(JumpWassError, ArithmeticError):
    """Propagated moments became non-finite (typically overflow of an unstable system)."""
