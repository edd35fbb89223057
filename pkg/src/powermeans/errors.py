"""Exception hierarchy for powermeans."""


class PowerMeansError(Exception):
    """Base class for all library errors."""


class NonHermitianInput(PowerMeansError, ValueError):
    pass


class NotPositiveSemidefinite(PowerMeansError, ValueError):
    pass


class NotPositiveDefinite(PowerMeansError, ValueError):
    pass


class DimensionMismatch(PowerMeansError, ValueError):
    pass


class DomainError(PowerMeansError, ValueError):
    """A scalar function is undefined or non-finite on part of a spectrum."""


class SingularPower(PowerMeansError, ValueError):
    """Negative (or otherwise ill-defined) power of a singular matrix."""


class SingularT(PowerMeansError, ValueError):
    pass


class InvalidExponent(PowerMeansError, ValueError):
    pass


class BoundaryDivergence(PowerMeansError, ArithmeticError):
    """The downward epsilon-limit of a mean failed its Cauchy test."""


class ZeroVector(PowerMeansError, ValueError):
    pass


class EmptyProbeSet(PowerMeansError, ValueError):
    pass


class IncompatibleForm(PowerMeansError, ValueError):
    """A preserver form / mean family pairing that is neither sanctioned nor adversarial."""


class InputParseError(PowerMeansError, ValueError):
    pass
