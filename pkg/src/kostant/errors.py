"""Exception hierarchy shared by all modules."""


class KostantError(Exception):
    """Base class for every error raised by this package."""


class NonZeroSum(KostantError, ValueError):
    pass


class EmptyPolytope(KostantError, ValueError):
    pass


class BadParams(KostantError, ValueError):
    pass


class LengthMismatch(KostantError, ValueError):
    pass


class InfeasibleFlow(KostantError, ValueError):
    pass


class NegativeArg(KostantError, ValueError):
    pass


class NegativeEntry(KostantError, ValueError):
    pass


class NonPositiveEntry(KostantError, ValueError):
    pass


class ZeroMarginal(KostantError, ValueError):
    pass


class Disconnected(KostantError, ValueError):
    pass


class RegimeViolation(KostantError, ValueError):
    pass


class HypothesisViolation(KostantError, ValueError):
    pass


class DomainViolation(KostantError, ValueError):
    pass


class Unsupported(KostantError, ValueError):
    pass


class ResourceLimit(KostantError, RuntimeError):
    """A configured state or enumeration cap was exceeded."""


class NoConvergence(KostantError, RuntimeError):
    """An iterative solver hit its iteration cap."""
