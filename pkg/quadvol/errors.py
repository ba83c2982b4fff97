class QuadvolError(Exception):
    """Base class for every error raised by the quadvol package."""


class DomainError(QuadvolError, ValueError):
    """An argument lies outside the domain of an operation (unstable (g, n), odd index, ...)."""


class DivergenceError(DomainError):
    """A finite value was requested where the answer contains zeta(1)."""


class NonMonomialDivisorError(DomainError):
    """A zeta-expression quotient whose divisor cannot be inverted exactly."""


class CacheCorruptError(QuadvolError):
    """A correlator cache file failed its header or checksum validation."""


class ConsistencyError(QuadvolError, RuntimeError):
    """Two independent computations of the same quantity disagree."""
