"""Exception types shared by every sampler backend."""


class SamplerError(Exception):
    """Base class for all errors raised by this package."""


class EmptyStructureError(SamplerError):
    """Raised when extracting from a sampler whose total rate is zero."""


class StaleHandleError(SamplerError):
    """Raised when a handle refers to an outcome that was deleted."""


class InvalidRateError(SamplerError, ValueError):
    """Raised for rates that are negative, NaN or infinite."""


class RateExceedsMaxError(InvalidRateError):
    """Raised when a rate is above the fixed ceiling of a rejection table."""


class AttemptLimitError(SamplerError):
    """Raised when rejection sampling gives up after too many attempts.

    With a correctly maintained table this is unreachable in practice; the
    limit exists so that a corrupted structure fails loudly instead of
    spinning forever.
    """
