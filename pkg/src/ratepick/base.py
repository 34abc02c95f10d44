"""Shared pieces of the sampler backends.

Every backend stores a dynamic collection of (payload, rate) pairs and
draws payloads with probability proportional to their current rate.  The
common contract:

* ``add(payload, rate)`` returns an integer handle.  Handles are issued
  once and never reused, so a stale handle can always be recognised.
* ``update(handle, rate)`` changes the rate bound to a handle.
* ``delete(handle)`` removes the outcome; the handle becomes stale.
* ``extract(rng)`` returns ``(handle, payload)`` with probability
  rate / total_rate().
* ``total_rate()`` is the sum of all live rates.
* ``len(sampler)`` counts outcomes whose rate is strictly positive.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod

from .errors import InvalidRateError, StaleHandleError

__all__ = ["Sampler", "KahanSum", "as_rate"]


def as_rate(value) -> float:
    """Validate and coerce a rate. Rates are finite, non-negative floats."""
    rate = float(value)
    if math.isnan(rate) or math.isinf(rate) or rate < 0.0:
        raise InvalidRateError("rate must be finite and >= 0, got %r" % value)
    return rate


class KahanSum:
    """Compensated running sum.

    Incremental add/subtract of rates must not drift: the structures
    promise total_rate() within 1e-9 relative of the exact sum after a
    million updates.  Plain ``+=`` is marginal there; Kahan compensation
    makes the drift negligible for the magnitudes involved.
    """

    __slots__ = ("value", "_comp")

    def __init__(self, value: float = 0.0):
        self.value = value
        self._comp = 0.0

    def add(self, x: float) -> None:
        y = x - self._comp
        t = self.value + y
        self._comp = (t - self.value) - y
        self.value = t

    def reset(self, value: float = 0.0) -> None:
        self.value = value
        self._comp = 0.0


class Sampler(ABC):
    """Abstract dynamic weighted sampler."""

    __slots__ = ()

    @abstractmethod
    def add(self, payload, rate) -> int: ...

    @abstractmethod
    def update(self, handle: int, rate) -> None: ...

    @abstractmethod
    def delete(self, handle: int) -> None: ...

    @abstractmethod
    def extract(self, rng) -> tuple[int, object]: ...

    @abstractmethod
    def total_rate(self) -> float: ...

    @abstractmethod
    def __len__(self) -> int: ...

    @abstractmethod
    def validate(self) -> None:
        """Full-scan consistency check; raises AssertionError on any breach."""

    def payload_of(self, handle: int):
        """Payload currently bound to a live handle."""
        raise NotImplementedError

    def _stale(self, handle: int) -> StaleHandleError:
        return StaleHandleError("handle %r is not live" % (handle,))
