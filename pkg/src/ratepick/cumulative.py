"""Reference sampler backed by a cumulative rate array.

The straightforward textbook method: keep the live rates in a dense
array, build the running cumulative sum, then draw by binary search for
the first position whose cumulative value exceeds the uniform draw.
Extraction is O(log N) but any mutation invalidates the cumulative array,
which is rebuilt from scratch (O(N)) before the next draw, so this
backend is only sensible as a correctness yardstick and for small or
static rate sets.

The rebuild is a plain left-to-right summation; after a rebuild the total
is exact up to that summation order, with no incremental drift ever
carried across mutations.  Zero rates are allowed: a zero-width step in
the cumulative array can never be the first one to exceed a draw below
the total, so such outcomes are unreachable, matching the other backends.
"""

from __future__ import annotations

import math

import numpy as np

from .base import Sampler, as_rate
from .errors import EmptyStructureError
from .rng import generator_of

__all__ = ["CumulativeSampler"]


class CumulativeSampler(Sampler):
    """Cumulative-array sampler: the exact but O(N)-per-mutation oracle."""

    __slots__ = (
        "_payloads", "_where", "_rates", "_handles", "_n", "_n_positive",
        "_cum", "_total", "_dirty",
    )

    def __init__(self, pairs=()):
        self._payloads: list = []
        self._where: list[int] = []  # handle -> position, -1 when stale
        self._rates = np.zeros(16, dtype=np.float64)
        self._handles = np.full(16, -1, dtype=np.int64)
        self._n = 0
        self._n_positive = 0
        self._cum = np.zeros(0, dtype=np.float64)
        self._total = 0.0
        self._dirty = True
        for payload, rate in pairs:
            self.add(payload, rate)

    # -- handle plumbing ----------------------------------------------------

    def _live_pos(self, handle: int) -> int:
        if not (isinstance(handle, (int, np.integer)) and 0 <= handle < len(self._where)):
            raise self._stale(handle)
        pos = self._where[handle]
        if pos < 0:
            raise self._stale(handle)
        return pos

    def payload_of(self, handle: int):
        self._live_pos(handle)
        return self._payloads[handle]

    def rate_of(self, handle: int) -> float:
        return float(self._rates[self._live_pos(handle)])

    # -- mutation -------------------------------------------------------------

    def add(self, payload, rate) -> int:
        rate = as_rate(rate)
        handle = len(self._payloads)
        self._payloads.append(payload)
        n = self._n
        if n == self._rates.shape[0]:
            for name, fill in (("_rates", 0.0), ("_handles", -1)):
                old = getattr(self, name)
                fresh = np.full(old.shape[0] * 2, fill, dtype=old.dtype)
                fresh[:n] = old[:n]
                setattr(self, name, fresh)
        self._rates[n] = rate
        self._handles[n] = handle
        self._where.append(n)
        self._n = n + 1
        if rate > 0.0:
            self._n_positive += 1
        self._dirty = True
        return handle

    def update(self, handle: int, rate) -> None:
        rate = as_rate(rate)
        pos = self._live_pos(handle)
        old = float(self._rates[pos])
        self._rates[pos] = rate
        self._n_positive += (rate > 0.0) - (old > 0.0)
        self._dirty = True

    def delete(self, handle: int) -> None:
        pos = self._live_pos(handle)
        old = float(self._rates[pos])
        last = self._n - 1
        if pos != last:
            moved = int(self._handles[last])
            self._rates[pos] = self._rates[last]
            self._handles[pos] = moved
            self._where[moved] = pos
        self._rates[last] = 0.0
        self._handles[last] = -1
        self._n = last
        self._where[handle] = -1
        self._payloads[handle] = None
        if old > 0.0:
            self._n_positive -= 1
        self._dirty = True

    # -- queries ------------------------------------------------------------------

    def _refresh(self) -> None:
        if self._dirty:
            self._cum = np.cumsum(self._rates[: self._n])
            self._total = float(self._cum[-1]) if self._n else 0.0
            self._dirty = False

    def extract(self, rng) -> tuple[int, object]:
        self._refresh()
        if self._n_positive == 0 or self._total <= 0.0:
            raise EmptyStructureError("cannot extract: total rate is zero")
        gen = generator_of(rng)
        v = gen.random() * self._total
        clamp = np.nextafter(self._total, 0.0)
        if v > clamp:
            v = clamp
        pos = int(np.searchsorted(self._cum, v, side="right"))
        handle = int(self._handles[pos])
        return handle, self._payloads[handle]

    def extract_many(self, rng, n: int) -> np.ndarray:
        """Draw n outcomes; returns their handles as an int64 array."""
        self._refresh()
        if self._n_positive == 0 or self._total <= 0.0:
            raise EmptyStructureError("cannot extract: total rate is zero")
        gen = generator_of(rng)
        v = gen.random(int(n))
        v *= self._total
        np.minimum(v, np.nextafter(self._total, 0.0), out=v)
        pos = np.searchsorted(self._cum, v, side="right")
        return self._handles[pos]

    def total_rate(self) -> float:
        self._refresh()
        return self._total

    def __len__(self) -> int:
        return self._n_positive

    # -- consistency ---------------------------------------------------------------

    def validate(self) -> None:
        n = self._n
        rates = self._rates[:n]
        _ensure(np.all(np.isfinite(rates)) and np.all(rates >= 0.0),
                "rates must be finite and non-negative")
        self._refresh()
        if n:
            _ensure(np.all(np.diff(self._cum) >= 0.0),
                    "cumulative array must be non-decreasing")
            exact = math.fsum(rates.tolist())
            _ensure(abs(self._total - exact) <= 1e-12 * max(1.0, abs(exact)),
                    "total drifted beyond summation-order tolerance")
        else:
            _ensure(self._total == 0.0, "empty structure with nonzero total")
        live = [h for h, p in enumerate(self._where) if p >= 0]
        _ensure(len(live) == n, "live handle count mismatch")
        for h in live:
            p = self._where[h]
            _ensure(p < n and int(self._handles[p]) == h,
                    "position/handle tables disagree")
        _ensure(self._n_positive == int(np.count_nonzero(rates)),
                "positive-rate count is stale")


def _ensure(cond, msg: str) -> None:
    if not cond:
        raise AssertionError("cumulative invariant violated: " + msg)
