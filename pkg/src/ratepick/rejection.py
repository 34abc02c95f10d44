"""Dynamic weighted sampling by rejection against a fixed rate ceiling.

Outcomes live in a dense array with no order of any kind.  An extraction
proposes a uniform position and accepts it with probability rate/ceiling,
so the cost per draw is O(1) times the expected number of attempts
ceiling * N / total_rate, independent of N.  Add, update and delete are
O(1) via swap-with-last deletion.

The ceiling is fixed at construction and rates above it are refused: the
acceptance test divides by it implicitly, so raising it would mean
re-checking every stored rate.

A rate update to exactly zero parks the handle instead of invalidating
it: the outcome leaves the dense array (zero-rate entries would poison
the acceptance loop's running time) but keeps its payload, and a later
update back to a positive rate re-enters the array.  len() counts only
outcomes with positive rate.
"""

from __future__ import annotations

import math

import numpy as np

from ._kernels import engine_name, get_kernels
from .base import KahanSum, Sampler, as_rate
from .errors import (
    AttemptLimitError,
    EmptyStructureError,
    InvalidRateError,
    RateExceedsMaxError,
)
from .rng import generator_of

__all__ = ["RejectionSampler"]

DORMANT = -2
STALE = -1


class RejectionSampler(Sampler):
    """Rejection sampler with O(1) operations under a fixed ceiling.

    Parameters
    ----------
    max_rate : float
        Acceptance ceiling; every rate must satisfy rate <= max_rate.
    pairs : iterable of (payload, rate), optional
    engine : {"auto", "compiled", "python"}
    reuse_draw : bool
        Spend one uniform per attempt instead of two by recycling the
        fractional part of the index draw as the acceptance threshold.
        Costs a few low bits of threshold resolution; off by default.
    max_attempts : int
        Failsafe bound on attempts per extraction.
    """

    __slots__ = (
        "_kern", "engine", "max_rate", "reuse_draw", "max_attempts",
        "_payloads", "_where", "_rates", "_handles", "_n", "_total",
        "_n_extracts", "_n_attempts",
    )

    def __init__(self, max_rate, pairs=(), *, engine: str = "auto",
                 reuse_draw: bool = False, max_attempts: int = 10_000_000):
        max_rate = float(max_rate)
        if not (math.isfinite(max_rate) and max_rate > 0.0):
            raise InvalidRateError("max_rate must be finite and > 0")
        self._kern = get_kernels(engine)
        self.engine = engine_name(self._kern)
        self.max_rate = max_rate
        self.reuse_draw = bool(reuse_draw)
        self.max_attempts = int(max_attempts)
        self._payloads: list = []
        self._where: list[int] = []  # handle -> position, STALE or DORMANT
        self._rates = np.zeros(16, dtype=np.float64)
        self._handles = np.full(16, -1, dtype=np.int64)
        self._n = 0
        self._total = KahanSum()
        self._n_extracts = 0
        self._n_attempts = 0
        for payload, rate in pairs:
            self.add(payload, rate)

    # -- handle plumbing -----------------------------------------------------

    def _live_pos(self, handle: int) -> int:
        pos = self._pos_or_dormant(handle)
        if pos == DORMANT:
            raise self._stale(handle)
        return pos

    def _pos_or_dormant(self, handle: int) -> int:
        if not (isinstance(handle, (int, np.integer)) and 0 <= handle < len(self._where)):
            raise self._stale(handle)
        pos = self._where[handle]
        if pos == STALE:
            raise self._stale(handle)
        return pos

    def payload_of(self, handle: int):
        self._pos_or_dormant(handle)
        return self._payloads[handle]

    def rate_of(self, handle: int) -> float:
        pos = self._pos_or_dormant(handle)
        return 0.0 if pos == DORMANT else float(self._rates[pos])

    # -- mutation --------------------------------------------------------------

    def _check_rate(self, rate: float) -> float:
        rate = as_rate(rate)
        if rate > self.max_rate:
            raise RateExceedsMaxError(
                "rate %g exceeds table ceiling %g" % (rate, self.max_rate)
            )
        return rate

    def _append(self, handle: int, rate: float) -> None:
        n = self._n
        if n == self._rates.shape[0]:
            for name, fill in (("_rates", 0.0), ("_handles", -1)):
                old = getattr(self, name)
                fresh = np.full(old.shape[0] * 2, fill, dtype=old.dtype)
                fresh[:n] = old[:n]
                setattr(self, name, fresh)
        self._rates[n] = rate
        self._handles[n] = handle
        self._where[handle] = n
        self._n = n + 1
        self._total.add(rate)

    def _swap_delete(self, pos: int) -> None:
        n = self._n
        self._total.add(-float(self._rates[pos]))
        last = n - 1
        if pos != last:
            moved = int(self._handles[last])
            self._rates[pos] = self._rates[last]
            self._handles[pos] = moved
            self._where[moved] = pos
        self._rates[last] = 0.0
        self._handles[last] = -1
        self._n = last
        if last == 0:
            self._total.reset(0.0)  # empty table sums to exactly zero

    def add(self, payload, rate) -> int:
        rate = self._check_rate(rate)
        handle = len(self._payloads)
        self._payloads.append(payload)
        self._where.append(DORMANT)
        if rate > 0.0:
            self._append(handle, rate)
        return handle

    def update(self, handle: int, rate) -> None:
        rate = self._check_rate(rate)
        pos = self._pos_or_dormant(handle)
        if pos == DORMANT:
            if rate > 0.0:
                self._append(handle, rate)  # wake a parked outcome
            return
        if rate > 0.0:
            self._total.add(rate - float(self._rates[pos]))
            self._rates[pos] = rate
        else:
            self._swap_delete(pos)
            self._where[handle] = DORMANT

    def delete(self, handle: int) -> None:
        pos = self._pos_or_dormant(handle)
        if pos != DORMANT:
            self._swap_delete(pos)
        self._where[handle] = STALE
        self._payloads[handle] = None

    # -- queries -----------------------------------------------------------------

    def extract(self, rng) -> tuple[int, object]:
        if self._n == 0:
            raise EmptyStructureError("cannot extract: total rate is zero")
        gen = generator_of(rng)
        pos, attempts = self._kern.table_pick(
            self._rates, self._n, self.max_rate, self.max_attempts, gen,
            self.reuse_draw,
        )
        self._n_extracts += 1
        self._n_attempts += attempts
        if pos < 0:
            raise AttemptLimitError(
                "no acceptance after %d attempts" % attempts
            )
        handle = int(self._handles[pos])
        return handle, self._payloads[handle]

    def extract_many(self, rng, n: int, *, stats: bool = False):
        """Draw n outcomes. Returns handles, or (handles, attempts) with stats."""
        if self._n == 0:
            raise EmptyStructureError("cannot extract: total rate is zero")
        gen = generator_of(rng)
        pos = np.empty(int(n), dtype=np.int64)
        att = np.empty(int(n), dtype=np.int64)
        self._kern.table_pick_many(
            self._rates, self._n, self.max_rate, self.max_attempts, gen,
            pos, att, self.reuse_draw,
        )
        bad = np.flatnonzero(pos < 0)
        if bad.size:
            raise AttemptLimitError(
                "no acceptance after %d attempts" % int(att[bad[0]])
            )
        self._n_extracts += int(n)
        self._n_attempts += int(att.sum())
        handles = self._handles[pos]
        return (handles, att) if stats else handles

    def total_rate(self) -> float:
        return self._total.value

    def __len__(self) -> int:
        return self._n

    @property
    def n_extracts(self) -> int:
        return self._n_extracts

    @property
    def n_attempts(self) -> int:
        """Rejection attempts over all extractions, acceptances included."""
        return self._n_attempts

    # -- consistency ---------------------------------------------------------------

    def validate(self) -> None:
        n = self._n
        rates = self._rates[:n]
        _ensure(np.all(np.isfinite(rates)) and np.all(rates > 0.0),
                "stored rates must be finite and positive")
        _ensure(np.all(rates <= self.max_rate), "stored rate above ceiling")

        exact = math.fsum(float(r) for r in rates)
        err = abs(self._total.value - exact)
        _ensure(err <= 1e-9 * max(1.0, abs(exact)),
                "running total drifted from exact sum")

        live = [h for h, p in enumerate(self._where) if p >= 0]
        _ensure(len(live) == n, "live handle count mismatch")
        for h in live:
            p = self._where[h]
            _ensure(p < n and int(self._handles[p]) == h,
                    "position/handle tables disagree")
        table = set(self._handles[:n].tolist())
        for h, p in enumerate(self._where):
            if p == DORMANT:
                _ensure(h not in table, "dormant handle occupies the table")


def _ensure(cond, msg: str) -> None:
    if not cond:
        raise AssertionError("rejection invariant violated: " + msg)
