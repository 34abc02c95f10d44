"""Dynamic weighted sampling by composition of rejection tables.

Outcomes are partitioned into geometric rate bands: group i holds rates
in (max_rate/c**(i+1), max_rate/c**i] for a constant c > 1 fixed at
construction.  An extraction first picks a group by a linear scan over
the group rate sums (composition step), then rejection-samples inside the
group against the group's own ceiling max_rate/c**i.  Within a group
rates differ by at most a factor c, so the per-attempt acceptance chance
is above 1/c no matter how skewed the overall rates are; the expected
cost per draw is O(number of groups) in the worst case and in practice a
few scan steps plus fewer than c attempts.

Group sums are maintained with compensated addition and can be rebuilt
exactly on demand.  Updates move outcomes between groups only when the
new rate leaves the old band.  Zero-rate updates park the handle exactly
as in the plain rejection table.

Group bounds are generated by the division chain max_rate, max_rate/c,
max_rate/c/c, ...; the band predicate uses the same chain values, so an
outcome's group is a deterministic function of its rate with no float
ambiguity at band edges.
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

__all__ = ["CompositionRejectionSampler"]

DORMANT = -2
STALE = -1
_MIN_GROUP_CAP = 8


class _Group:
    """One rate band: a dense rejection table plus a compensated sum."""

    __slots__ = ("rates", "handles", "n", "sum")

    def __init__(self):
        self.rates = np.zeros(_MIN_GROUP_CAP, dtype=np.float64)
        self.handles = np.full(_MIN_GROUP_CAP, -1, dtype=np.int64)
        self.n = 0
        self.sum = KahanSum()


class CompositionRejectionSampler(Sampler):
    """Grouped rejection sampler: O(1) expected extract for bounded skew.

    Parameters
    ----------
    max_rate : float
        Global rate ceiling; also the ceiling of group 0.
    pairs : iterable of (payload, rate), optional
    c : float
        Band width factor, > 1.  Group i accepts rates in
        (max_rate/c**(i+1), max_rate/c**i].  2.0 is a solid general
        default; for rates spread uniformly on (0, max_rate] the scan
        plus attempt cost is minimised near c = e.
    engine : {"auto", "compiled", "python"}
    max_attempts : int
        Failsafe bound on in-group attempts per extraction.
    """

    __slots__ = (
        "_kern", "engine", "max_rate", "c", "max_attempts",
        "_payloads", "_wgroup", "_wpos", "_groups", "_ceilings",
        "_sums", "_ns", "_total", "_n",
        "_n_extracts", "_n_attempts", "_n_scan_steps",
    )

    def __init__(self, max_rate, pairs=(), *, c: float = 2.0,
                 engine: str = "auto", max_attempts: int = 10_000_000):
        max_rate = float(max_rate)
        if not (math.isfinite(max_rate) and max_rate > 0.0):
            raise InvalidRateError("max_rate must be finite and > 0")
        c = float(c)
        if not (math.isfinite(c) and c > 1.0):
            raise ValueError("band factor c must be finite and > 1")
        self._kern = get_kernels(engine)
        self.engine = engine_name(self._kern)
        self.max_rate = max_rate
        self.c = c
        self.max_attempts = int(max_attempts)
        self._payloads: list = []
        self._wgroup: list[int] = []  # handle -> group, STALE or DORMANT
        self._wpos: list[int] = []    # handle -> position inside its group
        self._groups: list[_Group] = []
        self._ceilings = np.zeros(0, dtype=np.float64)  # division chain
        self._sums = np.zeros(0, dtype=np.float64)      # mirrors group sums
        self._ns = np.zeros(0, dtype=np.int64)
        self._total = KahanSum()
        self._n = 0
        self._n_extracts = 0
        self._n_attempts = 0
        self._n_scan_steps = 0
        for payload, rate in pairs:
            self.add(payload, rate)

    # -- bands -----------------------------------------------------------------

    def _grow_groups(self, upto: int) -> None:
        g = len(self._groups)
        if upto < g:
            return
        while len(self._groups) <= upto:
            self._groups.append(_Group())
        chain = np.empty(upto + 1, dtype=np.float64)
        chain[:g] = self._ceilings
        prev = self.max_rate if g == 0 else float(self._ceilings[g - 1])
        for i in range(g, upto + 1):
            prev = self.max_rate if i == 0 else prev / self.c
            chain[i] = prev
        self._ceilings = chain
        for name, fill in (("_sums", 0.0), ("_ns", 0)):
            old = getattr(self, name)
            fresh = np.full(upto + 1, fill, dtype=old.dtype)
            fresh[: old.shape[0]] = old
            setattr(self, name, fresh)

    def group_index(self, rate: float) -> int:
        """Band owning ``rate``: i with ceiling(i+1) < rate <= ceiling(i)."""
        if not (0.0 < rate <= self.max_rate):
            raise InvalidRateError(
                "rate %g outside (0, %g]" % (rate, self.max_rate)
            )
        # log difference, not log of the quotient: max_rate/rate overflows
        # for subnormal rates
        i = int((math.log(self.max_rate) - math.log(rate)) / math.log(self.c))
        if i < 0:
            i = 0
        self._grow_groups(i + 1)
        # the log seed can be off by one ulp step; settle with the chain
        while i > 0 and rate > self._ceilings[i]:
            i -= 1
        while rate <= (nxt := self._chain_next(i)):
            if nxt >= self._ceilings[i]:
                break  # chain stalled at float resolution; park here
            i += 1
        return i

    def _chain_next(self, i: int) -> float:
        self._grow_groups(i + 1)
        return float(self._ceilings[i + 1])

    def group_ceiling(self, i: int) -> float:
        return float(self._ceilings[i])

    def group_count(self, i: int) -> int:
        return self._groups[i].n

    def group_sum(self, i: int) -> float:
        return self._groups[i].sum.value

    @property
    def n_groups(self) -> int:
        """Allocated bands; trailing ones may be empty."""
        return len(self._groups)

    # -- handle plumbing ---------------------------------------------------------

    def _whereabouts(self, handle: int) -> tuple[int, int]:
        if not (isinstance(handle, (int, np.integer)) and 0 <= handle < len(self._wgroup)):
            raise self._stale(handle)
        g = self._wgroup[handle]
        if g == STALE:
            raise self._stale(handle)
        return g, self._wpos[handle]

    def payload_of(self, handle: int):
        self._whereabouts(handle)
        return self._payloads[handle]

    def rate_of(self, handle: int) -> float:
        g, pos = self._whereabouts(handle)
        return 0.0 if g == DORMANT else float(self._groups[g].rates[pos])

    # -- mutation -------------------------------------------------------------------

    def _check_rate(self, rate) -> float:
        rate = as_rate(rate)
        if rate > self.max_rate:
            raise RateExceedsMaxError(
                "rate %g exceeds ceiling %g" % (rate, self.max_rate)
            )
        return rate

    def _enter(self, handle: int, rate: float) -> None:
        gi = self.group_index(rate)
        grp = self._groups[gi]
        n = grp.n
        if n == grp.rates.shape[0]:
            for name, fill in (("rates", 0.0), ("handles", -1)):
                old = getattr(grp, name)
                fresh = np.full(old.shape[0] * 2, fill, dtype=old.dtype)
                fresh[:n] = old[:n]
                setattr(grp, name, fresh)
        grp.rates[n] = rate
        grp.handles[n] = handle
        grp.n = n + 1
        grp.sum.add(rate)
        self._sums[gi] = grp.sum.value
        self._ns[gi] = grp.n
        self._wgroup[handle] = gi
        self._wpos[handle] = n
        self._total.add(rate)
        self._n += 1

    def _leave(self, handle: int, gi: int, pos: int) -> None:
        grp = self._groups[gi]
        rate = float(grp.rates[pos])
        last = grp.n - 1
        if pos != last:
            moved = int(grp.handles[last])
            grp.rates[pos] = grp.rates[last]
            grp.handles[pos] = moved
            self._wpos[moved] = pos
        grp.rates[last] = 0.0
        grp.handles[last] = -1
        grp.n = last
        if last == 0:
            grp.sum.reset(0.0)  # emptied band sums to exactly zero
        else:
            grp.sum.add(-rate)
        self._sums[gi] = grp.sum.value
        self._ns[gi] = grp.n
        self._total.add(-rate)
        self._n -= 1
        if self._n == 0:
            self._total.reset(0.0)

    def add(self, payload, rate) -> int:
        rate = self._check_rate(rate)
        handle = len(self._payloads)
        self._payloads.append(payload)
        self._wgroup.append(DORMANT)
        self._wpos.append(-1)
        if rate > 0.0:
            self._enter(handle, rate)
        return handle

    def update(self, handle: int, rate) -> None:
        rate = self._check_rate(rate)
        gi, pos = self._whereabouts(handle)
        if gi == DORMANT:
            if rate > 0.0:
                self._enter(handle, rate)
            return
        if rate == 0.0:
            self._leave(handle, gi, pos)
            self._wgroup[handle] = DORMANT
            self._wpos[handle] = -1
            return
        target = self.group_index(rate)
        if target == gi:
            grp = self._groups[gi]
            delta = rate - float(grp.rates[pos])
            grp.rates[pos] = rate
            grp.sum.add(delta)
            self._sums[gi] = grp.sum.value
            self._total.add(delta)
        else:
            self._leave(handle, gi, pos)
            self._enter(handle, rate)

    def delete(self, handle: int) -> None:
        gi, pos = self._whereabouts(handle)
        if gi != DORMANT:
            self._leave(handle, gi, pos)
        self._wgroup[handle] = STALE
        self._wpos[handle] = -1
        self._payloads[handle] = None

    def rebuild_sums(self) -> None:
        """Recompute every band sum and the total by exact summation."""
        for gi, grp in enumerate(self._groups):
            grp.sum.reset(math.fsum(grp.rates[: grp.n].tolist()))
            self._sums[gi] = grp.sum.value
        self._total.reset(math.fsum(self._sums.tolist()))

    # -- queries ------------------------------------------------------------------------

    def extract(self, rng) -> tuple[int, object]:
        if self._n == 0:
            raise EmptyStructureError("cannot extract: total rate is zero")
        gen = generator_of(rng)
        v = gen.random() * self._total.value
        gi = self._kern.group_scan(self._sums, len(self._groups), v)
        if gi < 0:  # drift pushed v past the realised sums
            gi = int(np.flatnonzero(self._ns > 0)[-1])
        grp = self._groups[gi]
        pos, attempts = self._kern.table_pick(
            grp.rates, grp.n, float(self._ceilings[gi]), self.max_attempts,
            gen, False,
        )
        self._n_extracts += 1
        self._n_scan_steps += gi
        self._n_attempts += attempts
        if pos < 0:
            raise AttemptLimitError("no acceptance after %d attempts" % attempts)
        handle = int(grp.handles[pos])
        return handle, self._payloads[handle]

    def extract_many(self, rng, n: int, *, stats: bool = False):
        """Draw n outcomes.

        Returns handles, or (handles, groups, attempts) with stats: the
        band index each draw landed in and the rejection attempts it
        needed.
        """
        if self._n == 0:
            raise EmptyStructureError("cannot extract: total rate is zero")
        gen = generator_of(rng)
        n = int(n)
        out_group = np.empty(n, dtype=np.int64)
        out_pos = np.empty(n, dtype=np.int64)
        out_att = np.empty(n, dtype=np.int64)
        tables = [grp.rates for grp in self._groups]
        self._kern.cr_sample_many(
            self._sums, tables, self._ns, self._ceilings, self._total.value,
            self.max_attempts, gen, out_group, out_pos, out_att,
        )
        bad = np.flatnonzero(out_pos < 0)
        if bad.size:
            raise AttemptLimitError(
                "no acceptance after %d attempts" % int(out_att[bad[0]])
            )
        self._n_extracts += n
        self._n_scan_steps += int(out_group.sum())
        self._n_attempts += int(out_att.sum())
        handles = np.empty(n, dtype=np.int64)
        for gi in np.unique(out_group):
            mask = out_group == gi
            handles[mask] = self._groups[gi].handles[out_pos[mask]]
        return (handles, out_group, out_att) if stats else handles

    def total_rate(self) -> float:
        return self._total.value

    def __len__(self) -> int:
        return self._n

    @property
    def n_extracts(self) -> int:
        return self._n_extracts

    @property
    def n_attempts(self) -> int:
        """In-group rejection attempts over all extractions."""
        return self._n_attempts

    @property
    def n_scan_steps(self) -> int:
        """Groups stepped over during the composition scans."""
        return self._n_scan_steps

    # -- consistency -----------------------------------------------------------------------

    def validate(self) -> None:
        total_members = 0
        for gi, grp in enumerate(self._groups):
            rates = grp.rates[: grp.n]
            total_members += grp.n
            hi = float(self._ceilings[gi])
            lo = hi / self.c  # same float op as the chain, no growth needed
            _ensure(np.all(np.isfinite(rates)) and np.all(rates > 0.0),
                    "band rates must be finite and positive")
            _ensure(np.all(rates <= hi), "rate above its band (group %d)" % gi)
            if lo < hi:  # a stalled subnormal chain has no open floor
                _ensure(np.all(rates > lo),
                        "rate below its band (group %d)" % gi)
            exact = math.fsum(rates.tolist())
            _ensure(abs(grp.sum.value - exact) <= 1e-9 * max(1.0, abs(exact)),
                    "band sum drifted (group %d)" % gi)
            _ensure(self._sums[gi] == grp.sum.value, "sum mirror is stale")
            _ensure(self._ns[gi] == grp.n, "count mirror is stale")
            if grp.n == 0:
                _ensure(grp.sum.value == 0.0, "empty band with nonzero sum")
        _ensure(total_members == self._n, "member count mismatch")

        exact_total = math.fsum(
            float(s) for s in self._sums[: len(self._groups)]
        )
        _ensure(abs(self._total.value - exact_total)
                <= 1e-9 * max(1.0, abs(exact_total)),
                "running total drifted from exact sum")

        live = 0
        for h, g in enumerate(self._wgroup):
            if g >= 0:
                live += 1
                pos = self._wpos[h]
                grp = self._groups[g]
                _ensure(pos < grp.n and int(grp.handles[pos]) == h,
                        "handle/position tables disagree")
                r = float(grp.rates[pos])
                _ensure(self.group_index(r) == g, "member parked in wrong band")
        _ensure(live == self._n, "live handle count mismatch")


def _ensure(cond, msg: str) -> None:
    if not cond:
        raise AssertionError("composition invariant violated: " + msg)
