"""Dynamic weighted sampling on a nearly-complete binary tree.

The tree lives in flat arrays using the implicit heap layout: slot i has
children 2i+1 and 2i+2, a structure over N leaves occupies slots
0..2N-2, internal slots are 0..N-2 and leaves N-1..2N-2.  Every leaf sits
on one of the two deepest levels with the deepest level packed to the
left, so descents cost O(log N).

Each internal slot stores the sum of its children's rates and the count
of leaves below it; internal values are always recomputed from children,
never adjusted by deltas, so no float drift accumulates anywhere.  The
root rate is the total rate.

Growth re-uses the classic trick for keeping the shape canonical without
relinking: adding a leaf turns the shallowest leaf (slot N-1) into an
internal slot whose children are that leaf's old content (moved to slot
2N-1) and the new leaf (slot 2N).  Deleting reverses it: the last leaf's
content fills the hole, and the now-single child of the last internal
slot is promoted into it.

Zero rates are allowed and keep their leaf; the strict descent rule makes
such leaves unreachable by extract.  len() counts positive-rate outcomes.
"""

from __future__ import annotations

import heapq

import numpy as np

from ._kernels import engine_name, get_kernels
from .base import Sampler, as_rate
from .errors import EmptyStructureError, StaleHandleError
from .rng import generator_of

__all__ = ["TreeSampler"]


class TreeSampler(Sampler):
    """Tree-backed sampler: O(log N) extract, update, add and delete.

    Parameters
    ----------
    pairs : iterable of (payload, rate), optional
        Initial outcomes; handles are issued in iteration order starting
        at 0.
    engine : {"auto", "compiled", "python"}
        Kernel engine for the hot loops.
    """

    __slots__ = (
        "_kern", "engine", "_payloads", "_where", "_n", "_n_positive",
        "_rates", "_weights", "_leaf_handle", "_last_refresh_ops",
    )

    def __init__(self, pairs=(), *, engine: str = "auto"):
        self._kern = get_kernels(engine)
        self.engine = engine_name(self._kern)
        self._payloads: list = []
        self._where: list[int] = []  # handle -> leaf slot, -1 when stale
        self._n = 0                  # live leaves, including zero-rate ones
        self._n_positive = 0
        self._rates = np.zeros(16, dtype=np.float64)
        self._weights = np.zeros(16, dtype=np.int64)
        self._leaf_handle = np.full(16, -1, dtype=np.int64)
        self._last_refresh_ops = 0
        pairs = list(pairs)
        if pairs:
            self._bulk_build(pairs)

    # -- construction ------------------------------------------------------

    def _bulk_build(self, pairs) -> None:
        rates = [as_rate(r) for _, r in pairs]
        n = len(pairs)
        self._payloads = [p for p, _ in pairs]
        self._ensure_capacity(2 * n - 1)
        self._n = n
        self._rates[n - 1 : 2 * n - 1] = rates
        self._weights[n - 1 : 2 * n - 1] = 1
        self._leaf_handle[n - 1 : 2 * n - 1] = np.arange(n)
        self._where = list(range(n - 1, 2 * n - 1))
        self._kern.tree_refresh_all(self._rates, self._weights, 2 * n - 1)
        self._n_positive = int(np.count_nonzero(self._rates[n - 1 : 2 * n - 1]))
        self._last_refresh_ops = 2 * n - 1

    def _ensure_capacity(self, n_nodes: int) -> None:
        cap = self._rates.shape[0]
        if n_nodes <= cap:
            return
        while cap < n_nodes:
            cap *= 2
        for name in ("_rates", "_weights", "_leaf_handle"):
            old = getattr(self, name)
            fill = -1 if name == "_leaf_handle" else 0
            fresh = np.full(cap, fill, dtype=old.dtype)
            fresh[: old.shape[0]] = old
            setattr(self, name, fresh)

    # -- handle plumbing ----------------------------------------------------

    def _live_slot(self, handle: int) -> int:
        if not (isinstance(handle, (int, np.integer)) and 0 <= handle < len(self._where)):
            raise self._stale(handle)
        slot = self._where[handle]
        if slot < 0:
            raise self._stale(handle)
        return slot

    def payload_of(self, handle: int):
        self._live_slot(handle)  # raises when stale
        return self._payloads[handle]

    # -- mutation ------------------------------------------------------------

    def add(self, payload, rate) -> int:
        rate = as_rate(rate)
        handle = len(self._payloads)
        self._payloads.append(payload)
        n = self._n
        if n == 0:
            self._ensure_capacity(1)
            self._rates[0] = rate
            self._weights[0] = 1
            self._leaf_handle[0] = handle
            self._where.append(0)
            self._n = 1
            self._last_refresh_ops = 1
        else:
            self._ensure_capacity(2 * n + 1)
            rates, weights, lh = self._rates, self._weights, self._leaf_handle
            split = n - 1          # shallowest leaf becomes internal
            moved = int(lh[split])
            rates[2 * n - 1] = rates[split]
            weights[2 * n - 1] = 1
            lh[2 * n - 1] = moved
            self._where[moved] = 2 * n - 1
            rates[2 * n] = rate
            weights[2 * n] = 1
            lh[2 * n] = handle
            self._where.append(2 * n)
            lh[split] = -1
            self._n = n + 1
            self._refresh_chain([split])
        if rate > 0.0:
            self._n_positive += 1
        return handle

    def delete(self, handle: int) -> None:
        slot = self._live_slot(handle)
        rates, weights, lh = self._rates, self._weights, self._leaf_handle
        removed = rates[slot]
        self._payloads[handle] = None
        self._where[handle] = -1
        n = self._n
        if n == 1:
            rates[0] = 0.0
            weights[0] = 0
            lh[0] = -1
            self._n = 0
        else:
            last, sib, parent = 2 * n - 2, 2 * n - 3, n - 2
            touched = [parent]
            if slot == last:
                self._move_leaf(sib, parent)
            elif slot == sib:
                self._move_leaf(last, parent)
            else:
                self._move_leaf(last, slot)
                self._move_leaf(sib, parent)
                touched.append(slot)
            for tail in (sib, last):
                rates[tail] = 0.0
                weights[tail] = 0
                lh[tail] = -1
            self._n = n - 1
            self._refresh_chain(touched)
        if removed > 0.0:
            self._n_positive -= 1

    def _move_leaf(self, src: int, dst: int) -> None:
        rates, weights, lh = self._rates, self._weights, self._leaf_handle
        moved = int(lh[src])
        rates[dst] = rates[src]
        weights[dst] = 1
        lh[dst] = moved
        self._where[moved] = dst

    def _refresh_chain(self, seeds) -> None:
        """Recompute rate and weight of every internal ancestor of seeds.

        Children are always processed before parents because a parent's
        slot index is strictly below its child's; a max-heap over slot
        indices with deduplication guarantees the order when several
        paths merge.
        """
        n_nodes = 2 * self._n - 1
        rates, weights = self._rates, self._weights
        heap: list[int] = []
        seen = set()
        for s in seeds:
            if s not in seen:
                seen.add(s)
                heapq.heappush(heap, -s)
        ops = 0
        while heap:
            i = -heapq.heappop(heap)
            left = 2 * i + 1
            if left < n_nodes:  # internal slots only; a promoted leaf is skipped
                rates[i] = rates[left] + rates[left + 1]
                weights[i] = weights[left] + weights[left + 1]
                ops += 1
            if i > 0:
                p = (i - 1) >> 1
                if p not in seen:
                    seen.add(p)
                    heapq.heappush(heap, -p)
        self._last_refresh_ops = ops

    def update(self, handle: int, rate) -> None:
        rate = as_rate(rate)
        slot = self._live_slot(handle)
        old = float(self._rates[slot])
        n_nodes = 2 * self._n - 1
        self._last_refresh_ops = self._kern.tree_set_rate(
            self._rates, n_nodes, slot, rate
        )
        self._n_positive += (rate > 0.0) - (old > 0.0)

    def update_leaves(self, changes) -> None:
        """Apply many (handle, rate) changes with one shared refresh pass.

        All handles and rates are validated before the first write, so a
        bad entry leaves the structure untouched.  Shared ancestors are
        recomputed once, not once per change.
        """
        changes = [(h, as_rate(r)) for h, r in changes]
        slots = [self._live_slot(h) for h, _ in changes]
        rates = self._rates
        n_nodes = 2 * self._n - 1
        writes = 0
        parents = []
        for slot, (_, rate) in zip(slots, changes):
            old = float(rates[slot])
            rates[slot] = rate
            writes += 1
            self._n_positive += (rate > 0.0) - (old > 0.0)
            if slot > 0:
                parents.append((slot - 1) >> 1)
        if parents:
            self._refresh_chain(parents)
            self._last_refresh_ops += writes
        else:
            self._last_refresh_ops = writes

    # -- queries -------------------------------------------------------------

    def extract(self, rng) -> tuple[int, object]:
        total = self.total_rate()
        if self._n_positive == 0 or total <= 0.0:
            raise EmptyStructureError("cannot extract: total rate is zero")
        gen = generator_of(rng)
        v = gen.random() * total
        clamp = np.nextafter(total, 0.0)
        if v > clamp:
            v = clamp
        slot = self._kern.tree_find(self._rates, 2 * self._n - 1, v)
        handle = int(self._leaf_handle[slot])
        return handle, self._payloads[handle]

    def extract_many(self, rng, n: int) -> np.ndarray:
        """Draw n outcomes; returns their handles as an int64 array."""
        total = self.total_rate()
        if self._n_positive == 0 or total <= 0.0:
            raise EmptyStructureError("cannot extract: total rate is zero")
        gen = generator_of(rng)
        slots = np.empty(int(n), dtype=np.int64)
        self._kern.tree_sample_many(self._rates, 2 * self._n - 1, gen, slots)
        return self._leaf_handle[slots]

    def total_rate(self) -> float:
        return float(self._rates[0]) if self._n else 0.0

    def __len__(self) -> int:
        return self._n_positive

    @property
    def n_leaves(self) -> int:
        """Leaves held in the tree, zero-rate ones included."""
        return self._n

    @property
    def last_refresh_ops(self) -> int:
        """Slots written by the most recent structural or rate change."""
        return self._last_refresh_ops

    def leaf_depth(self, handle: int) -> int:
        slot = self._live_slot(handle)
        return (slot + 1).bit_length() - 1

    def rate_of(self, handle: int) -> float:
        return float(self._rates[self._live_slot(handle)])

    # -- consistency ---------------------------------------------------------

    def validate(self) -> None:
        n = self._n
        if n == 0:
            _ensure(self._n_positive == 0, "positive count on empty tree")
            return
        n_nodes = 2 * n - 1
        rates = self._rates[:n_nodes]
        weights = self._weights[:n_nodes]
        lh = self._leaf_handle[:n_nodes]
        leaves = np.arange(n - 1, n_nodes)
        internal = np.arange(0, n - 1)

        _ensure(np.all(np.isfinite(rates)) and np.all(rates >= 0.0),
                "leaf rates must be finite and non-negative")

        # shape: leaf depths span at most two levels, deepest packed left
        depths = np.floor(np.log2(leaves + 1)).astype(np.int64)
        _ensure(depths.max() - depths.min() <= 1, "leaf depths span > 2 levels")
        deepest = leaves[depths == depths.max()]
        _ensure(deepest[0] == (1 << int(depths.max())) - 1
                and deepest[-1] == n_nodes - 1,
                "deepest level is not left-packed")

        if internal.size:
            _ensure(np.array_equal(rates[internal],
                                   rates[2 * internal + 1] + rates[2 * internal + 2]),
                    "internal rate differs from sum of children")
            _ensure(np.array_equal(weights[internal],
                                   weights[2 * internal + 1] + weights[2 * internal + 2]),
                    "internal weight differs from sum of children")
            _ensure(np.all(lh[internal] == -1), "internal slot owns a handle")
        _ensure(np.all(weights[leaves] == 1), "leaf weight must be 1")
        _ensure(int(weights[0]) == n, "root weight must equal leaf count")

        live = {h for h, s in enumerate(self._where) if s >= 0}
        _ensure(len(live) == n, "live handle count mismatch")
        for h in live:
            s = self._where[h]
            _ensure(n - 1 <= s <= n_nodes - 1, "handle points at a non-leaf")
            _ensure(int(lh[s]) == h, "slot/handle tables disagree")
        _ensure(self._n_positive == int(np.count_nonzero(rates[leaves])),
                "positive-rate count is stale")


def _ensure(cond, msg: str) -> None:
    if not cond:
        raise AssertionError("tree invariant violated: " + msg)
