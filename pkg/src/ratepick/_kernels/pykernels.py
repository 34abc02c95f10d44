"""Pure numpy implementation of the sampler hot loops.

This module mirrors ``ckernels`` (the compiled extension) function for
function; the package works identically, only slower, when the extension
is not built.

Draw protocol, shared by both engines:

* tree descent: one uniform per extraction.
* rejection table: per attempt, one uniform for the candidate index and
  one for the acceptance threshold (two-draw form).  With
  ``reuse_draw=True`` the fractional part of ``u * n`` is recycled as the
  threshold, spending a single uniform per attempt at the cost of a few
  low bits of threshold resolution.
* grouped rejection: one uniform for the group scan, then table attempts.

Single-result functions consume the stream strictly sequentially and are
bit-identical across engines.  The batch functions here are vectorised in
chunks: results still depend on the same prefix of the stream (so outputs
match the compiled engine draw for draw on the tree), but rejection
batches may consume more uniforms than the attempts they report.  Stream
position after a batch call is therefore not part of the contract.
"""

from __future__ import annotations

import numpy as np

CHUNK = 1 << 16


# ---------------------------------------------------------------------------
# nearly-complete binary tree, implicit heap layout
#
# Slot i has children 2i+1 and 2i+2.  A tree over N leaves occupies
# slots 0..2N-2: internal slots 0..N-2, leaves N-1..2N-2.

def tree_refresh_all(rates, weights, n_nodes):
    """Recompute every internal rate and weight from the leaves up."""
    n_internal = (n_nodes - 1) // 2
    if n_internal <= 0:
        return
    # level k spans slots 2^k-1 .. 2^(k+1)-2; walk levels bottom-up
    k = 0
    while (2 << k) - 1 < n_internal:
        k += 1
    while k >= 0:
        a = (1 << k) - 1
        b = min((2 << k) - 1, n_internal)
        if a < b:
            rates[a:b] = rates[2 * a + 1 : 2 * b : 2] + rates[2 * a + 2 : 2 * b + 1 : 2]
            weights[a:b] = (
                weights[2 * a + 1 : 2 * b : 2] + weights[2 * a + 2 : 2 * b + 1 : 2]
            )
        k -= 1


def tree_set_rate(rates, n_nodes, slot, rate):
    """Write one leaf rate and recompute its ancestors. Returns slots written."""
    rates[slot] = rate
    writes = 1
    i = slot
    while i > 0:
        i = (i - 1) >> 1
        rates[i] = rates[2 * i + 1] + rates[2 * i + 2]
        writes += 1
    return writes


def tree_find(rates, n_nodes, value):
    """Descend from the root; returns the leaf slot owning ``value``.

    At each internal slot: go left when value is strictly below the left
    child's rate, otherwise subtract that rate and go right.  The strict
    comparison makes zero-rate leaves unreachable for any value in
    [0, total).
    """
    i = 0
    while True:
        left = 2 * i + 1
        if left >= n_nodes:
            return i
        lr = rates[left]
        if value < lr:
            i = left
        else:
            value -= lr
            i = left + 1


def tree_sample_many(rates, n_nodes, gen, out_slots):
    """Draw len(out_slots) leaves; one uniform per draw.

    All draws descend one level per pass, which turns the descent into a
    handful of full-array numpy operations instead of a python loop per
    draw.  The arithmetic per draw is identical to tree_find.
    """
    n = out_slots.shape[0]
    total = rates[0]
    v = gen.random(n)
    v *= total
    np.minimum(v, np.nextafter(total, 0.0), out=v)  # u*total can round up to total
    idx = np.zeros(n, dtype=np.int64)
    while True:
        left = 2 * idx + 1
        active = left < n_nodes
        if not active.any():
            break
        lr = rates[np.where(active, left, 0)]
        go_left = v < lr
        idx = np.where(active, np.where(go_left, left, left + 1), idx)
        v = np.where(active & ~go_left, v - lr, v)
    out_slots[:] = idx


# ---------------------------------------------------------------------------
# rejection table

def table_pick(rates, n, ceiling, max_attempts, gen, reuse_draw=False):
    """One rejection draw from rates[0:n]. Returns (position, attempts).

    Position -1 signals that max_attempts was exhausted.  Entries must be
    positive and no larger than ceiling.
    """
    attempts = 0
    while attempts < max_attempts:
        attempts += 1
        if reuse_draw:
            x = gen.random() * n
            idx = int(x)
            if idx >= n:
                idx = n - 1
            threshold = (x - idx) * ceiling
        else:
            idx = int(gen.random() * n)
            if idx >= n:
                idx = n - 1
            threshold = gen.random() * ceiling
        if rates[idx] >= threshold:
            return idx, attempts
    return -1, attempts


def table_pick_many(rates, n, ceiling, max_attempts, gen, out_pos, out_att,
                    reuse_draw=False):
    """Batch rejection draws from rates[0:n].

    Attempts are generated in chunks and scanned for acceptances; the k-th
    accepted attempt becomes the k-th result, exactly as if table_pick had
    been called in a loop.  On failure out_pos[k] is set to -1 and the
    function returns early.
    """
    ndraws = out_pos.shape[0]
    filled = 0
    gap = 0  # failed attempts carried from previous chunks
    boost = 1  # doubles whenever a whole chunk yields nothing
    while filled < ndraws:
        # Chunk length never changes which attempt produces which result,
        # it only sets how far ahead we vectorise; size it to the work left.
        chunk = min(CHUNK, max(64, 4 * (ndraws - filled) * boost))
        if reuse_draw:
            x = gen.random(chunk) * n
            idx = x.astype(np.int64)
            np.minimum(idx, n - 1, out=idx)
            threshold = (x - idx) * ceiling
        else:
            u = gen.random(2 * chunk)
            x = u[0::2] * n
            idx = x.astype(np.int64)
            np.minimum(idx, n - 1, out=idx)
            threshold = u[1::2] * ceiling
        hits = np.flatnonzero(rates[idx] >= threshold)
        if hits.shape[0] == 0:
            gap += chunk
            boost = min(2 * boost, CHUNK)
            if gap >= max_attempts:
                out_pos[filled] = -1
                out_att[filled] = gap
                return
            continue
        take = min(hits.shape[0], ndraws - filled)
        kept = hits[:take]
        att = np.diff(kept, prepend=-1)
        att[0] += gap
        if att.max() > max_attempts:
            bad = int(np.argmax(att > max_attempts))
            out_pos[filled + bad] = -1
            out_att[filled + bad] = att[bad]
            return
        out_pos[filled : filled + take] = idx[kept]
        out_att[filled : filled + take] = att
        filled += take
        gap = chunk - 1 - int(kept[-1]) if take == hits.shape[0] else 0
    return


# ---------------------------------------------------------------------------
# grouped rejection (linear scan over group sums, then an in-group table)

def group_scan(sums, n_groups, value):
    """First group whose sum exceeds the running value; -1 on overrun.

    Zero-sum groups are skipped without disturbing the running value.
    """
    for i in range(n_groups):
        s = sums[i]
        if s > value:
            return i
        if s > 0.0:
            value -= s
    return -1


def cr_sample_many(sums, tables, ns, ceilings, total, max_attempts, gen,
                   out_group, out_pos, out_att):
    """Batch draws from a grouped rejection structure.

    One uniform per draw selects the group (equivalent to the linear
    subtract-scan, evaluated via the prefix sums), then each group's draws
    are served by its rejection table.  Group choice per draw matches the
    sequential semantics; the interleaving of in-group attempt draws is an
    engine detail.
    """
    ndraws = out_group.shape[0]
    v = gen.random(ndraws) * total
    cum = np.cumsum(np.clip(sums, 0.0, None))
    g = np.searchsorted(cum, v, side="right")
    nonempty = np.flatnonzero(ns > 0)
    np.minimum(g, nonempty[-1], out=g)  # float overrun lands in last live group
    out_group[:] = g
    for gi in np.unique(g):
        mask = g == gi
        k = int(np.count_nonzero(mask))
        pos = np.empty(k, dtype=np.int64)
        att = np.empty(k, dtype=np.int64)
        table_pick_many(tables[gi], int(ns[gi]), float(ceilings[gi]),
                        max_attempts, gen, pos, att)
        out_pos[mask] = pos
        out_att[mask] = att
        if (pos == -1).any():
            return
