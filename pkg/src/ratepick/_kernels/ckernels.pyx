# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twins of the pure kernels.

See pykernels for the draw protocol.  Every function here consumes the
underlying bit stream strictly sequentially, one attempt at a time, by
pulling doubles straight from the numpy bit generator's C interface.
"""

from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport nextafter
from libc.stdlib cimport free, malloc
from numpy.random cimport bitgen_t

cimport numpy as cnp

cnp.import_array()


cdef inline bitgen_t *_bitgen(object gen) except NULL:
    # numpy exposes the C callable table through a capsule on the bit generator
    return <bitgen_t *> PyCapsule_GetPointer(gen.bit_generator.capsule, "BitGenerator")


# ---------------------------------------------------------------------------
# nearly-complete binary tree, implicit heap layout

def tree_refresh_all(double[::1] rates, cnp.int64_t[::1] weights, Py_ssize_t n_nodes):
    """Recompute every internal rate and weight from the leaves up."""
    cdef Py_ssize_t i
    for i in range((n_nodes - 1) // 2 - 1, -1, -1):
        rates[i] = rates[2 * i + 1] + rates[2 * i + 2]
        weights[i] = weights[2 * i + 1] + weights[2 * i + 2]


def tree_set_rate(double[::1] rates, Py_ssize_t n_nodes, Py_ssize_t slot, double rate):
    """Write one leaf rate and recompute its ancestors. Returns slots written."""
    cdef Py_ssize_t writes = 1
    cdef Py_ssize_t i = slot
    rates[slot] = rate
    while i > 0:
        i = (i - 1) >> 1
        rates[i] = rates[2 * i + 1] + rates[2 * i + 2]
        writes += 1
    return writes


def tree_find(double[::1] rates, Py_ssize_t n_nodes, double value):
    """Descend from the root; returns the leaf slot owning ``value``."""
    cdef Py_ssize_t i = 0
    cdef Py_ssize_t left
    cdef double lr
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


def tree_sample_many(double[::1] rates, Py_ssize_t n_nodes, object gen,
                     cnp.int64_t[::1] out_slots):
    """Draw len(out_slots) leaves; one uniform per draw."""
    cdef bitgen_t *bg = _bitgen(gen)
    cdef double total = rates[0]
    cdef double clamp = nextafter(total, 0.0)
    cdef Py_ssize_t k, i, left
    cdef double v, lr
    for k in range(out_slots.shape[0]):
        v = bg.next_double(bg.state) * total
        if v > clamp:
            v = clamp
        i = 0
        while True:
            left = 2 * i + 1
            if left >= n_nodes:
                break
            lr = rates[left]
            if v < lr:
                i = left
            else:
                v -= lr
                i = left + 1
        out_slots[k] = i


# ---------------------------------------------------------------------------
# rejection table

def table_pick(double[::1] rates, Py_ssize_t n, double ceiling,
               long long max_attempts, object gen, bint reuse_draw=False):
    """One rejection draw from rates[0:n]. Returns (position, attempts)."""
    cdef bitgen_t *bg = _bitgen(gen)
    cdef long long attempts = 0
    cdef Py_ssize_t idx
    cdef double x, threshold
    while attempts < max_attempts:
        attempts += 1
        if reuse_draw:
            x = bg.next_double(bg.state) * n
            idx = <Py_ssize_t> x
            if idx >= n:
                idx = n - 1
            threshold = (x - idx) * ceiling
        else:
            idx = <Py_ssize_t> (bg.next_double(bg.state) * n)
            if idx >= n:
                idx = n - 1
            threshold = bg.next_double(bg.state) * ceiling
        if rates[idx] >= threshold:
            return idx, attempts
    return -1, attempts


def table_pick_many(double[::1] rates, Py_ssize_t n, double ceiling,
                    long long max_attempts, object gen,
                    cnp.int64_t[::1] out_pos, cnp.int64_t[::1] out_att,
                    bint reuse_draw=False):
    """Batch rejection draws; on failure out_pos[k] = -1 and return early."""
    cdef bitgen_t *bg = _bitgen(gen)
    cdef Py_ssize_t k, idx
    cdef long long attempts
    cdef double x, threshold
    for k in range(out_pos.shape[0]):
        attempts = 0
        while True:
            attempts += 1
            if reuse_draw:
                x = bg.next_double(bg.state) * n
                idx = <Py_ssize_t> x
                if idx >= n:
                    idx = n - 1
                threshold = (x - idx) * ceiling
            else:
                idx = <Py_ssize_t> (bg.next_double(bg.state) * n)
                if idx >= n:
                    idx = n - 1
                threshold = bg.next_double(bg.state) * ceiling
            if rates[idx] >= threshold:
                out_pos[k] = idx
                out_att[k] = attempts
                break
            if attempts >= max_attempts:
                out_pos[k] = -1
                out_att[k] = attempts
                return


# ---------------------------------------------------------------------------
# grouped rejection

def group_scan(double[::1] sums, Py_ssize_t n_groups, double value):
    """First group whose sum exceeds the running value; -1 on overrun."""
    cdef Py_ssize_t i
    cdef double s
    for i in range(n_groups):
        s = sums[i]
        if s > value:
            return i
        if s > 0.0:
            value -= s
    return -1


def cr_sample_many(double[::1] sums, list tables, cnp.int64_t[::1] ns,
                   double[::1] ceilings, double total, long long max_attempts,
                   object gen, cnp.int64_t[::1] out_group,
                   cnp.int64_t[::1] out_pos, cnp.int64_t[::1] out_att):
    """Batch draws from a grouped rejection structure, fully sequential."""
    cdef bitgen_t *bg = _bitgen(gen)
    cdef Py_ssize_t ng = sums.shape[0]
    cdef Py_ssize_t ndraws = out_group.shape[0]
    cdef Py_ssize_t k, i, g, idx, gn, last_ne
    cdef long long attempts
    cdef double v, s, threshold, gc
    cdef double *gr
    cdef double[::1] mv

    last_ne = -1
    for i in range(ng - 1, -1, -1):
        if ns[i] > 0:
            last_ne = i
            break

    # cache raw pointers so the per-draw loop never touches python objects
    cdef double **ptrs = <double **> malloc(ng * sizeof(double *))
    if ptrs == NULL:
        raise MemoryError
    try:
        for i in range(ng):
            mv = tables[i]
            if mv.shape[0] > 0:
                ptrs[i] = &mv[0]
            else:
                ptrs[i] = NULL

        for k in range(ndraws):
            v = bg.next_double(bg.state) * total
            g = -1
            for i in range(ng):
                s = sums[i]
                if s > v:
                    g = i
                    break
                if s > 0.0:
                    v -= s
            if g == -1:
                g = last_ne
            out_group[k] = g
            gr = ptrs[g]
            gn = ns[g]
            gc = ceilings[g]
            attempts = 0
            while True:
                attempts += 1
                idx = <Py_ssize_t> (bg.next_double(bg.state) * gn)
                if idx >= gn:
                    idx = gn - 1
                threshold = bg.next_double(bg.state) * gc
                if gr[idx] >= threshold:
                    out_pos[k] = idx
                    out_att[k] = attempts
                    break
                if attempts >= max_attempts:
                    out_pos[k] = -1
                    out_att[k] = attempts
                    return
    finally:
        free(ptrs)
