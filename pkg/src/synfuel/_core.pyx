# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled dispatch kernel; semantic twin of ``synfuel._py_core``.

Backward pass over the convex piecewise-linear storage value function kept as
slope-ranked widths in a Fenwick tree; forward pass chases per-hour storage
target levels. Exact for the continuous problem.
"""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport free, malloc

cnp.import_array()

DEF DUST_REL = 1e-12


cdef inline void fen_add(double* tree, int n, int i, double w) noexcept:
    cdef int j = i + 1
    while j <= n:
        tree[j] += w
        j += j & (-j)


cdef inline double fen_prefix(double* tree, int i) noexcept:
    cdef double s = 0.0
    cdef int j = i
    while j > 0:
        s += tree[j]
        j -= j & (-j)
    return s


cdef inline int fen_find(double* tree, int n, int log, double k) noexcept:
    cdef int pos = 0
    cdef double rem = k
    cdef int bit = 1 << log
    cdef int nxt
    while bit:
        nxt = pos + bit
        if nxt <= n and tree[nxt] < rem:
            pos = nxt
            rem -= tree[nxt]
        bit >>= 1
    return pos


cdef void remove_low(double* tree, int n, int log,
                     double amount, double dust) noexcept:
    # point widths come from the tree itself so the search and the removal
    # can never disagree about residual dust
    cdef int r
    cdef double w, take
    while amount > dust:
        r = fen_find(tree, n, log, dust)
        if r >= n:
            break
        w = fen_prefix(tree, r + 1) - fen_prefix(tree, r)
        if w <= dust:
            if w != 0.0:
                fen_add(tree, n, r, -w)
            else:
                break
            continue
        take = w if w < amount else amount
        fen_add(tree, n, r, -take)
        amount -= take


cdef void remove_high(double* tree, int n, int log,
                      double amount, double dust) noexcept:
    cdef int r
    cdef double w, take, tot
    while amount > dust:
        tot = fen_prefix(tree, n)
        if tot <= dust:
            break
        r = fen_find(tree, n, log, tot - dust)
        w = fen_prefix(tree, r + 1) - fen_prefix(tree, r)
        if w <= dust:
            if w != 0.0:
                fen_add(tree, n, r, -w)
            else:
                break
            continue
        take = w if w < amount else amount
        fen_add(tree, n, r, -take)
        amount -= take


def solve_dispatch(c, double m, double d, double cap, double s0, double v_term):
    """Return (h, storage) arrays for the exact optimum.

    Caller guarantees d <= m, 0 <= s0 <= cap (see dispatch.optimize_dispatch).
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] carr = np.ascontiguousarray(c, dtype=np.float64)
    cdef int H = carr.shape[0]

    slopes = np.empty(H + 1)
    np.negative(carr, out=slopes[:H])
    slopes[H] = -v_term
    vals = np.unique(slopes)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ranks = np.searchsorted(vals, slopes).astype(np.int64)
    cdef int R = vals.shape[0]
    cdef int log = 0
    while (1 << log) <= R:
        log += 1

    cdef double scale = max(1.0, m, cap)
    cdef double dust = DUST_REL * scale

    cdef double* tree = <double*> malloc((R + 1) * sizeof(double))
    if tree == NULL:
        raise MemoryError()
    cdef int i
    for i in range(R + 1):
        tree[i] = 0.0

    cdef cnp.ndarray[cnp.float64_t, ndim=1] targets = np.empty(H)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] h = np.empty(H)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] storage = np.empty(H)

    cdef int t, r
    cdef double left_amt = m - d
    cdef double excess, s, lo, hi, z

    try:
        if cap > 0.0:
            fen_add(tree, R, <int> ranks[H], cap)

        for t in range(H - 1, -1, -1):
            r = <int> ranks[t]
            targets[t] = fen_prefix(tree, r)
            fen_add(tree, R, r, m)
            if left_amt > 0.0:
                remove_low(tree, R, log, left_amt, dust)
            excess = fen_prefix(tree, R) - cap
            if excess > 0.0:
                remove_high(tree, R, log, excess, dust)

        s = s0
        for t in range(H):
            lo = s - d
            if lo < 0.0:
                lo = 0.0
            hi = s + m - d
            if hi > cap:
                hi = cap
            z = targets[t]
            if z < lo:
                z = lo
            elif z > hi:
                z = hi
            h[t] = z - s + d
            storage[t] = z
            s = z
    finally:
        free(tree)

    return h, storage
