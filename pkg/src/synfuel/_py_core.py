"""Pure-Python dispatch kernel: exact hourly storage/production optimization.

Solves  min  sum_t c[t]*h[t] - v_term*S[H-1]
        s.t. h[t] in [0, m],  S[t] = S[t-1] + h[t] - d,  0 <= S[t] <= cap,

where h is hourly hydrogen production (kg/h), d the constant process draw,
cap the storage capacity and v_term the terminal credit per kg left in store.

Method: backward dynamic programming over the convex piecewise-linear value
function of the storage level, represented as a multiset of (slope, width)
pieces over a Fenwick tree keyed by slope rank. Each backward step reduces to
three O(log n) multiset edits, and yields the hour's optimal storage *target
level*; the forward pass chases the targets under the rate bounds. This is
exact for the continuous problem (no discretization).

A compiled twin of this module lives in ``synfuel._core``; keep the two
implementations semantically identical.
"""

from __future__ import annotations

import numpy as np

# widths below this fraction of the problem scale are treated as zero
_DUST_REL = 1e-12


class _Fenwick:
    __slots__ = ("n", "tree", "_log")

    def __init__(self, n: int):
        self.n = n
        self.tree = [0.0] * (n + 1)
        self._log = n.bit_length()

    def add(self, i: int, w: float) -> None:
        i += 1
        tree = self.tree
        n = self.n
        while i <= n:
            tree[i] += w
            i += i & (-i)

    def prefix(self, i: int) -> float:
        """Sum of widths at ranks < i."""
        s = 0.0
        tree = self.tree
        while i > 0:
            s += tree[i]
            i -= i & (-i)
        return s

    def find(self, k: float) -> int:
        """Smallest rank r with cumulative width through r >= k."""
        pos = 0
        rem = k
        bit = 1 << self._log
        tree = self.tree
        n = self.n
        while bit:
            nxt = pos + bit
            if nxt <= n and tree[nxt] < rem:
                pos = nxt
                rem -= tree[nxt]
            bit >>= 1
        return pos


def _remove_low(fen: _Fenwick, amount: float, dust: float) -> None:
    # point widths come from the tree itself so the search and the removal
    # can never disagree about residual dust
    while amount > dust:
        r = fen.find(dust)
        if r >= fen.n:
            break
        w = fen.prefix(r + 1) - fen.prefix(r)
        if w <= dust:
            if w != 0.0:
                fen.add(r, -w)
            else:
                break
            continue
        take = w if w < amount else amount
        fen.add(r, -take)
        amount -= take


def _remove_high(fen: _Fenwick, amount: float, dust: float) -> None:
    while amount > dust:
        tot = fen.prefix(fen.n)
        if tot <= dust:
            break
        r = fen.find(tot - dust)
        w = fen.prefix(r + 1) - fen.prefix(r)
        if w <= dust:
            if w != 0.0:
                fen.add(r, -w)
            else:
                break
            continue
        take = w if w < amount else amount
        fen.add(r, -take)
        amount -= take


def solve_dispatch(c, m, d, cap, s0, v_term):
    """Return (h, storage) arrays for the exact optimum.

    Caller guarantees d <= m, 0 <= s0 <= cap (see dispatch.optimize_dispatch).
    """
    c = np.ascontiguousarray(c, dtype=np.float64)
    H = c.shape[0]
    slopes = np.empty(H + 1)
    np.negative(c, out=slopes[:H])
    slopes[H] = -v_term
    vals = np.unique(slopes)
    ranks = np.searchsorted(vals, slopes)
    R = int(vals.shape[0])

    scale = max(1.0, m, cap)
    dust = _DUST_REL * scale

    fen = _Fenwick(R)
    if cap > 0.0:
        fen.add(int(ranks[H]), cap)

    targets = np.empty(H)
    left_amt = m - d
    for t in range(H - 1, -1, -1):
        r = int(ranks[t])
        targets[t] = fen.prefix(r)
        fen.add(r, m)
        if left_amt > 0.0:
            _remove_low(fen, left_amt, dust)
        excess = fen.prefix(R) - cap
        if excess > 0.0:
            _remove_high(fen, excess, dust)

    h = np.empty(H)
    storage = np.empty(H)
    s = float(s0)
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
    return h, storage
