"""Pure-numpy kernels.

Reference implementations of the hot loops, used when numba is missing or
when ``UNATE_PURE_NUMPY=1`` is set.  Signatures are identical to the jitted
versions in ``_kernels_numba``; the dispatcher in ``_kernels`` picks one
backend at import time.

Family codes (must match ``_kernels_numba``):
    0 truth-table lookup, 1 constant, 2 dictator, 3 parity,
    4 weighted threshold.

Point indices are uint64; bit i of an index is coordinate i.  Truth tables
and function values are int64.
"""

from __future__ import annotations

import numpy as np

_ONE = np.uint64(1)


def eval_points(code, n, c0, f_dim, sign, weights, table, xs):
    """Evaluate f on a 1-D uint64 array of point indices; returns int64."""
    if code == 0:
        return table[xs]
    if code == 1:
        return np.full(xs.shape, c0, dtype=np.int64)
    if code == 2:
        bits = ((xs >> np.uint64(f_dim)) & _ONE).astype(np.int64)
        return bits if sign >= 0 else 1 - bits
    if code == 3:
        return (np.bitwise_count(xs).astype(np.int64)) & 1
    if code == 4:
        shifts = np.arange(n, dtype=np.uint64)
        bits = ((xs[:, None] >> shifts) & _ONE).astype(np.int64)
        return bits @ weights
    raise ValueError(f"unknown family code {code!r}")


def run_reps(code, n, c0, f_dim, sign, weights, table, dims, points):
    """Run sample-and-compare repetitions until one sees both derivative signs.

    ``dims[k]`` is the dimension for repetition k and ``points[k]`` its
    sampled points (uint64, shape (reps, m)).  Every executed repetition
    evaluates f on both endpoints of each sampled point's edge, so it costs
    2*m queries whether or not it finds a witness.

    Returns ``(reps_executed, found, dim, x, y)`` where x has a strictly
    positive and y a strictly negative derivative in ``dim``; the last three
    entries are placeholders when ``found`` is False.
    """
    reps = points.shape[0]
    for k in range(reps):
        i = int(dims[k])
        e = _ONE << np.uint64(i)
        xs = points[k]
        upper = eval_points(code, n, c0, f_dim, sign, weights, table, xs | e)
        lower = eval_points(code, n, c0, f_dim, sign, weights, table, xs & ~e)
        d = upper - lower
        pos = np.flatnonzero(d > 0)
        neg = np.flatnonzero(d < 0)
        if pos.size and neg.size:
            return k + 1, True, i, int(xs[pos[0]]), int(xs[neg[0]])
    return reps, False, -1, 0, 0


def violation_counts(table, n):
    """Per-dimension counts of points with strictly positive / strictly
    negative derivative.

    Both endpoints of an edge share the edge's derivative, so each count is
    twice the corresponding edge count (and therefore even).
    """
    idx = np.arange(table.size, dtype=np.int64)
    up = np.zeros(n, dtype=np.int64)
    down = np.zeros(n, dtype=np.int64)
    for i in range(n):
        e = np.int64(1) << np.int64(i)
        lo = idx[(idx & e) == 0]
        d = table[lo | e] - table[lo]
        up[i] = 2 * int(np.count_nonzero(d > 0))
        down[i] = 2 * int(np.count_nonzero(d < 0))
    return up, down
