"""Numba-jitted kernels.

Same contracts as ``_kernels_numpy`` (see that module for the family-code
table and conventions).  All kernels are nopython-compiled with on-disk
caching so repeated runs skip compilation.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_U1 = np.uint64(1)


@njit(cache=True)
def _popcount(x):
    x = x - ((x >> _U1) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return (x * _H01) >> np.uint64(56)


@njit(cache=True)
def _value(code, n, c0, f_dim, sign, weights, table, x):
    if code == 0:
        return table[x]
    if code == 1:
        return np.int64(c0)
    if code == 2:
        bit = np.int64((x >> np.uint64(f_dim)) & _U1)
        if sign >= 0:
            return bit
        return np.int64(1) - bit
    if code == 3:
        return np.int64(_popcount(x) & _U1)
    acc = np.int64(0)
    for i in range(n):
        if (x >> np.uint64(i)) & _U1:
            acc += weights[i]
    return acc


@njit(cache=True)
def eval_points(code, n, c0, f_dim, sign, weights, table, xs):
    out = np.empty(xs.size, dtype=np.int64)
    for j in range(xs.size):
        out[j] = _value(code, n, c0, f_dim, sign, weights, table, xs[j])
    return out


@njit(cache=True)
def run_reps(code, n, c0, f_dim, sign, weights, table, dims, points):
    reps, m = points.shape
    for k in range(reps):
        i = dims[k]
        e = _U1 << np.uint64(i)
        has_pos = False
        has_neg = False
        wx = np.uint64(0)
        wy = np.uint64(0)
        for j in range(m):
            x = points[k, j]
            d = _value(code, n, c0, f_dim, sign, weights, table, x | e) - _value(
                code, n, c0, f_dim, sign, weights, table, x & ~e
            )
            if d > 0:
                if not has_pos:
                    has_pos = True
                    wx = x
            elif d < 0:
                if not has_neg:
                    has_neg = True
                    wy = x
        if has_pos and has_neg:
            return k + 1, True, np.int64(i), wx, wy
    return reps, False, np.int64(-1), np.uint64(0), np.uint64(0)


@njit(cache=True)
def violation_counts(table, n):
    up = np.zeros(n, dtype=np.int64)
    down = np.zeros(n, dtype=np.int64)
    size = table.size
    for i in range(n):
        e = 1 << i
        for x in range(size):
            if x & e == 0:
                d = table[x | e] - table[x]
                if d > 0:
                    up[i] += 2
                elif d < 0:
                    down[i] += 2
    return up, down
