"""Deterministic primitives on the Boolean hypercube.

Conventions used throughout the package:

* A point of {0,1}^n is a plain int in [0, 2^n); bit i of the index (least
  significant first) is coordinate x_i.
* Function values are signed 64-bit integers; any totally ordered range can
  be embedded, and integers keep all downstream arithmetic exact.
* An orientation is an int bitmask b in [0, 2^n): bit i is b_i.  b_i = 0
  asks dimension i to be non-decreasing, b_i = 1 non-increasing.
  ``orientation_bits`` renders it with b_0 first.

The derivative of f along dimension i at x is f(x|e_i) - f(x&~e_i): both
endpoints of an i-edge see the same value, which equals
f(x^e_i) - f(x) when x_i = 0 and f(x) - f(x^e_i) when x_i = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import _kernels

#: Largest dimension for which explicit truth tables are supported.
MAX_TABLE_DIM = 30

_INT64_MIN = -(2**63)
_INT64_MAX = 2**63 - 1


def _check_dimension(i: int, n: int) -> None:
    if not 0 <= i < n:
        raise ValueError(f"dimension {i} out of range for n={n}")


def point_flip(x: int, i: int, n: int) -> int:
    """Toggle coordinate i of point x; an involution."""
    _check_dimension(i, n)
    if not 0 <= x < (1 << n):
        raise ValueError(f"point {x} out of range for n={n}")
    return x ^ (1 << i)


def orientation_bits(b: int, n: int) -> str:
    """Render orientation b as a bit string with b_0 leftmost."""
    return "".join("1" if (b >> i) & 1 else "0" for i in range(n))


class HypercubeFunction:
    """Explicit truth table of f: {0,1}^n -> int64, indexed by point."""

    __slots__ = ("n", "values")

    def __init__(self, n: int, values) -> None:
        if not 1 <= n <= MAX_TABLE_DIM:
            raise ValueError(f"n must be in [1, {MAX_TABLE_DIM}], got {n}")
        arr = np.asarray(values, dtype=np.int64)
        if arr.ndim != 1 or arr.size != (1 << n):
            raise ValueError(
                f"expected {1 << n} values for n={n}, got shape {arr.shape}"
            )
        arr = arr.copy()
        arr.setflags(write=False)
        self.n = n
        self.values = arr

    def __call__(self, x: int) -> int:
        return int(self.values[x])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HypercubeFunction):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.values, other.values))

    def __repr__(self) -> str:
        body = np.array2string(self.values, threshold=16, separator=", ")
        return f"HypercubeFunction(n={self.n}, values={body})"


def partial_derivative(f: HypercubeFunction, i: int, x: int) -> int:
    """Signed derivative of f along dimension i at point x.

    Constant across the two endpoints of an i-edge, so
    partial_derivative(f, i, x) == partial_derivative(f, i, x^e_i).
    """
    _check_dimension(i, f.n)
    if not 0 <= x < (1 << f.n):
        raise ValueError(f"point {x} out of range for n={f.n}")
    e = 1 << i
    return int(f.values[x | e]) - int(f.values[x & ~e])


@dataclass(frozen=True)
class ViolationProfile:
    """Per-dimension counts of points with strictly signed derivatives.

    up_counts[i] = |{x : derivative_i(x) > 0}| and analogously down_counts
    for < 0.  Both are even: the two endpoints of an edge share its
    derivative.  mu[i] = min(up, down)/2^n is the two-sided violation mass
    of dimension i; a function is unate iff every mu[i] is zero.
    """

    n: int
    up_counts: tuple[int, ...]
    down_counts: tuple[int, ...]

    @property
    def num_points(self) -> int:
        return 1 << self.n

    @property
    def zero_counts(self) -> tuple[int, ...]:
        size = self.num_points
        return tuple(
            size - u - d for u, d in zip(self.up_counts, self.down_counts)
        )

    @property
    def mu(self) -> tuple[Fraction, ...]:
        size = self.num_points
        return tuple(
            Fraction(min(u, d), size)
            for u, d in zip(self.up_counts, self.down_counts)
        )

    def one_sided_counts(self, b: int) -> tuple[int, ...]:
        """Points per dimension whose derivative has the sign b forbids."""
        return tuple(
            self.up_counts[i] if (b >> i) & 1 else self.down_counts[i]
            for i in range(self.n)
        )

    def one_sided_fractions(self, b: int) -> tuple[Fraction, ...]:
        size = self.num_points
        return tuple(Fraction(c, size) for c in self.one_sided_counts(b))


def violation_profile(f: HypercubeFunction) -> ViolationProfile:
    """Exact up/down/zero derivative-sign counts for every dimension."""
    up, down = _kernels.violation_counts(f.values, f.n)
    return ViolationProfile(f.n, tuple(int(v) for v in up), tuple(int(v) for v in down))


def is_b_monotone(f: HypercubeFunction, b: int) -> bool:
    """True iff every derivative respects orientation b everywhere."""
    if not 0 <= b < (1 << f.n):
        raise ValueError(f"orientation {b} out of range for n={f.n}")
    profile = violation_profile(f)
    return all(c == 0 for c in profile.one_sided_counts(b))


def is_unate(f: HypercubeFunction) -> Optional[int]:
    """Witnessing orientation if one exists, else None.

    Dimension i gets b_i = 1 only when it has a strictly negative
    derivative somewhere; dimensions with all-zero derivatives report
    b_i = 0, making the witness canonical.
    """
    profile = violation_profile(f)
    b = 0
    for i, (u, d) in enumerate(zip(profile.up_counts, profile.down_counts)):
        if u > 0 and d > 0:
            return None
        if d > 0:
            b |= 1 << i
    return b


def check_range_value(v: int) -> int:
    """Validate that v fits the signed 64-bit function range."""
    if not _INT64_MIN <= v <= _INT64_MAX:
        raise ValueError(f"value {v} outside the signed 64-bit range")
    return int(v)


def all_points(n: int) -> Sequence[int]:
    """All point indices of {0,1}^n in increasing order."""
    return range(1 << n)
