"""Exact ground-truth oracles for small dimensions.

Distance to an orientation's monotone order is computed through the
violation graph: vertices are the 2^n points and edges are the comparable
pairs (x strictly below y in the orientation-twisted coordinate order) whose
values are out of order.  Any repair set must touch every violated pair, and
conversely changing f exactly on a vertex cover can always be completed to a
conforming function over an integer range (take, in increasing twisted
order, the maximum of the already-final predecessor values).  The minimum
vertex cover size is therefore exactly the number of points that must
change.

Everything here is exponential in n and guarded by a dimension cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .hypercube import (
    HypercubeFunction,
    ViolationProfile,
    violation_profile,
)

#: Default guard for the exponential oracles: 32 vertices, 32 orientations.
DEFAULT_DIMENSION_CAP = 5


class CapExceededError(ValueError):
    """Raised when an exact oracle is asked for a dimension above its cap."""


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise CapExceededError(
            f"exact oracle limited to n <= {cap} (got n={n}); "
            "raise cap explicitly if you accept the exponential cost"
        )


@dataclass(frozen=True)
class ViolationGraph:
    """All comparable pairs violated under an orientation's order.

    Pairs are in function space: (u, v) with u strictly below v in the
    b-twisted order (u^b is a proper submask of v^b) and f(u) > f(v).
    """

    n: int
    orientation: int
    pairs: tuple[tuple[int, int], ...]

    @property
    def num_pairs(self) -> int:
        return len(self.pairs)

    def edge_pairs(self) -> tuple[tuple[int, int], ...]:
        """The subset of pairs that are hypercube edges."""
        return tuple(
            (u, v) for (u, v) in self.pairs if ((u ^ v).bit_count() == 1)
        )


def violation_graph(
    f: HypercubeFunction, b: int, cap: int = DEFAULT_DIMENSION_CAP
) -> ViolationGraph:
    """Enumerate every violated comparable pair under orientation b."""
    n = f.n
    _check_cap(n, cap)
    if not 0 <= b < (1 << n):
        raise ValueError(f"orientation {b} out of range for n={n}")
    size = 1 << n
    # g(x) = f(x^b) is monotone in the plain subset order iff f respects b.
    g = f.values[np.arange(size) ^ b]
    pairs: list[tuple[int, int]] = []
    for y in range(size):
        if y == 0:
            continue
        gy = g[y]
        s = (y - 1) & y
        while True:
            if g[s] > gy:
                pairs.append((s ^ b, y ^ b))
            if s == 0:
                break
            s = (s - 1) & y
    pairs.sort()
    return ViolationGraph(n=n, orientation=b, pairs=tuple(pairs))


@dataclass(frozen=True)
class CoverResult:
    cover: tuple[int, ...]
    matching_lower: int

    @property
    def size(self) -> int:
        return len(self.cover)


def _edge_masks(pairs) -> list[int]:
    return [(1 << u) | (1 << v) for u, v in pairs]


def _greedy_matching(edges, covered_mask: int = 0) -> int:
    """Greedy maximal matching size among edges untouched by the cover."""
    used = covered_mask
    matched = 0
    for e in edges:
        if e & used == 0:
            used |= e
            matched += 1
    return matched


def _mask_to_vertices(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def _cover_search(edges, upper: int) -> Optional[int]:
    """Smallest vertex cover of size < upper, as a bitmask, else None.

    Branch and bound: branch on the first uncovered edge (cover either
    endpoint), prune with size + greedy-matching lower bound.  Edge order is
    fixed and the incumbent only improves strictly, so the result is
    deterministic.
    """
    best_mask: Optional[int] = None
    best_size = upper

    def search(cover_mask: int, size: int) -> None:
        nonlocal best_mask, best_size
        first = 0
        for e in edges:
            if e & cover_mask == 0:
                first = e
                break
        if first == 0:
            if size < best_size:
                best_size = size
                best_mask = cover_mask
            return
        if size + _greedy_matching(edges, cover_mask) >= best_size:
            return
        u = first & -first
        search(cover_mask | u, size + 1)
        search(cover_mask | (first ^ u), size + 1)

    search(0, 0)
    return best_mask


def min_vertex_cover(graph: ViolationGraph) -> CoverResult:
    """Exact minimum vertex cover of the violated pairs.

    The search starts just above the 2-approximation given by a maximal
    matching's endpoints, so a cover is always found.
    """
    pairs = graph.pairs
    if not pairs:
        return CoverResult(cover=(), matching_lower=0)
    edges = _edge_masks(pairs)
    matching_lower = _greedy_matching(edges)
    mask = _cover_search(edges, 2 * matching_lower + 1)
    assert mask is not None
    return CoverResult(cover=_mask_to_vertices(mask), matching_lower=matching_lower)


@dataclass(frozen=True)
class DistanceReport:
    """Exact distance of f to an orientation's order (or to unateness).

    distance = |cover| / 2^n.  The cover is a witness repair set: changing f
    exactly there (see ``apply_repair``) yields a conforming function, and
    no smaller set can.  matching_lower <= |cover| <= cover_upper always,
    with cover_upper = 2 * matching_lower.
    """

    n: int
    orientation: int
    distance: Fraction
    cover: tuple[int, ...]
    matching_lower: int
    num_violations: int

    @property
    def cover_upper(self) -> int:
        return 2 * self.matching_lower

    @property
    def cover_size(self) -> int:
        return len(self.cover)


def distance_to_b_monotone(
    f: HypercubeFunction, b: int, cap: int = DEFAULT_DIMENSION_CAP
) -> DistanceReport:
    graph = violation_graph(f, b, cap)
    result = min_vertex_cover(graph)
    return DistanceReport(
        n=f.n,
        orientation=b,
        distance=Fraction(result.size, 1 << f.n),
        cover=result.cover,
        matching_lower=result.matching_lower,
        num_violations=graph.num_pairs,
    )


def apply_repair(f: HypercubeFunction, b: int, cover) -> HypercubeFunction:
    """Rewrite f on the cover so the result respects orientation b.

    Working on g(x) = f(x^b), points are processed in increasing twisted
    order; each covered point takes the maximum of its immediate
    predecessors' already-final values (the retained minimum at the bottom
    vertex).  This conforms whenever the cover touches every violated
    comparable pair.
    """
    n = f.n
    size = 1 << n
    idx = np.arange(size)
    g = f.values[idx ^ b].astype(np.int64).copy()
    covered = {int(x) ^ b for x in cover}
    retained = [g[x] for x in range(size) if x not in covered]
    floor_value = int(min(retained)) if retained else 0
    for x in sorted(range(size), key=lambda v: (v.bit_count(), v)):
        if x not in covered:
            continue
        preds = [x ^ (1 << i) for i in range(n) if (x >> i) & 1]
        g[x] = max((int(g[p]) for p in preds), default=floor_value)
    return HypercubeFunction(n, g[idx ^ b])


def distance_to_unate(
    f: HypercubeFunction, cap: int = DEFAULT_DIMENSION_CAP
) -> DistanceReport:
    """Minimum over all orientations; ties keep the smallest orientation.

    Orientations share one incumbent cover size: a search that cannot beat
    the best cover found so far is cut off early, which leaves the minimum
    (and the first orientation attaining it) exact while skipping most of
    the per-orientation work.
    """
    _check_cap(f.n, cap)
    graphs = [violation_graph(f, b, cap) for b in range(1 << f.n)]
    best: Optional[DistanceReport] = None
    best_size = (1 << f.n) + 1
    for graph in graphs:
        edges = _edge_masks(graph.pairs)
        matching = _greedy_matching(edges)
        if matching >= best_size:
            continue  # cover of this orientation cannot beat the incumbent
        mask = _cover_search(edges, min(best_size, 2 * matching + 1))
        if mask is None:
            continue
        cover = _mask_to_vertices(mask)
        best_size = len(cover)
        best = DistanceReport(
            n=f.n,
            orientation=graph.orientation,
            distance=Fraction(best_size, 1 << f.n),
            cover=cover,
            matching_lower=matching,
            num_violations=graph.num_pairs,
        )
        if best_size == 0:
            break
    assert best is not None
    return best


def distance_upper_bound(
    f: HypercubeFunction, cap: int = DEFAULT_DIMENSION_CAP
) -> Fraction:
    """Cheap upper bound on the distance to unateness.

    For each orientation the endpoints of a maximal matching form a cover,
    so min over orientations of twice the matching size bounds the true
    minimum cover from above.  No branch and bound involved.
    """
    _check_cap(f.n, cap)
    best = 1 << f.n
    for b in range(1 << f.n):
        edges = _edge_masks(violation_graph(f, b, cap).pairs)
        best = min(best, 2 * _greedy_matching(edges))
        if best == 0:
            break
    return Fraction(best, 1 << f.n)


@dataclass(frozen=True)
class DimensionReductionReport:
    """Comparison of exact distance against per-dimension violation mass.

    mu[i] is the fraction of points whose derivative along i has the sign
    orientation b forbids.  ``holds`` checks sum(mu) >= eps/4, the bound the
    tester's analysis relies on; ``holds_half`` tracks the stronger eps/2
    variant, reported but deliberately never asserted.
    """

    n: int
    orientation: int
    eps_exact: Fraction
    mu: tuple[Fraction, ...]

    @property
    def sum_mu(self) -> Fraction:
        return sum(self.mu, Fraction(0))

    @property
    def holds(self) -> bool:
        return self.sum_mu >= self.eps_exact / 4

    @property
    def holds_half(self) -> bool:
        return self.sum_mu >= self.eps_exact / 2


def verify_dimension_reduction(
    f: HypercubeFunction,
    b: int,
    cap: int = DEFAULT_DIMENSION_CAP,
    profile: Optional[ViolationProfile] = None,
) -> DimensionReductionReport:
    report = distance_to_b_monotone(f, b, cap)
    if profile is None:
        profile = violation_profile(f)
    return DimensionReductionReport(
        n=f.n,
        orientation=b,
        eps_exact=report.distance,
        mu=profile.one_sided_fractions(b),
    )
