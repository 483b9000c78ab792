"""The non-adaptive unateness tester and its analysis-side computations.

The tester runs rounds r = 1..L, L minimal with 2^L * eps >= 8n.  Round r
repeats s_r = ceil(20n / (eps 2^r)) times; each repetition samples one
dimension uniformly, then m_r = 3 * 2^r points uniformly with replacement,
evaluates the derivative along the sampled dimension at every point (two
function queries per point), and rejects outright if both a strictly
positive and a strictly negative derivative were seen.  Rejection aborts
the run, so the reported query count is the count actually issued; on the
accept path it always equals the schedule's closed form.

All schedule arithmetic is exact: eps is a Fraction and L and s_r come from
integer comparisons, never floating logs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from . import _kernels
from .hypercube import HypercubeFunction, ViolationProfile
from .oracles import FunctionOracle, from_table

RngLike = Union[int, np.random.Generator]


def as_fraction(eps) -> Fraction:
    """Exact rational from int, Fraction, or a 'p/q' / decimal string.

    Floats are rejected: a floating 0.1 would silently perturb L and s_r.
    """
    if isinstance(eps, float):
        raise TypeError(
            "eps must be an exact rational (Fraction, int, or string), not float"
        )
    return Fraction(eps)


def _as_rng(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def num_rounds(n: int, eps: Fraction) -> int:
    """Smallest L >= 1 with 2^L * eps >= 8n, by integer comparison."""
    target = 8 * n * eps.denominator
    level = 1
    power = 2
    while power * eps.numerator < target:
        level += 1
        power <<= 1
    return level


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class RoundSpec:
    r: int
    reps: int          # s_r
    sample_size: int   # m_r = 3 * 2^r

    @property
    def queries(self) -> int:
        return 2 * self.reps * self.sample_size


@dataclass(frozen=True)
class TesterSchedule:
    n: int
    eps: Fraction
    rounds: tuple[RoundSpec, ...]

    @property
    def num_rounds(self) -> int:
        return len(self.rounds)

    @property
    def total_queries(self) -> int:
        """Closed-form accept-path query count: 2 * sum of s_r * m_r."""
        return sum(spec.queries for spec in self.rounds)


def build_schedule(n: int, eps) -> TesterSchedule:
    eps = as_fraction(eps)
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if not 0 < eps <= 1:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    level = num_rounds(n, eps)
    rounds = tuple(
        RoundSpec(
            r=r,
            reps=_ceil_div(20 * n * eps.denominator, eps.numerator * (1 << r)),
            sample_size=3 * (1 << r),
        )
        for r in range(1, level + 1)
    )
    return TesterSchedule(n=n, eps=eps, rounds=rounds)


def schedule_query_bound(n: int, eps) -> Fraction:
    """Term-by-term envelope: 120 n L / eps + 6 (2^(L+1) - 2)."""
    eps = as_fraction(eps)
    level = num_rounds(n, eps)
    return Fraction(120 * n * level, 1) / eps + 6 * ((1 << (level + 1)) - 2)


class Witness(NamedTuple):
    """A unateness refutation: derivative along dim is > 0 at x, < 0 at y."""

    dim: int
    x: int
    y: int


@dataclass(frozen=True)
class RoundStats:
    r: int
    sample_size: int
    reps_scheduled: int
    reps_executed: int


@dataclass(frozen=True)
class TesterReport:
    verdict: str  # "accept" | "reject"
    witness: Optional[Witness]
    total_queries: int
    rounds: tuple[RoundStats, ...]
    schedule: TesterSchedule
    seed: Optional[int] = None

    @property
    def rejected(self) -> bool:
        return self.verdict == "reject"

    @property
    def dimensions_sampled(self) -> int:
        return sum(s.reps_executed for s in self.rounds)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": None
            if self.witness is None
            else {"dim": self.witness.dim, "x": self.witness.x, "y": self.witness.y},
            "total_queries": self.total_queries,
            "schedule_queries": self.schedule.total_queries,
            "n": self.schedule.n,
            "eps": str(self.schedule.eps),
            "seed": self.seed,
            "rounds": [
                {
                    "r": s.r,
                    "sample_size": s.sample_size,
                    "reps_scheduled": s.reps_scheduled,
                    "reps_executed": s.reps_executed,
                }
                for s in self.rounds
            ],
        }


def _derivative_batch(oracle: FunctionOracle, i: int, xs: np.ndarray) -> np.ndarray:
    """Derivatives along i at each point, spending 2 queries per point."""
    e = np.uint64(1 << i)
    upper = oracle.evaluate_batch(xs | e)
    lower = oracle.evaluate_batch(xs & ~e)
    return upper - lower


def run_round(
    oracle: FunctionOracle, sample_size: int, rng: RngLike
) -> Optional[Witness]:
    """One repetition: sample a dimension and points, look for both signs.

    Uses 2 * sample_size oracle queries.  Returns a witness iff some sampled
    point has a strictly positive derivative and some other (possibly equal
    sampling, distinct sign) has a strictly negative one.
    """
    rng = _as_rng(rng)
    n = oracle.n
    i = int(rng.integers(0, n))
    xs = rng.integers(0, 1 << n, size=sample_size, dtype=np.uint64)
    d = _derivative_batch(oracle, i, xs)
    pos = np.flatnonzero(d > 0)
    neg = np.flatnonzero(d < 0)
    if pos.size and neg.size:
        return Witness(dim=i, x=int(xs[pos[0]]), y=int(xs[neg[0]]))
    return None


def _execute_round(
    oracle: FunctionOracle,
    dims: np.ndarray,
    points: np.ndarray,
) -> tuple[int, Optional[Witness]]:
    """Run a round's repetitions over presampled dims/points.

    Dispatches to the compiled kernel when the oracle carries one; the
    generic path replays the identical repetition order through
    ``evaluate_batch``, so both paths return the same result for the same
    samples and charge the same query count.
    """
    kernel_args = oracle.kernel_args
    sample_size = points.shape[1]
    if kernel_args is not None:
        reps_done, found, dim, x, y = _kernels.run_reps(*kernel_args, dims, points)
        oracle.add_queries(2 * sample_size * int(reps_done))
        witness = Witness(int(dim), int(x), int(y)) if found else None
        return int(reps_done), witness
    for k in range(points.shape[0]):
        i = int(dims[k])
        d = _derivative_batch(oracle, i, points[k])
        pos = np.flatnonzero(d > 0)
        neg = np.flatnonzero(d < 0)
        if pos.size and neg.size:
            return k + 1, Witness(i, int(points[k][pos[0]]), int(points[k][neg[0]]))
    return points.shape[0], None


def unate_test(oracle: FunctionOracle, eps, rng: RngLike = 0) -> TesterReport:
    """Run the full schedule against the oracle; abort on the first witness.

    One-sided: a unate function is accepted on every seed, because no
    dimension ever shows both strict derivative signs.  On accept the issued
    query count equals the schedule's closed form exactly, independent of
    the function and the seed.
    """
    schedule = build_schedule(oracle.n, eps)
    seed = rng if isinstance(rng, int) else None
    gen = _as_rng(rng)
    n = oracle.n
    stats: list[RoundStats] = []
    queries_before = oracle.query_count
    witness: Optional[Witness] = None
    for spec in schedule.rounds:
        dims = gen.integers(0, n, size=spec.reps, dtype=np.int64)
        points = gen.integers(
            0, 1 << n, size=(spec.reps, spec.sample_size), dtype=np.uint64
        )
        reps_done, witness = _execute_round(oracle, dims, points)
        stats.append(
            RoundStats(
                r=spec.r,
                sample_size=spec.sample_size,
                reps_scheduled=spec.reps,
                reps_executed=reps_done,
            )
        )
        if witness is not None:
            break
    return TesterReport(
        verdict="reject" if witness is not None else "accept",
        witness=witness,
        total_queries=oracle.query_count - queries_before,
        rounds=tuple(stats),
        schedule=schedule,
        seed=seed,
    )


def check_witness(f, witness: Witness) -> bool:
    """Re-validate a rejection witness against a function or fresh oracle."""
    if isinstance(f, HypercubeFunction):
        oracle = from_table(f)
    else:
        oracle = f
    e = 1 << witness.dim
    dx = oracle.evaluate(witness.x | e) - oracle.evaluate(witness.x & ~e)
    dy = oracle.evaluate(witness.y | e) - oracle.evaluate(witness.y & ~e)
    return dx > 0 and dy < 0


# ---------------------------------------------------------------------------
# Analysis-side computations: bucket decomposition and exact rejection
# probability.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BucketDecomposition:
    """Dimensions bucketed by violation mass: S_r = {i : mu_i in (2^-r, 2^-(r-1)]}.

    ``lhs`` is the exact investment sum over the retained rounds,
    sum of |S_r| / 2^r for r <= L.  When the masses come from a function
    eps/4-far in total mass, the sum is at least eps/16.
    """

    eps: Fraction
    num_rounds: int
    buckets: tuple[tuple[int, ...], ...]  # index r-1 holds S_r, sorted
    mu: tuple[Fraction, ...]

    @property
    def lhs(self) -> Fraction:
        return sum(
            (Fraction(len(bucket), 1 << r) for r, bucket in enumerate(self.buckets, 1)),
            Fraction(0),
        )

    @property
    def sum_mu(self) -> Fraction:
        return sum(self.mu, Fraction(0))

    @property
    def premise_holds(self) -> bool:
        return self.sum_mu >= self.eps / 4

    @property
    def bound_holds(self) -> bool:
        return self.lhs >= self.eps / 16

    @property
    def implication_holds(self) -> bool:
        return not self.premise_holds or self.bound_holds


def levin_buckets(mu: Sequence[Fraction], eps) -> BucketDecomposition:
    """Bucket per-dimension masses for the investment-strategy accounting.

    Accepts any eps > 0 (analysis may be run at eps = 4 * sum(mu), which can
    exceed 1).  Dimensions with mu_i = 0 fall in no bucket; dimensions with
    0 < mu_i <= 2^-L belong to rounds beyond L and are dropped, which is
    exactly the tail the accounting writes off.
    """
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    masses = [Fraction(m) for m in mu]
    n = len(masses)
    if n < 1:
        raise ValueError("mu must be non-empty")
    for i, m in enumerate(masses):
        if not 0 <= m <= 1:
            raise ValueError(f"mu[{i}] = {m} outside [0, 1]")
    level = num_rounds(n, eps)
    buckets: list[list[int]] = [[] for _ in range(level)]
    for i, m in enumerate(masses):
        if m == 0:
            continue
        r = 1
        while m <= Fraction(1, 1 << r):
            r += 1
        if r <= level:
            buckets[r - 1].append(i)
    return BucketDecomposition(
        eps=eps,
        num_rounds=level,
        buckets=tuple(tuple(b) for b in buckets),
        mu=tuple(masses),
    )


def dimension_hit_probability(
    profile: ViolationProfile, i: int, sample_size: int
) -> float:
    """Probability that sample_size uniform points hit both derivative signs
    of dimension i, under with-replacement sampling (inclusion-exclusion)."""
    if profile.up_counts[i] == 0 or profile.down_counts[i] == 0:
        return 0.0  # one sign set is empty: exact zero, no float residue
    size = profile.num_points
    u = profile.up_counts[i] / size
    d = profile.down_counts[i] / size
    m = sample_size
    return 1.0 - (1.0 - u) ** m - (1.0 - d) ** m + (1.0 - u - d) ** m


@dataclass(frozen=True)
class RejectionAnalysis:
    """Exact rejection probability of the full schedule for an explicit table.

    ``round_probs[r-1]`` is p_r, the probability that a single repetition of
    round r rejects: the average over dimensions of the both-signs hit
    probability at sample size m_r.  The full-run probability is
    1 - prod (1 - p_r)^(s_r).  ``round_floors`` carries the conservative
    per-round floor (5/6) |S_r| / n used by the one-sided analysis.
    """

    probability: float
    round_probs: tuple[float, ...]
    round_floors: tuple[float, ...]
    schedule: TesterSchedule
    buckets: BucketDecomposition


def rejection_probability_exact(profile: ViolationProfile, eps) -> RejectionAnalysis:
    eps = as_fraction(eps)
    schedule = build_schedule(profile.n, eps)
    buckets = levin_buckets(profile.mu, eps)
    n = profile.n
    round_probs = []
    log_accept = 0.0
    for spec in schedule.rounds:
        p_r = sum(
            dimension_hit_probability(profile, i, spec.sample_size) for i in range(n)
        ) / n
        round_probs.append(p_r)
        if p_r >= 1.0:
            log_accept = -math.inf
        else:
            log_accept += spec.reps * math.log1p(-p_r)
    probability = -math.expm1(log_accept)
    floors = tuple(
        (5.0 / 6.0) * len(buckets.buckets[r - 1]) / n
        for r in range(1, schedule.num_rounds + 1)
    )
    return RejectionAnalysis(
        probability=min(max(probability, 0.0), 1.0),
        round_probs=tuple(round_probs),
        round_floors=floors,
        schedule=schedule,
        buckets=buckets,
    )
