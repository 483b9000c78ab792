"""Query-counted function oracles and the builtin function families.

An oracle wraps black-box access to f: every evaluation, single or batched,
bumps ``query_count`` by exactly one per point.  There is no caching and no
deduplication: the count is the number of evaluations issued, full stop.
Builtin families additionally carry a kernel descriptor so the tester can
run its sampling loop inside a compiled kernel; the charged count is the
same as if each point had gone through ``evaluate``.

Truth tables are exchanged in two bit-exact formats (index = sum x_i 2^i):

* JSON: ``{"n": 2, "values": [0, 1, 1, 0]}``
* text: first line n, second line the 2^n values space-separated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional

import numpy as np

from . import _kernels
from .hypercube import HypercubeFunction, MAX_TABLE_DIM, check_range_value

#: Largest dimension materialized into an explicit table by ``truth_table``.
MAX_MATERIALIZE_DIM = 24

#: Default magnitude bound for random threshold weights.
DEFAULT_WEIGHT_BOUND = 8

_EMPTY_I64 = np.empty(0, dtype=np.int64)
_EMPTY_I64.setflags(write=False)


class TableFormatError(ValueError):
    """Raised when a truth-table file cannot be parsed."""


class BudgetExhaustedError(RuntimeError):
    """Raised when planted-far generation runs out of distance-oracle calls."""


@dataclass(frozen=True)
class _KernelArgs:
    """Flat argument pack consumed by the kernel backends."""

    code: int
    n: int
    c0: int = 0
    f_dim: int = 0
    sign: int = 1
    weights: np.ndarray = field(default_factory=lambda: _EMPTY_I64)
    table: np.ndarray = field(default_factory=lambda: _EMPTY_I64)

    def as_tuple(self):
        return (
            self.code,
            self.n,
            self.c0,
            self.f_dim,
            self.sign,
            self.weights,
            self.table,
        )


class FunctionOracle:
    """Deterministic, query-counted access to f: {0,1}^n -> int64."""

    def __init__(
        self,
        n: int,
        evaluator: Callable[[int], int],
        *,
        kernel: Optional[_KernelArgs] = None,
        label: str = "callable",
    ) -> None:
        if n < 1:
            raise ValueError(f"n must be positive, got {n}")
        self.n = n
        self.label = label
        self._evaluator = evaluator
        self._kernel = kernel
        self._queries = 0

    @property
    def query_count(self) -> int:
        return self._queries

    @property
    def kernel_args(self) -> Optional[tuple]:
        return self._kernel.as_tuple() if self._kernel is not None else None

    def add_queries(self, count: int) -> None:
        """Charge evaluations issued on this oracle's behalf by a kernel."""
        self._queries += count

    def _check_point(self, x: int) -> None:
        if not 0 <= x < (1 << self.n):
            raise ValueError(f"point {x} out of range for n={self.n}")

    def evaluate(self, x: int) -> int:
        self._check_point(int(x))
        self._queries += 1
        return self._evaluator(int(x))

    def evaluate_batch(self, xs: np.ndarray) -> np.ndarray:
        """Evaluate an array of points; charges one query per entry."""
        xs = np.asarray(xs, dtype=np.uint64)
        self._queries += xs.size
        if self._kernel is not None:
            return _kernels.eval_points(*self._kernel.as_tuple(), xs)
        return np.array([self._evaluator(int(x)) for x in xs], dtype=np.int64)

    def truth_table(self) -> HypercubeFunction:
        """Materialize the explicit table (rule access, not queries).

        Only available for oracles built from a table or a builtin rule;
        black-box callables stay black boxes.
        """
        if self._kernel is None:
            raise ValueError("cannot materialize a black-box callable oracle")
        if self.n > MAX_MATERIALIZE_DIM:
            raise ValueError(
                f"refusing to materialize 2^{self.n} values "
                f"(limit n <= {MAX_MATERIALIZE_DIM})"
            )
        if self._kernel.code == _kernels.CODE_TABLE:
            return HypercubeFunction(self.n, self._kernel.table)
        xs = np.arange(1 << self.n, dtype=np.uint64)
        return HypercubeFunction(
            self.n, _kernels.eval_points(*self._kernel.as_tuple(), xs)
        )

    def __repr__(self) -> str:
        return f"FunctionOracle(n={self.n}, label={self.label!r}, queries={self._queries})"


def from_table(f: HypercubeFunction, label: str = "table") -> FunctionOracle:
    table = f.values
    return FunctionOracle(
        f.n,
        lambda x: int(table[x]),
        kernel=_KernelArgs(code=_kernels.CODE_TABLE, n=f.n, table=table),
        label=label,
    )


def from_callable(n: int, fn: Callable[[int], int], label: str = "callable") -> FunctionOracle:
    """Wrap an arbitrary deterministic rule; no kernel fast path."""
    return FunctionOracle(n, fn, label=label)


def gen_constant(n: int, c: int) -> FunctionOracle:
    check_range_value(c)
    return FunctionOracle(
        n,
        lambda x: c,
        kernel=_KernelArgs(code=_kernels.CODE_CONSTANT, n=n, c0=c),
        label=f"constant({c})",
    )


def gen_parity(n: int) -> FunctionOracle:
    return FunctionOracle(
        n,
        lambda x: x.bit_count() & 1,
        kernel=_KernelArgs(code=_kernels.CODE_PARITY, n=n),
        label="parity",
    )


def gen_dictator(n: int, i: int, sign: int = 1) -> FunctionOracle:
    """f(x) = x_i when sign >= 0, else 1 - x_i."""
    if not 0 <= i < n:
        raise ValueError(f"dimension {i} out of range for n={n}")
    sgn = 1 if sign >= 0 else -1
    if sgn > 0:
        evaluator = lambda x: (x >> i) & 1
    else:
        evaluator = lambda x: 1 - ((x >> i) & 1)
    return FunctionOracle(
        n,
        evaluator,
        kernel=_KernelArgs(code=_kernels.CODE_DICTATOR, n=n, f_dim=i, sign=sgn),
        label=f"dictator(i={i}, sign={'+' if sgn > 0 else '-'})",
    )


def weighted_threshold_oracle(weights) -> FunctionOracle:
    """f(x) = sum of w_i x_i for explicit nonzero integer weights.

    Monotone in dimension i when w_i > 0 and anti-monotone when w_i < 0,
    hence unate by construction.
    """
    w = np.asarray(weights, dtype=np.int64)
    if w.ndim != 1 or w.size < 1:
        raise ValueError("weights must be a non-empty 1-D sequence")
    if np.any(w == 0):
        raise ValueError("threshold weights must be nonzero")
    w = w.copy()
    w.setflags(write=False)
    n = int(w.size)

    def evaluator(x: int) -> int:
        return sum(int(w[i]) for i in range(n) if (x >> i) & 1)

    return FunctionOracle(
        n,
        evaluator,
        kernel=_KernelArgs(code=_kernels.CODE_THRESHOLD, n=n, weights=w),
        label=f"threshold{tuple(int(v) for v in w)}",
    )


def gen_weighted_threshold(
    n: int, seed: int, weight_bound: int = DEFAULT_WEIGHT_BOUND
) -> FunctionOracle:
    """Random unate function: nonzero weights drawn from [-W, W] \\ {0}."""
    if weight_bound < 1:
        raise ValueError("weight_bound must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), n, 0xC0FFEE)))
    magnitudes = rng.integers(1, weight_bound + 1, size=n, dtype=np.int64)
    signs = np.where(rng.integers(0, 2, size=n) == 0, 1, -1).astype(np.int64)
    return weighted_threshold_oracle(magnitudes * signs)


def gen_random_table(
    n: int, seed: int, lo: int = 0, hi: int = 1
) -> FunctionOracle:
    """Uniform random truth table with values in [lo, hi]."""
    if n > MAX_MATERIALIZE_DIM:
        raise ValueError(f"random tables limited to n <= {MAX_MATERIALIZE_DIM}")
    if lo > hi:
        raise ValueError(f"empty value range [{lo}, {hi}]")
    check_range_value(lo)
    check_range_value(hi)
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), n, 0x7AB1E)))
    values = rng.integers(lo, hi + 1, size=1 << n, dtype=np.int64)
    return from_table(HypercubeFunction(n, values), label=f"random-table(seed={seed})")


def gen_planted_far(
    n: int,
    target_eps,
    seed: int,
    oracle_budget: int = 1000,
    *,
    cap: Optional[int] = None,
) -> tuple[HypercubeFunction, Fraction]:
    """Perturb a random unate function until it is target_eps-far from unate.

    Starting from a weighted-threshold table, one uniformly random point is
    re-randomized per attempt and the exact distance to unateness recomputed;
    the first iterate at distance >= target_eps is returned together with its
    certified distance.  Each attempt spends one distance-oracle call, so the
    distance after k attempts is at most k/2^n; budgets below
    target_eps * 2^n always exhaust.
    """
    from . import exact

    target = Fraction(target_eps)
    if not 0 <= target <= Fraction(1, 2):
        raise ValueError(f"target distance must lie in [0, 1/2], got {target}")
    if cap is None:
        cap = exact.DEFAULT_DIMENSION_CAP
    if n > cap:
        raise exact.CapExceededError(
            f"planted-far needs the exact oracle; n={n} exceeds cap {cap}"
        )

    base = gen_weighted_threshold(n, seed).truth_table()
    if target == 0:
        return base, Fraction(0)

    rng = np.random.default_rng(np.random.SeedSequence((int(seed), n, 0xFA4)))
    values = base.values.copy()
    lo = int(values.min()) - 1
    hi = int(values.max()) + 1
    for _ in range(oracle_budget):
        x = int(rng.integers(0, 1 << n))
        values[x] = int(rng.integers(lo, hi + 1))
        candidate = HypercubeFunction(n, values)
        # A matching-based upper bound below the target already refutes the
        # attempt; the exact cover search only runs on plausible iterates.
        if exact.distance_upper_bound(candidate, cap=cap) < target:
            continue
        report = exact.distance_to_unate(candidate, cap=cap)
        if report.distance >= target:
            return candidate, report.distance
    raise BudgetExhaustedError(
        f"no iterate reached distance {target} within {oracle_budget} attempts "
        f"(n={n}); the target is too aggressive for this dimension"
    )


# ---------------------------------------------------------------------------
# Generator specs: self-contained strings for builtin families.
# ---------------------------------------------------------------------------

_FAMILIES = (
    "constant",
    "dictator",
    "parity",
    "weighted-threshold",
    "random-table",
    "planted-far",
)


@dataclass(frozen=True)
class GeneratorSpec:
    """Parsed ``builtin:<family>[:k=v,...]`` description of a function.

    The same spec always builds the same function, bit for bit.
    """

    family: str
    n: int
    seed: int = 0
    params: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(
                f"unknown family {self.family!r}; expected one of {_FAMILIES}"
            )
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")

    @classmethod
    def from_string(cls, text: str) -> "GeneratorSpec":
        body = text.removeprefix("builtin:")
        parts = body.split(":")
        family = parts[0]
        params: dict[str, str] = {}
        for chunk in parts[1:]:
            for item in chunk.split(","):
                if not item:
                    continue
                if "=" not in item:
                    raise ValueError(f"malformed parameter {item!r} in {text!r}")
                key, value = item.split("=", 1)
                params[key.strip()] = value.strip()
        if "n" not in params:
            raise ValueError(f"builtin spec {text!r} is missing n=<dim>")
        n = int(params.pop("n"))
        seed = int(params.pop("seed", "0"))
        return cls(family=family, n=n, seed=seed, params=params)

    def to_string(self) -> str:
        items = [f"n={self.n}", f"seed={self.seed}"]
        items += [f"{k}={v}" for k, v in sorted(self.params.items())]
        return f"builtin:{self.family}:" + ",".join(items)

    def build(self) -> FunctionOracle:
        p = self.params
        if self.family == "constant":
            return gen_constant(self.n, int(p.get("c", "0")))
        if self.family == "parity":
            return gen_parity(self.n)
        if self.family == "dictator":
            sign = -1 if p.get("sign", "+") in {"-", "-1"} else 1
            return gen_dictator(self.n, int(p.get("i", "0")), sign)
        if self.family == "weighted-threshold":
            bound = int(p.get("w", str(DEFAULT_WEIGHT_BOUND)))
            return gen_weighted_threshold(self.n, self.seed, bound)
        if self.family == "random-table":
            return gen_random_table(
                self.n, self.seed, int(p.get("lo", "0")), int(p.get("hi", "1"))
            )
        # planted-far
        fn, dist = gen_planted_far(
            self.n,
            Fraction(p.get("eps", "1/4")),
            self.seed,
            int(p.get("budget", "1000")),
        )
        oracle = from_table(fn, label=f"planted-far(distance={dist})")
        return oracle


# ---------------------------------------------------------------------------
# Truth-table files.
# ---------------------------------------------------------------------------


def load_table(data) -> HypercubeFunction:
    """Parse a truth table from JSON or text form (str or bytes)."""
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TableFormatError(f"table is not valid UTF-8: {exc}") from exc
    else:
        text = data
    stripped = text.lstrip()
    if not stripped:
        raise TableFormatError("empty table data")
    if stripped.startswith("{"):
        return _load_json(text)
    return _load_text(text)


def _load_json(text: str) -> HypercubeFunction:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TableFormatError(
            f"JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(obj, dict) or "n" not in obj or "values" not in obj:
        raise TableFormatError('JSON table must be {"n": ..., "values": [...]}')
    n = obj["n"]
    values = obj["values"]
    if not isinstance(n, int) or not 1 <= n <= MAX_TABLE_DIM:
        raise TableFormatError(f"n must be an int in [1, {MAX_TABLE_DIM}], got {n!r}")
    if not isinstance(values, list) or not all(isinstance(v, int) for v in values):
        raise TableFormatError("values must be a list of integers")
    if len(values) != 1 << n:
        raise TableFormatError(
            f"length mismatch: n={n} needs {1 << n} values, got {len(values)}"
        )
    for v in values:
        check_range_value(v)
    return HypercubeFunction(n, values)


def _load_text(text: str) -> HypercubeFunction:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2:
        raise TableFormatError("text table needs a dimension line and a value line")
    try:
        n = int(lines[0].strip())
    except ValueError as exc:
        raise TableFormatError(f"line 1: dimension is not an integer: {lines[0]!r}") from exc
    if not 1 <= n <= MAX_TABLE_DIM:
        raise TableFormatError(f"line 1: n must be in [1, {MAX_TABLE_DIM}], got {n}")
    tokens = " ".join(lines[1:]).split()
    try:
        values = [int(t) for t in tokens]
    except ValueError as exc:
        raise TableFormatError(f"line 2: non-integer value in table: {exc}") from exc
    if len(values) != 1 << n:
        raise TableFormatError(
            f"length mismatch: n={n} needs {1 << n} values, got {len(values)}"
        )
    for v in values:
        check_range_value(v)
    return HypercubeFunction(n, values)


def store_table(f: HypercubeFunction, form: str = "json") -> str:
    """Serialize a truth table; ``load_table(store_table(f)) == f``."""
    if form == "json":
        return json.dumps({"n": f.n, "values": [int(v) for v in f.values]})
    if form == "text":
        return f"{f.n}\n" + " ".join(str(int(v)) for v in f.values) + "\n"
    raise ValueError(f"unknown table form {form!r}; use 'json' or 'text'")
