"""Kernel backend dispatch.

The hot loops (batch evaluation, tester repetitions, derivative-sign
counting) have two interchangeable implementations: numba-jitted
(``_kernels_numba``) and pure numpy (``_kernels_numpy``).  The jitted one is
the default; set ``UNATE_PURE_NUMPY=1`` to force the numpy path, which is
also the automatic fallback when numba is not importable.

``benchmarks/bench_kernels.py`` times the two backends against each other.
"""

from __future__ import annotations

import os
import warnings

# Family codes shared by both backends.
CODE_TABLE = 0
CODE_CONSTANT = 1
CODE_DICTATOR = 2
CODE_PARITY = 3
CODE_THRESHOLD = 4

ENV_FLAG = "UNATE_PURE_NUMPY"


def _pure_numpy_requested() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


if _pure_numpy_requested():
    from ._kernels_numpy import eval_points, run_reps, violation_counts

    BACKEND = "numpy"
else:
    try:
        from ._kernels_numba import eval_points, run_reps, violation_counts

        BACKEND = "numba"
    except ImportError:  # pragma: no cover - depends on the environment
        warnings.warn("numba unavailable; falling back to pure-numpy kernels")
        from ._kernels_numpy import eval_points, run_reps, violation_counts

        BACKEND = "numpy"

__all__ = [
    "BACKEND",
    "ENV_FLAG",
    "CODE_TABLE",
    "CODE_CONSTANT",
    "CODE_DICTATOR",
    "CODE_PARITY",
    "CODE_THRESHOLD",
    "eval_points",
    "run_reps",
    "violation_counts",
]
