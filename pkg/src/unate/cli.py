"""Command-line front end.

Subcommands: test, distance, profile, analyze, experiment, gen.  Functions
come either from a truth-table file (JSON or text form) or from a builtin
generator string like ``builtin:parity:n=2`` or
``builtin:weighted-threshold:n=8,seed=3``.

Exit codes: 0 on success (or tester accept), 1 on tester reject, 2 on
usage, parse, or cap errors.  JSON outputs follow the schemas shipped in
``unate/schemas``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from .exact import (
    DEFAULT_DIMENSION_CAP,
    CapExceededError,
    distance_to_unate,
)
from .hypercube import HypercubeFunction, is_unate, orientation_bits, violation_profile
from .oracles import (
    MAX_MATERIALIZE_DIM,
    BudgetExhaustedError,
    FunctionOracle,
    GeneratorSpec,
    TableFormatError,
    from_table,
    load_table,
    store_table,
)
from .tester import (
    as_fraction,
    build_schedule,
    dimension_hit_probability,
    rejection_probability_exact,
    unate_test,
)

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_ERROR = 2


@dataclass
class ResolvedFunction:
    label: str
    n: int
    spec: Optional[GeneratorSpec]
    table: Optional[HypercubeFunction]

    def make_oracle(self) -> FunctionOracle:
        if self.table is not None:
            return from_table(self.table, label=self.label)
        assert self.spec is not None
        return self.spec.build()

    def require_table(self) -> HypercubeFunction:
        if self.table is None:
            raise ValueError(
                f"{self.label} has no explicit truth table "
                f"(builtin families materialize only up to n={MAX_MATERIALIZE_DIM})"
            )
        return self.table


def resolve_function(text: str) -> ResolvedFunction:
    """Turn --fn into a function source: builtin spec or table file."""
    if text.startswith("builtin:"):
        spec = GeneratorSpec.from_string(text)
        table = None
        if spec.family in {"random-table", "planted-far"} or spec.n <= MAX_MATERIALIZE_DIM:
            table = spec.build().truth_table()
        return ResolvedFunction(label=text, n=spec.n, spec=spec, table=table)
    path = Path(text)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ValueError(f"cannot read function file {text!r}: {exc}") from exc
    table = load_table(data)
    return ResolvedFunction(label=text, n=table.n, spec=None, table=table)


def _schedule_dict(schedule) -> dict:
    return {
        "n": schedule.n,
        "eps": str(schedule.eps),
        "num_rounds": schedule.num_rounds,
        "total_queries": schedule.total_queries,
        "rounds": [
            {"r": spec.r, "reps": spec.reps, "sample_size": spec.sample_size}
            for spec in schedule.rounds
        ],
    }


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


# ---------------------------------------------------------------------------
# test
# ---------------------------------------------------------------------------


def _cmd_test(args) -> int:
    resolved = resolve_function(args.fn)
    oracle = resolved.make_oracle()
    report = unate_test(oracle, as_fraction(args.eps), args.seed)
    payload = {"command": "test", "function": resolved.label}
    payload.update(report.to_dict())
    payload["schedule"] = _schedule_dict(report.schedule)
    if args.format == "json":
        _emit(args, json.dumps(payload, indent=2))
    else:
        lines = [
            f"function       : {resolved.label} (n={oracle.n})",
            f"eps            : {report.schedule.eps}",
            f"seed           : {args.seed}",
            f"verdict        : {report.verdict}",
            f"queries        : {report.total_queries} "
            f"(accept-path schedule: {report.schedule.total_queries})",
        ]
        if report.witness is not None:
            w = report.witness
            lines.append(
                f"witness        : dim={w.dim} x={w.x:#0{oracle.n + 2}b} y={w.y:#0{oracle.n + 2}b}"
            )
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_REJECT if report.rejected else EXIT_OK


# ---------------------------------------------------------------------------
# distance
# ---------------------------------------------------------------------------


def _cmd_distance(args) -> int:
    resolved = resolve_function(args.fn)
    table = resolved.require_table()
    report = distance_to_unate(table, cap=args.cap)
    payload = {
        "command": "distance",
        "function": resolved.label,
        "n": table.n,
        "distance": f"{report.cover_size}/{1 << table.n}",
        "distance_decimal": float(report.distance),
        "orientation": {
            "mask": report.orientation,
            "bits": orientation_bits(report.orientation, table.n),
        },
        "cover": list(report.cover),
        "matching_lower": report.matching_lower,
        "cover_upper": report.cover_upper,
        "num_violations": report.num_violations,
    }
    if args.format == "json":
        _emit(args, json.dumps(payload, indent=2))
    else:
        _emit(
            args,
            "\n".join(
                [
                    f"function    : {resolved.label} (n={table.n})",
                    f"distance    : {payload['distance']} = {float(report.distance):.6g}",
                    f"orientation : {payload['orientation']['bits']} (bit i = dimension i)",
                    f"repair set  : {list(report.cover)}",
                    f"bounds      : matching {report.matching_lower} <= "
                    f"{report.cover_size} <= {report.cover_upper}",
                ]
            )
            + "\n",
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# profile
# ---------------------------------------------------------------------------


def _cmd_profile(args) -> int:
    resolved = resolve_function(args.fn)
    table = resolved.require_table()
    profile = violation_profile(table)
    witness = is_unate(table)
    payload = {
        "command": "profile",
        "function": resolved.label,
        "n": table.n,
        "dimensions": [
            {
                "dim": i,
                "up": profile.up_counts[i],
                "down": profile.down_counts[i],
                "zero": profile.zero_counts[i],
                "mu": str(profile.mu[i]),
            }
            for i in range(table.n)
        ],
        "unate_orientation": None
        if witness is None
        else {"mask": witness, "bits": orientation_bits(witness, table.n)},
    }
    if args.format == "json":
        _emit(args, json.dumps(payload, indent=2))
    else:
        lines = [f"function : {resolved.label} (n={table.n})"]
        for d in payload["dimensions"]:
            lines.append(
                f"dim {d['dim']:>2}  up={d['up']:<6} down={d['down']:<6} "
                f"zero={d['zero']:<6} mu={d['mu']}"
            )
        if witness is None:
            lines.append("unate    : no")
        else:
            lines.append(f"unate    : yes, orientation {orientation_bits(witness, table.n)}")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def _cmd_analyze(args) -> int:
    resolved = resolve_function(args.fn)
    table = resolved.require_table()
    eps = as_fraction(args.eps)
    profile = violation_profile(table)
    analysis = rejection_probability_exact(profile, eps)
    buckets = analysis.buckets
    hit_audit_ok = True
    for r, bucket in enumerate(buckets.buckets, 1):
        m_r = analysis.schedule.rounds[r - 1].sample_size
        for i in bucket:
            if dimension_hit_probability(profile, i, m_r) <= 5.0 / 6.0:
                hit_audit_ok = False
    payload = {
        "command": "analyze",
        "function": resolved.label,
        "n": table.n,
        "eps": str(eps),
        "mu": [str(m) for m in profile.mu],
        "sum_mu": str(buckets.sum_mu),
        "buckets": {
            "num_rounds": buckets.num_rounds,
            "sets": [list(b) for b in buckets.buckets],
            "lhs": str(buckets.lhs),
            "rhs": str(eps / 16),
            "premise_holds": buckets.premise_holds,
            "bound_holds": buckets.bound_holds,
            "implication_holds": buckets.implication_holds,
        },
        "rounds": [
            {
                "r": spec.r,
                "reps": spec.reps,
                "sample_size": spec.sample_size,
                "p_exact": analysis.round_probs[idx],
                "floor": analysis.round_floors[idx],
                "floor_ok": analysis.round_probs[idx] >= analysis.round_floors[idx],
            }
            for idx, spec in enumerate(analysis.schedule.rounds)
        ],
        "hit_audit_ok": hit_audit_ok,
        "rejection_probability": analysis.probability,
    }
    if args.format == "json":
        _emit(args, json.dumps(payload, indent=2))
    else:
        lines = [
            f"function       : {resolved.label} (n={table.n})",
            f"eps            : {eps}",
            f"mu             : {', '.join(payload['mu'])} (sum {payload['sum_mu']})",
            f"buckets (L={buckets.num_rounds})",
        ]
        for r, b in enumerate(buckets.buckets, 1):
            if b:
                lines.append(f"  S_{r} = {list(b)}")
        lines += [
            f"investment sum : {buckets.lhs} (threshold eps/16 = {eps / 16}; "
            f"holds: {buckets.bound_holds})",
            "round  reps  m     p_exact      floor(5/6*|S_r|/n)",
        ]
        for row in payload["rounds"]:
            lines.append(
                f"  {row['r']:>2}  {row['reps']:>5} {row['sample_size']:>5} "
                f"{row['p_exact']:.9f}  {row['floor']:.6f}"
            )
        lines.append(f"rejection prob : {analysis.probability:.9f}")
        lines.append(f"hit audit >5/6 : {'ok' if hit_audit_ok else 'VIOLATED'}")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# experiment
# ---------------------------------------------------------------------------


def derive_trial_seed(master_seed: int, trial: int) -> int:
    """Stable per-trial seed; feeding it back to unate_test replays the trial."""
    ss = np.random.SeedSequence((int(master_seed), int(trial)))
    return int(ss.generate_state(1, np.uint64)[0])


def _run_single_trial(payload) -> tuple:
    spec_string, n, values, eps_str, trial, trial_seed = payload
    if values is not None:
        oracle = from_table(HypercubeFunction(n, values))
    else:
        oracle = GeneratorSpec.from_string(spec_string).build()
    report = unate_test(oracle, as_fraction(eps_str), trial_seed)
    w = report.witness
    return (
        trial,
        trial_seed,
        report.verdict,
        report.total_queries,
        None if w is None else w.dim,
        None if w is None else w.x,
        None if w is None else w.y,
    )


def _cmd_experiment(args) -> int:
    if args.trials < 1:
        raise ValueError(f"--trials must be >= 1, got {args.trials}")
    if args.jobs < 1:
        raise ValueError(f"--jobs must be >= 1, got {args.jobs}")
    resolved = resolve_function(args.fn)
    eps = as_fraction(args.eps)
    schedule = build_schedule(resolved.n, eps)

    spec_string = resolved.spec.to_string() if resolved.spec is not None else None
    values = resolved.table.values if resolved.table is not None else None
    payloads = [
        (spec_string, resolved.n, values, str(eps), t, derive_trial_seed(args.seed, t))
        for t in range(args.trials)
    ]
    if args.jobs > 1:
        chunk = max(1, args.trials // (args.jobs * 4))
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_run_single_trial, payloads, chunksize=chunk))
    else:
        rows = [_run_single_trial(p) for p in payloads]

    rejections = sum(1 for row in rows if row[2] == "reject")
    freq = rejections / args.trials
    half_width = 1.96 * math.sqrt(freq * (1.0 - freq) / args.trials)
    ci = [max(0.0, freq - half_width), min(1.0, freq + half_width)]

    analytic = None
    exact_distance = None
    if resolved.table is not None:
        analytic = rejection_probability_exact(
            violation_profile(resolved.table), eps
        ).probability
        if resolved.n <= DEFAULT_DIMENSION_CAP:
            exact_distance = distance_to_unate(resolved.table)
    sigma = None
    deviation = None
    if analytic is not None:
        spread = math.sqrt(analytic * (1.0 - analytic) / args.trials)
        sigma = spread
        if spread > 0:
            deviation = (freq - analytic) / spread
        elif freq == analytic:
            deviation = 0.0

    aggregate = {
        "trials": args.trials,
        "rejections": rejections,
        "rejection_frequency": freq,
        "ci95": ci,
        "analytic_probability": analytic,
        "sigma": sigma,
        "deviation_sigma": deviation,
        "exact_distance": None
        if exact_distance is None
        else f"{exact_distance.cover_size}/{1 << resolved.n}",
    }

    if args.format == "json":
        doc = {
            "command": "experiment",
            "config": {
                "function": resolved.label,
                "eps": str(eps),
                "trials": args.trials,
                "seed": args.seed,
                "jobs": args.jobs,
            },
            "schedule": _schedule_dict(schedule),
            "trials": [
                {
                    "trial": row[0],
                    "seed": row[1],
                    "verdict": row[2],
                    "queries": row[3],
                    "witness": None
                    if row[4] is None
                    else {"dim": row[4], "x": row[5], "y": row[6]},
                }
                for row in rows
            ],
            "aggregate": aggregate,
        }
        out_text = json.dumps(doc, indent=2)
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["trial", "seed", "verdict", "queries", "witness_dim", "witness_x", "witness_y"]
        )
        for row in rows:
            writer.writerow(
                [
                    row[0],
                    row[1],
                    row[2],
                    row[3],
                    "" if row[4] is None else row[4],
                    "" if row[5] is None else row[5],
                    "" if row[6] is None else row[6],
                ]
            )
        out_text = buf.getvalue()

    if args.out:
        Path(args.out).write_text(out_text)
        summary_stream = sys.stdout
    else:
        sys.stdout.write(out_text)
        summary_stream = sys.stderr

    summary = [
        f"trials={args.trials} rejections={rejections} frequency={freq:.6f} "
        f"ci95=[{ci[0]:.6f}, {ci[1]:.6f}]"
    ]
    if analytic is not None:
        dev = "n/a" if deviation is None else f"{deviation:+.3f}"
        summary.append(
            f"analytic={analytic:.9f} empirical={freq:.6f} deviation={dev} sigma"
        )
    if aggregate["exact_distance"] is not None:
        summary.append(f"exact distance to unate = {aggregate['exact_distance']}")
    print("\n".join(summary), file=summary_stream)
    return EXIT_OK


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------


def _cmd_gen(args) -> int:
    resolved = resolve_function(args.fn)
    table = resolved.require_table()
    _emit(args, store_table(table, form=args.format))
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_fn(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--fn",
        required=True,
        help="truth-table file path, or builtin:<family>:n=...,... "
        "(families: constant, dictator, parity, weighted-threshold, "
        "random-table, planted-far)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unate",
        description="Unateness property testing and exact distance oracles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run the randomized tester once")
    _add_fn(p)
    p.add_argument("--eps", required=True, help="distance parameter, decimal or p/q")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["human", "json"], default="human")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_test)

    p = sub.add_parser("distance", help="exact distance to unateness (small n)")
    _add_fn(p)
    p.add_argument("--cap", type=int, default=DEFAULT_DIMENSION_CAP)
    p.add_argument("--format", choices=["human", "json"], default="human")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_distance)

    p = sub.add_parser("profile", help="per-dimension derivative sign counts")
    _add_fn(p)
    p.add_argument("--format", choices=["human", "json"], default="human")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_profile)

    p = sub.add_parser("analyze", help="bucket decomposition and exact rejection probability")
    _add_fn(p)
    p.add_argument("--eps", required=True, help="distance parameter, decimal or p/q")
    p.add_argument("--format", choices=["human", "json"], default="human")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_analyze)

    p = sub.add_parser("experiment", help="seeded Monte Carlo over many tester trials")
    _add_fn(p)
    p.add_argument("--eps", required=True, help="distance parameter, decimal or p/q")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_experiment)

    p = sub.add_parser("gen", help="write a builtin function as a truth-table file")
    _add_fn(p)
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_gen)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (
        ValueError,
        TypeError,
        TableFormatError,
        CapExceededError,
        BudgetExhaustedError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
