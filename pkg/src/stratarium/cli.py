"""Command-line interface: ``stratarium sample | measure | bench``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .bench import (ExperimentReport, VariantTally, run_integration_experiment,
                    run_optimization_experiment, run_variant_comparison)
from .designs import METHODS, Design, parse_design
from .geometry import PointSet, Stratification
from .latinize import LatinizationInfeasible, lh_violations
from .metrics import (covering_radius_general_lower, covering_radius_mc_lower, covering_radius_upper,
                      covering_radius_upper_retro, default_mc_samples, discrepancy_t,
                      expected_discrepancy_sq, separation_distance)
from .rng import DEFAULT_SEED, make_rng

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3


class UsageError(Exception):
    pass


def write_atomic(path: str | None, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename; ``None`` or ``-`` means stdout."""
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_points(points, header: bool = False) -> str:
    x = np.asarray(points, dtype=float)
    lines = []
    if header:
        lines.append(",".join(f"x{k}" for k in range(x.shape[1])))
    for row in x.tolist():
        lines.append(",".join(repr(v) for v in row))
    return "\n".join(lines) + "\n"


def parse_points(text: str) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        try:
            rows.append([float(f) for f in fields])
        except ValueError:
            if lineno == 1 and not rows:
                continue  # header
            raise UsageError(f"line {lineno}: cannot parse {line!r}") from None
    if not rows:
        raise UsageError("no points in input")
    if len({len(r) for r in rows}) != 1:
        raise UsageError("rows have differing numbers of columns")
    x = np.array(rows)
    bad = np.any(~np.isfinite(x) | (x < 0) | (x > 1), axis=1)
    if np.any(bad):
        row = int(np.argmax(bad))
        raise UsageError(f"row {row} lies outside the unit hypercube: {rows[row]}")
    return x


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def cmd_sample(args) -> int:
    if args.N < 1 or args.n < 1:
        raise UsageError("--N and --n must be positive")
    design = Design(args.method, b=args.b, groups=args.groups, avoid_odd_splits=not args.no_avoid_odd,
                    korobov_trials=args.trials, lgss_init=args.lgss_init)
    points, strat = design.generate(args.N, args.n, make_rng(args.seed, f"sample/{args.method}"))
    if args.emit_strata:
        if strat is None:
            raise UsageError(f"method {args.method!r} has no stratification to emit")
        write_atomic(args.emit_strata, strat.to_json() + "\n")
    write_atomic(args.output, format_points(points, args.header))
    return EXIT_OK


def measure(points: np.ndarray, strat: Stratification | None = None, restarts: int = 10,
            mc_samples: int | None = None, seed: int = DEFAULT_SEED, lh: bool = False) -> dict:
    N, n = points.shape
    ps = PointSet(points)
    if strat is not None:
        if strat.dim != n or len(strat) != N:
            raise UsageError(f"stratification has {len(strat)} strata in {strat.dim}D, points are {N}x{n}")
        upper = covering_radius_upper(points, strat)
    else:
        upper = covering_radius_upper_retro(ps, restarts, make_rng(seed, "measure/retro"))
    M = default_mc_samples(n) if mc_samples is None else mc_samples
    report = {
        "t_discrepancy": discrepancy_t(points),
        "t_sq_expected_random": expected_discrepancy_sq(N, n),
        "cr_upper": upper,
        "cr_mc_lower": covering_radius_mc_lower(ps, M, make_rng(seed, "measure/mc")),
        "cr_general_lower": covering_radius_general_lower(N, n),
        "separation": separation_distance(points) if N >= 2 else None,
    }
    if lh:
        per_dim = lh_violations(points).tolist()
        report["lh_violations"] = {"per_dimension": per_dim, "total": int(sum(per_dim))}
    return report


def cmd_measure(args) -> int:
    try:
        text = sys.stdin.read() if args.input == "-" else Path(args.input).read_text()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    points = parse_points(text)
    strat = None
    if args.strata:
        try:
            strat = Stratification.from_json(Path(args.strata).read_text())
        except (OSError, KeyError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read stratification: {exc}") from None
    report = measure(points, strat, args.restarts, args.mc_samples, args.seed, args.lh)
    write_atomic(args.output, json.dumps(report, indent=2) + "\n")
    return EXIT_OK


def _designs(text: str) -> list[Design]:
    return [parse_design(t) for t in text.split(",") if t.strip()]


def _transform(text: str | None) -> float | None:
    if not text:
        return None
    kind, _, mean = text.partition(":")
    if kind != "normal":
        raise UsageError(f"unknown transform {text!r}; use normal:<mean>")
    try:
        return float(mean or 0.0)
    except ValueError:
        raise UsageError(f"bad transform mean in {text!r}") from None


def cmd_bench(args) -> int:
    if args.experiment == "variants":
        tallies = run_variant_comparison(range(args.N_min, args.N_max + 1), range(args.n_min, args.n_max + 1),
                                         args.seed)
        write_atomic(args.output, _csv_text(VariantTally.CSV_FIELDS, [t.csv_row() for t in tallies]))
        return EXIT_OK
    reports = []
    for design in _designs(args.designs):
        if args.experiment == "integrate":
            N = args.N or 625
            reports.append(run_integration_experiment(design, args.fn, N, args.n, args.reps, args.seed,
                                                      normal_mean=_transform(args.transform)))
        else:
            reports.append(run_optimization_experiment(design, args.fn, args.n, args.reps, args.seed, N=args.N))
    write_atomic(args.output, _csv_text(ExperimentReport.CSV_FIELDS, [r.csv_row() for r in reports]))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stratarium", description="Stratified sampling in the unit hypercube.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sample", help="generate a point set as CSV")
    sp.add_argument("--method", required=True, choices=METHODS)
    sp.add_argument("--N", type=int, required=True, help="number of points")
    sp.add_argument("--n", type=int, required=True, help="number of dimensions")
    sp.add_argument("--b", default="1", help="Bates parameter: positive integer or 'inf'")
    sp.add_argument("--groups", help="PSS grouping such as 2x50 or 2x2+1x2")
    sp.add_argument("--trials", type=int, default=30, help="random lattices tried for korobov methods")
    sp.add_argument("--lgss-init", choices=("cog", "random_greedy"), default="cog")
    sp.add_argument("--no-avoid-odd", action="store_true", help="allow splitting even counts into two odd parts")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--header", action="store_true")
    sp.add_argument("--emit-strata", metavar="PATH")
    sp.add_argument("--output", "-o", metavar="PATH")
    sp.set_defaults(func=cmd_sample)

    mp = sub.add_parser("measure", help="report discrepancy and covering-radius bounds for a CSV point set")
    mp.add_argument("input", nargs="?", default="-")
    mp.add_argument("--strata", metavar="PATH", help="stratification JSON for the upper bound")
    mp.add_argument("--restarts", type=int, default=10)
    mp.add_argument("--mc-samples", type=int, help="Monte Carlo test points (default 2*10^4*n)")
    mp.add_argument("--lh", action="store_true", help="also report Latin hypercube violations")
    mp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    mp.add_argument("--output", "-o", metavar="PATH")
    mp.set_defaults(func=cmd_measure)

    bp = sub.add_parser("bench", help="run an experiment harness and write CSV")
    bp.add_argument("experiment", choices=("integrate", "optimize", "variants"))
    bp.add_argument("--fn", default="rosenbrock")
    bp.add_argument("--transform", help="normal:<mean> maps coordinates through the normal quantile")
    bp.add_argument("--designs", default="srs,lhs")
    bp.add_argument("--N", type=int, help="points per design (integrate: 625, optimize: 50n)")
    bp.add_argument("--n", type=int, default=2)
    bp.add_argument("--reps", type=int, default=200)
    bp.add_argument("--N-min", type=int, default=4)
    bp.add_argument("--N-max", type=int, default=1024)
    bp.add_argument("--n-min", type=int, default=2)
    bp.add_argument("--n-max", type=int, default=10)
    bp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    bp.add_argument("--output", "-o", metavar="PATH")
    bp.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", 0) < 0:
        parser.error("--seed must be nonnegative")
    try:
        return args.func(args)
    except LatinizationInfeasible as exc:
        print(f"stratarium: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (UsageError, ValueError) as exc:
        print(f"stratarium: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
