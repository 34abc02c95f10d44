"""Command line front end for the benchmark.

Single cell:

    ratepick-bench --method cr --dist loguniform --n 100000 --ratio 1e-3 \\
        --c 2 --reps 1000 --ops 1000 --workload extract --seed 7 --out run.csv

Sweep (semicolon-separated clauses, comma-separated values; n accepts
decade ranges like 1e2..1e6):

    ratepick-bench --sweep "method=tree,rejection,cr; dist=uniform; \\
        n=1e2..1e5; ratio=1e-3" --seed 7 --out sweep.csv
"""

from __future__ import annotations

import argparse
import math
import sys

from .config import METHODS, WORKLOADS, BenchConfig, expand_grid
from .runner import run_cells


def _c_value(text: str) -> float:
    if text.strip().lower() == "e":
        return math.e
    return float(text)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ratepick-bench",
        description="Timing and attempt-count benchmark for the samplers.")
    p.add_argument("--method", default="tree", choices=METHODS)
    p.add_argument("--dist", default="uniform", choices=("uniform", "loguniform"))
    p.add_argument("--n", type=int, default=1000,
                   help="number of outcomes (default 1000)")
    p.add_argument("--ratio", type=float, default=1e-3,
                   help="min/max rate ratio in (0, 1) (default 1e-3)")
    p.add_argument("--c", type=_c_value, default=None,
                   help="group width factor for method=cr; accepts 'e'")
    p.add_argument("--reps", type=int, default=10_000,
                   help="timing repetitions (default 10000)")
    p.add_argument("--ops", type=int, default=1000,
                   help="operations per repetition (default 1000)")
    p.add_argument("--workload", default="extract",
                   choices=WORKLOADS + ("update",),
                   help="'update' is shorthand for update-extracted")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-",
                   help="CSV output path, '-' for stdout (default)")
    p.add_argument("--sweep", default=None,
                   help="grid spec; unlisted dimensions come from the "
                        "single-cell flags")
    p.add_argument("--engine", default="auto",
                   choices=("auto", "compiled", "python"),
                   help="kernel engine (default auto)")
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    base = BenchConfig(
        method=args.method, dist=args.dist, n=args.n, ratio=args.ratio,
        c=args.c, reps=args.reps, ops_per_rep=args.ops,
        workload=args.workload, seed=args.seed, engine=args.engine)
    cells = expand_grid(args.sweep, base) if args.sweep is not None else [base]

    if args.out == "-":
        failures = run_cells(cells, sys.stdout)
    else:
        with open(args.out, "w", newline="") as fh:
            failures = run_cells(cells, fh, progress=sys.stderr)
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
