"""Compiled-vs-python engine comparison.

Times the same extraction workload on every sampler under each available
kernel engine and prints a table.  The cumulative-array oracle has no
kernel engine and appears once as a reference row.

    python3 -m ratepick.bench.compare_engines --n 100000 --reps 200

This table is intentionally separate from the main benchmark CSV, whose
column set does not include an engine dimension.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time

from .._kernels import available_engines
from .config import BenchConfig
from .runner import _stream, build_sampler
from .welford import WelfordAccumulator

_METHODS = ("tree", "rejection", "cr")


def _time_cell(cfg: BenchConfig, cell_index: int) -> tuple[float, float]:
    sampler = build_sampler(cfg, cell_index)
    rng = _stream(cfg.seed, cell_index, 2)
    acc = WelfordAccumulator()
    for _ in range(cfg.reps):
        t0 = time.perf_counter_ns()
        sampler.extract_many(rng, cfg.ops_per_rep)
        acc.push((time.perf_counter_ns() - t0) / cfg.ops_per_rep)
    return acc.mean, acc.stddev


def main(argv=None) -> int:
    p = argparse.ArgumentParser(
        description="Compare kernel engines on batched extraction.")
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--dist", default="loguniform",
                   choices=("uniform", "loguniform"))
    p.add_argument("--ratio", type=float, default=1e-3)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--ops", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="also write CSV here")
    args = p.parse_args(argv)

    engines = available_engines()
    rows = []
    cell = 0
    for method in _METHODS:
        for engine in engines:
            cfg = BenchConfig(
                method=method, dist=args.dist, n=args.n, ratio=args.ratio,
                reps=args.reps, ops_per_rep=args.ops, seed=args.seed,
                engine=engine)
            mean, stddev = _time_cell(cfg, cell)
            rows.append((method, engine, mean, stddev))
            cell += 1
    cfg = BenchConfig(
        method="oracle", dist=args.dist, n=args.n, ratio=args.ratio,
        reps=args.reps, ops_per_rep=args.ops, seed=args.seed)
    mean, stddev = _time_cell(cfg, cell)
    rows.append(("oracle", "-", mean, stddev))

    base = {m: mean for m, engine, mean, _ in rows if engine == "python"}
    print("engines available: %s" % ", ".join(engines))
    print("%-10s %-9s %12s %12s %8s" %
          ("method", "engine", "mean_ns", "stddev_ns", "speedup"))
    for method, engine, mean, stddev in rows:
        ref = base.get(method)
        speedup = "%.2fx" % (ref / mean) if ref and engine == "compiled" else ""
        print("%-10s %-9s %12.1f %12.1f %8s" %
              (method, engine, mean, stddev, speedup))

    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["method", "engine", "n", "dist", "ratio",
                        "op_count", "mean_ns", "stddev_ns", "seed"])
            for method, engine, mean, stddev in rows:
                w.writerow([method, engine, args.n, args.dist,
                            repr(args.ratio), args.reps * args.ops,
                            repr(mean), repr(stddev), args.seed])
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
