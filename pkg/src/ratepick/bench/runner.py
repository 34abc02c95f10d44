"""Benchmark execution: build samplers, measure, emit CSV rows.

Measurement design:

* Timing wraps batches of ops_per_rep operations with the monotonic
  nanosecond clock and feeds the per-op batch means to a Welford
  accumulator over reps; single-op timing at this scale would measure
  the clock, not the structure.  The python-level dispatch overhead per
  op is identical across methods, so method-to-method comparisons stand.
* Attempt statistics come from a separate deterministic pass (its own
  derived RNG stream, capped at 10^6 ops) that reads the samplers'
  attempt counters around each operation, so the timed loop stays free
  of bookkeeping.  Timing columns therefore vary run to run; every other
  column is a pure function of the seed.

Each cell derives three independent RNG streams from (seed, cell index):
one to draw the rate set, one for the statistics pass, one for the timed
pass.
"""

from __future__ import annotations

import csv
import sys
import time
from dataclasses import dataclass

import numpy as np

from .. import analytics
from ..composition import CompositionRejectionSampler
from ..cumulative import CumulativeSampler
from ..rejection import RejectionSampler
from ..rng import RandomSource
from ..tree import TreeSampler
from .config import BenchConfig
from .welford import WelfordAccumulator

__all__ = ["COLUMNS", "BenchRecord", "build_sampler", "run_benchmark", "run_cells"]

COLUMNS = [
    "method", "dist", "n", "ratio", "c", "workload", "op_count",
    "mean_ns", "stddev_ns", "attempts_mean", "attempts_stddev",
    "predicted_attempts", "seed", "rng_name",
]

STATS_OPS_CAP = 1_000_000

_BUILD, _STATS, _TIMING = 0, 1, 2


def _stream(seed: int, cell_index: int, purpose: int) -> RandomSource:
    seq = np.random.SeedSequence(entropy=[int(seed), int(cell_index), purpose])
    return RandomSource(seq)


@dataclass
class BenchRecord:
    """One CSV row; measurement fields stay None on partial failure."""

    method: str
    dist: str
    n: int
    ratio: float
    c: float | None
    workload: str
    op_count: int
    seed: int
    rng_name: str
    mean_ns: float | None = None
    stddev_ns: float | None = None
    attempts_mean: float | None = None
    attempts_stddev: float | None = None
    predicted_attempts: float | None = None
    error: str | None = None

    def to_row(self) -> list[str]:
        def cell(x) -> str:
            if x is None:
                return ""
            return repr(x) if isinstance(x, float) else str(x)

        return [
            self.method, self.dist, str(self.n), repr(self.ratio),
            cell(self.c), self.workload, str(self.op_count), cell(self.mean_ns),
            cell(self.stddev_ns), cell(self.attempts_mean),
            cell(self.attempts_stddev), cell(self.predicted_attempts),
            str(self.seed), self.rng_name,
        ]


def build_sampler(cfg: BenchConfig, cell_index: int = 0):
    """Construct the cell's sampler over seed-derived rates.

    Payloads are the integers 0..n-1, so handle h always maps back to
    payload h.
    """
    rng = _stream(cfg.seed, cell_index, _BUILD)
    rates = cfg.spec().sample_many(rng, cfg.n)
    pairs = list(enumerate(rates.tolist()))  # payload = original index
    if cfg.method == "tree":
        return TreeSampler(pairs, engine=cfg.engine)
    if cfg.method == "rejection":
        return RejectionSampler(1.0, pairs, engine=cfg.engine)
    if cfg.method == "cr":
        return CompositionRejectionSampler(
            1.0, pairs, c=cfg.resolved_c(), engine=cfg.engine)
    return CumulativeSampler(pairs)


def _make_op(cfg: BenchConfig, sampler, spec, handles):
    """Bind one benchmark operation as a closure over the sampler."""
    workload = cfg.workload
    if workload == "extract":
        def op(rng):
            sampler.extract(rng)
    elif workload == "update-extracted":
        def op(rng):
            h, _ = sampler.extract(rng)
            sampler.update(h, spec.sample(rng))
    elif workload == "update-arbitrary":
        n = len(handles)

        def op(rng):
            sampler.update(handles[rng.integers(n)], spec.sample(rng))
    else:  # mixed: alternate pure extraction with extract-then-update
        k = 0

        def op(rng):
            nonlocal k
            if k & 1:
                h, _ = sampler.extract(rng)
                sampler.update(h, spec.sample(rng))
            else:
                sampler.extract(rng)
            k += 1
    return op


def _attempt_stats(cfg: BenchConfig, sampler, spec, handles, cell_index):
    """Deterministic per-op attempt mean/stddev for rejection backends."""
    if cfg.method not in ("rejection", "cr"):
        return None, None
    if cfg.workload == "update-arbitrary":
        return None, None  # no extraction happens, nothing to count
    rng = _stream(cfg.seed, cell_index, _STATS)
    k = min(cfg.op_count, STATS_OPS_CAP)
    if cfg.workload == "extract":
        att = sampler.extract_many(rng, k, stats=True)[-1]
    else:
        op = _make_op(cfg, sampler, spec, handles)
        att = np.empty(k, dtype=np.int64)
        for j in range(k):
            before = sampler.n_attempts
            op(rng)
            att[j] = sampler.n_attempts - before
    mean = float(att.mean())
    stddev = float(att.std(ddof=1)) if k >= 2 else 0.0
    return mean, stddev


def _predicted(cfg: BenchConfig):
    spec = cfg.spec()
    if cfg.method == "rejection":
        return analytics.rejection_cost(spec).expected_attempts
    if cfg.method == "cr":
        # the model's total extraction cost (scan steps + attempts)
        return analytics.cr_cost(spec, cfg.resolved_c()).expected_total
    return None


def run_benchmark(cfg: BenchConfig, cell_index: int = 0) -> BenchRecord:
    """Measure one cell. Raises on build/op errors; see run_cells."""
    rec = BenchRecord(
        method=cfg.method, dist=cfg.dist, n=cfg.n, ratio=cfg.ratio,
        c=cfg.resolved_c() if cfg.method == "cr" else None,
        workload=cfg.workload, op_count=cfg.op_count, seed=cfg.seed,
        rng_name=RandomSource.name,
    )
    sampler = build_sampler(cfg, cell_index)
    spec = cfg.spec()
    handles = np.arange(cfg.n)
    rec.predicted_attempts = _predicted(cfg)
    rec.attempts_mean, rec.attempts_stddev = _attempt_stats(
        cfg, sampler, spec, handles, cell_index)

    rng = _stream(cfg.seed, cell_index, _TIMING)
    op = _make_op(cfg, sampler, spec, handles)
    acc = WelfordAccumulator()
    ops = cfg.ops_per_rep
    for _ in range(cfg.reps):
        t0 = time.perf_counter_ns()
        for _ in range(ops):
            op(rng)
        acc.push((time.perf_counter_ns() - t0) / ops)
    rec.mean_ns = acc.mean
    rec.stddev_ns = acc.stddev
    return rec


def run_cells(cells, out, *, progress=None) -> int:
    """Run cells in order, streaming CSV rows to ``out``.

    A failing cell keeps its identity columns, leaves the measurement
    columns empty, warns on stderr and does not stop the run.  Returns
    the number of failed cells.
    """
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(COLUMNS)
    failures = 0
    for idx, cfg in enumerate(cells):
        if progress:
            print("[%d/%d] %s/%s n=%d %s" % (
                idx + 1, len(cells), cfg.method, cfg.dist, cfg.n,
                cfg.workload), file=progress)
        try:
            rec = run_benchmark(cfg, idx)
        except Exception as exc:
            failures += 1
            rec = BenchRecord(
                method=cfg.method, dist=cfg.dist, n=cfg.n, ratio=cfg.ratio,
                c=cfg.resolved_c() if cfg.method == "cr" else None,
                workload=cfg.workload, op_count=cfg.op_count, seed=cfg.seed,
                rng_name=RandomSource.name, error=repr(exc),
            )
            print("warning: cell %d (%s/%s/n=%d) failed: %r"
                  % (idx, cfg.method, cfg.dist, cfg.n, exc), file=sys.stderr)
        writer.writerow(rec.to_row())
    return failures
