"""Benchmark cell configuration and sweep-grid expansion."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

from ..distributions import KINDS, DistributionSpec

__all__ = ["METHODS", "WORKLOADS", "BenchConfig", "expand_grid"]

METHODS = ("tree", "rejection", "cr", "oracle")

# "update" is an alias for update-extracted: re-rating the outcome a draw
# just returned is the natural dynamic workload; updating an arbitrary
# outcome is kept as its own mode because the two stress different paths.
WORKLOADS = ("extract", "update-extracted", "update-arbitrary", "mixed")
_WORKLOAD_ALIASES = {"update": "update-extracted"}


@dataclass(frozen=True)
class BenchConfig:
    """One benchmark cell: what to build and how to measure it."""

    method: str = "tree"
    dist: str = "uniform"
    n: int = 1000
    ratio: float = 0.001
    c: float | None = None
    reps: int = 10_000
    ops_per_rep: int = 1_000
    workload: str = "extract"
    seed: int = 0
    engine: str = "auto"

    def __post_init__(self):
        object.__setattr__(self, "workload",
                           _WORKLOAD_ALIASES.get(self.workload, self.workload))
        if self.method not in METHODS:
            raise ValueError("method must be one of %s" % (METHODS,))
        if self.dist not in KINDS:
            raise ValueError("dist must be one of %s" % (KINDS,))
        if self.workload not in WORKLOADS:
            raise ValueError(
                "workload must be one of %s or 'update'" % (WORKLOADS,))
        if int(self.n) < 1:
            raise ValueError("n must be >= 1")
        if int(self.reps) < 2:
            raise ValueError("reps must be >= 2")
        if int(self.ops_per_rep) < 1:
            raise ValueError("ops must be >= 1")
        if not (0.0 < float(self.ratio) < 1.0):
            raise ValueError("ratio must lie strictly between 0 and 1")
        if self.c is not None and not float(self.c) > 1.0:
            raise ValueError("c must be > 1")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "reps", int(self.reps))
        object.__setattr__(self, "ops_per_rep", int(self.ops_per_rep))
        object.__setattr__(self, "ratio", float(self.ratio))
        object.__setattr__(self, "seed", int(self.seed))

    def spec(self) -> DistributionSpec:
        return DistributionSpec(self.dist, self.ratio, 1.0)

    def resolved_c(self) -> float:
        """Band factor for cr cells: explicit value, else e for uniform
        rates (where the cost model is minimised there) and 2 otherwise."""
        if self.c is not None:
            return float(self.c)
        return math.e if self.dist == "uniform" else 2.0

    @property
    def op_count(self) -> int:
        return self.reps * self.ops_per_rep


# -- sweep grids ----------------------------------------------------------
#
# Grid strings look like "method=tree,cr; n=100..100000; ratio=0.1,0.001".
# Clauses are ;-separated key=value lists; values are ,-separated.  The
# key n accepts decade ranges a..b (inclusive powers of ten) and the key
# c accepts the literal e.  Keys not mentioned keep the base config's
# value.  A sweep with no clauses expands to nothing.

_GRID_KEYS = ("method", "dist", "n", "ratio", "c", "workload")


def _parse_count(text: str) -> int:
    # accept 1e5-style shorthand as long as the value is a whole number
    v = float(text)
    if not v.is_integer():
        raise ValueError("n must be an integer, got %r" % text)
    return int(v)


def _parse_n_values(text: str) -> list[int]:
    out: list[int] = []
    for item in text.split(","):
        item = item.strip()
        if ".." in item:
            a, _, b = item.partition("..")
            lo, hi = _parse_count(a), _parse_count(b)
            if lo < 1 or hi < lo:
                raise ValueError("bad n range %r" % item)
            v = lo
            while v <= hi:
                out.append(v)
                v *= 10
            if out[-1] != hi:
                raise ValueError(
                    "n range %r must span exact powers of ten; "
                    "list values explicitly instead" % item)
        else:
            out.append(_parse_count(item))
    return out


def _parse_values(key: str, text: str) -> list:
    if key == "n":
        return _parse_n_values(text)
    items = [s.strip() for s in text.split(",") if s.strip()]
    if key == "ratio":
        return [float(s) for s in items]
    if key == "c":
        return [math.e if s in ("e", "E") else float(s) for s in items]
    return items  # method, dist, workload: validated by BenchConfig


def expand_grid(grid: str, base: BenchConfig) -> list[BenchConfig]:
    """Cross-product of the grid clauses over the base config.

    Cells come out in deterministic order: keys in the fixed order
    method, dist, n, ratio, c, workload; values in their listed order.
    """
    clauses: dict[str, list] = {}
    for clause in grid.split(";"):
        clause = clause.strip()
        if not clause:
            continue
        key, eq, text = clause.partition("=")
        key = key.strip()
        if not eq or key not in _GRID_KEYS:
            raise ValueError(
                "bad grid clause %r; expected key=v1,v2 with key in %s"
                % (clause, _GRID_KEYS))
        clauses[key] = _parse_values(key, text)
    if not clauses:
        return []
    keys = [k for k in _GRID_KEYS if k in clauses]
    cells = []
    for combo in itertools.product(*(clauses[k] for k in keys)):
        cells.append(replace(base, **dict(zip(keys, combo))))
    return cells
