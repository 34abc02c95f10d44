"""Benchmark package: config grid, Welford statistics, runner, CLI."""

from .config import METHODS, WORKLOADS, BenchConfig, expand_grid
from .runner import COLUMNS, BenchRecord, build_sampler, run_benchmark, run_cells
from .welford import WelfordAccumulator

__all__ = [
    "METHODS", "WORKLOADS", "BenchConfig", "expand_grid",
    "COLUMNS", "BenchRecord", "build_sampler", "run_benchmark", "run_cells",
    "WelfordAccumulator",
]
