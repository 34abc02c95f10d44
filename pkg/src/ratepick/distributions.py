"""Rate distributions used to generate workloads and drive cost models.

Two families, both supported on [low, high] with low > 0:

* uniform: constant density 1/(high - low).
* loguniform: density 1/(x * ln(high/low)); the logarithm of the rate is
  uniform, i.e. every decade carries equal mass.

Rates of exactly zero never appear in generated workloads; a strictly
positive low keeps the ratio parameterisation low/high meaningful and
keeps the log-uniform density finite.  low == high is allowed as the
degenerate point mass so that cost formulas can express their boundary
cases; sampling works there, densities do not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import generator_of

__all__ = ["DistributionSpec", "KINDS"]

KINDS = ("uniform", "loguniform")


@dataclass(frozen=True)
class DistributionSpec:
    """A named rate distribution on [low, high], 0 < low <= high."""

    kind: str
    low: float
    high: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError("kind must be one of %s, got %r" % (KINDS, self.kind))
        object.__setattr__(self, "low", float(self.low))
        object.__setattr__(self, "high", float(self.high))
        if not (math.isfinite(self.low) and math.isfinite(self.high)):
            raise ValueError("bounds must be finite")
        if not (0.0 < self.low <= self.high):
            raise ValueError(
                "bounds must satisfy 0 < low <= high, got [%g, %g]"
                % (self.low, self.high)
            )

    # -- parameters -----------------------------------------------------

    @property
    def ratio(self) -> float:
        """low/high, the skew parameter the cost models are written in."""
        return self.low / self.high

    @property
    def degenerate(self) -> bool:
        return self.low == self.high

    def _log_span(self) -> float:
        return math.log(self.high / self.low)

    # -- sampling ---------------------------------------------------------

    def sample(self, rng) -> float:
        """One rate; consumes exactly one uniform."""
        u = generator_of(rng).random()
        if self.degenerate:
            return self.low  # exp(log(x)) may wobble an ulp; stay exact
        if self.kind == "uniform":
            return self.low + u * (self.high - self.low)
        # exp/log rounding can escape [low, high] by an ulp; clamp to support
        x = math.exp(math.log(self.low) + u * self._log_span())
        return min(max(x, self.low), self.high)

    def sample_many(self, rng, n: int) -> np.ndarray:
        """n rates as a float64 array; consumes exactly n uniforms."""
        u = generator_of(rng).random(int(n))
        if self.degenerate:
            return np.full(int(n), self.low)
        if self.kind == "uniform":
            return self.low + u * (self.high - self.low)
        x = np.exp(math.log(self.low) + u * self._log_span())
        return np.clip(x, self.low, self.high)

    # -- analytic form ---------------------------------------------------------

    def pdf(self, x: float) -> float:
        """Density at x; zero outside [low, high]."""
        if self.degenerate:
            raise ValueError("point-mass distribution has no density")
        x = float(x)
        if x < self.low or x > self.high:
            return 0.0
        if self.kind == "uniform":
            return 1.0 / (self.high - self.low)
        return 1.0 / (x * self._log_span())

    def cdf(self, x: float) -> float:
        """P(rate <= x)."""
        if self.degenerate:
            return 0.0 if x < self.low else 1.0
        x = float(x)
        if x <= self.low:
            return 0.0
        if x >= self.high:
            return 1.0
        if self.kind == "uniform":
            return (x - self.low) / (self.high - self.low)
        return math.log(x / self.low) / self._log_span()

    def mass_between(self, a: float, b: float) -> float:
        """P(a < rate <= b)."""
        return max(0.0, self.cdf(b) - self.cdf(a))

    def mean_between(self, a: float, b: float) -> float:
        """E[rate | a < rate <= b]; the band-conditional mean.

        a and b are clamped to the support.  Undefined (raises) when the
        clamped band is empty.
        """
        a = max(float(a), self.low)
        b = min(float(b), self.high)
        if not b > a:
            raise ValueError("band (%g, %g] carries no mass" % (a, b))
        if self.kind == "uniform":
            return 0.5 * (a + b)
        return (b - a) / math.log(b / a)

    def mean(self) -> float:
        """E[rate] over the whole support."""
        if self.degenerate:
            return self.low
        return self.mean_between(self.low, self.high)
