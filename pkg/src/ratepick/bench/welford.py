"""Online mean and variance in one pass (Welford's update)."""

from __future__ import annotations

import math

__all__ = ["WelfordAccumulator"]


class WelfordAccumulator:
    """Running count, mean and sum of squared deviations.

    One push per sample; mean is exact up to rounding and the sample
    variance is m2/(count-1).  Numerically stable where the textbook
    sum-of-squares formula cancels catastrophically.
    """

    __slots__ = ("count", "mean", "m2")

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self.m2 = 0.0

    def push(self, x: float) -> None:
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (x - self.mean)

    def push_many(self, xs) -> None:
        for x in xs:
            self.push(x)

    @property
    def variance(self) -> float:
        """Sample variance (ddof=1); 0.0 before the second push."""
        if self.count < 2:
            return 0.0
        return self.m2 / (self.count - 1)

    @property
    def stddev(self) -> float:
        return math.sqrt(self.variance)
