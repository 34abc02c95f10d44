"""Random number source used by all samplers.

A thin wrapper around ``numpy.random.Generator`` with the PCG64 bit
generator.  PCG64 has a period of 2**128 and passes the usual statistical
batteries, so benchmark runs of 1e7+ draws never wrap the stream.  The
wrapper exists so that code which only needs "give me a uniform" does not
care which numpy generator sits underneath, and so the benchmark CSV can
name the generator in a stable way.
"""

from __future__ import annotations

import numpy as np

__all__ = ["RandomSource", "generator_of"]


class RandomSource:
    """Seedable stream of uniform variates backed by PCG64.

    Parameters
    ----------
    seed : int, numpy.random.SeedSequence or None
        Entropy for the stream.  ``None`` draws fresh OS entropy.
    """

    __slots__ = ("generator",)

    #: identifier written to benchmark output
    name = "pcg64"

    def __init__(self, seed=None):
        self.generator = np.random.Generator(np.random.PCG64(seed))

    def uniform(self) -> float:
        """One double in [0, 1)."""
        return self.generator.random()

    def uniform_to(self, bound: float) -> float:
        """One double in [0, bound)."""
        return self.generator.random() * bound

    def integers(self, n: int) -> int:
        """One integer in [0, n)."""
        return int(self.generator.integers(n))


def generator_of(rng) -> np.random.Generator:
    """Accept either a RandomSource or a bare numpy Generator."""
    gen = getattr(rng, "generator", rng)
    if not isinstance(gen, np.random.Generator):
        raise TypeError(
            "expected RandomSource or numpy.random.Generator, got %r" % type(rng)
        )
    return gen
