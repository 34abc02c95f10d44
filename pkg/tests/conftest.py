import numpy as np
import pytest

from ratepick import (
    CompositionRejectionSampler,
    CumulativeSampler,
    DistributionSpec,
    RandomSource,
    RejectionSampler,
    TreeSampler,
)
from ratepick._kernels import available_engines

ENGINES = available_engines()


@pytest.fixture(params=ENGINES)
def engine(request):
    return request.param


def rate_pairs(kind="loguniform", n=100, seed=0, low=1e-3, high=1.0):
    """(payload, rate) pairs with payload == issue order index."""
    spec = DistributionSpec(kind, low, high)
    rates = spec.sample_many(RandomSource(seed), n)
    return list(enumerate(rates.tolist()))


def make_sampler(method, pairs, engine="auto", c=2.0, max_rate=1.0, **kw):
    if method == "tree":
        return TreeSampler(pairs, engine=engine, **kw)
    if method == "rejection":
        return RejectionSampler(max_rate, pairs, engine=engine, **kw)
    if method == "cr":
        return CompositionRejectionSampler(
            max_rate, pairs, c=c, engine=engine, **kw)
    if method == "oracle":
        return CumulativeSampler(pairs)
    raise ValueError(method)


def chi_square_stat(counts, probs):
    """Goodness-of-fit statistic against exact cell probabilities."""
    counts = np.asarray(counts, dtype=np.float64)
    expected = probs * counts.sum()
    return float(((counts - expected) ** 2 / expected).sum())
