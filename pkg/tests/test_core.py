"""Shared plumbing: rate validation, compensated sums, the RNG wrapper."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ratepick import InvalidRateError, KahanSum, RandomSource, SamplerError
from ratepick.base import as_rate
from ratepick.errors import (
    AttemptLimitError,
    EmptyStructureError,
    RateExceedsMaxError,
    StaleHandleError,
)
from ratepick.rng import generator_of


def test_as_rate_accepts_non_negative_floats():
    assert as_rate(0) == 0.0
    assert as_rate(1.5) == 1.5
    assert isinstance(as_rate(np.float64(2.0)), float)


@pytest.mark.parametrize("bad", [-1.0, -1e-300, float("nan"), float("inf")])
def test_as_rate_rejects(bad):
    with pytest.raises(InvalidRateError):
        as_rate(bad)


def test_error_hierarchy():
    assert issubclass(InvalidRateError, ValueError)
    assert issubclass(RateExceedsMaxError, InvalidRateError)
    for exc in (EmptyStructureError, StaleHandleError, AttemptLimitError,
                InvalidRateError):
        assert issubclass(exc, SamplerError)


def test_kahan_tracks_small_increments_on_large_base():
    # naive float accumulation loses all of the 1e-8 increments here
    k = KahanSum(1e8)
    for _ in range(10_000):
        k.add(1e-8)
    assert k.value == pytest.approx(1e8 + 1e-4, rel=1e-12)


def test_kahan_reset():
    k = KahanSum()
    k.add(1.0)
    k.add(1e-17)
    k.reset(5.0)
    assert k.value == 5.0
    k.add(-5.0)
    assert k.value == pytest.approx(0.0, abs=1e-30)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
                min_size=1, max_size=300))
def test_kahan_matches_fsum_within_tolerance(xs):
    k = KahanSum()
    for x in xs:
        k.add(x)
    exact = math.fsum(xs)
    assert abs(k.value - exact) <= 1e-12 * max(1.0, abs(exact))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(min_value=1e-9, max_value=1.0, allow_nan=False),
                min_size=1, max_size=100))
def test_kahan_add_then_remove_returns_near_zero(xs):
    k = KahanSum()
    for x in xs:
        k.add(x)
    for x in reversed(xs):
        k.add(-x)
    assert abs(k.value) <= 1e-12 * max(1.0, math.fsum(xs))


def test_random_source_wraps_pcg64():
    a = RandomSource(42)
    b = np.random.Generator(np.random.PCG64(42))
    assert [a.uniform() for _ in range(5)] == b.random(5).tolist()
    assert RandomSource.name == "pcg64"


def test_random_source_helpers():
    rng = RandomSource(7)
    u = rng.uniform_to(10.0)
    assert 0.0 <= u < 10.0
    k = rng.integers(8)
    assert 0 <= k < 8 and isinstance(k, int)


def test_generator_of_accepts_both_forms():
    rng = RandomSource(3)
    assert generator_of(rng) is rng.generator
    gen = np.random.default_rng(3)
    assert generator_of(gen) is gen
    with pytest.raises(TypeError):
        generator_of(object())
