"""Grouped rejection sampler: band placement, migration, counters, sums."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ratepick import (
    AttemptLimitError,
    CompositionRejectionSampler,
    EmptyStructureError,
    InvalidRateError,
    RandomSource,
    RateExceedsMaxError,
    StaleHandleError,
)

from conftest import ENGINES, rate_pairs


def make(pairs=(), c=2.0, **kw):
    return CompositionRejectionSampler(1.0, pairs, c=c, **kw)


# -- band arithmetic --------------------------------------------------------------

def test_group_index_respects_half_open_bands():
    s = make()
    assert s.group_index(1.0) == 0
    assert s.group_index(0.6) == 0
    assert s.group_index(0.5) == 1          # upper edge belongs to the band below
    assert s.group_index(np.nextafter(0.5, 1.0)) == 0
    assert s.group_index(0.25) == 2
    assert s.group_index(0.2) == 2


def test_group_index_decade_chain():
    s = CompositionRejectionSampler(1.0, c=10.0)
    # 1e-3 sits strictly below the 0.001 band edge's group, in band 3
    assert s.group_index(1e-3) == 3
    assert s.group_index(np.nextafter(1e-3, 1.0)) == 2
    assert s.group_index(0.01) == 2
    assert s.group_index(0.5) == 0


def test_group_index_rejects_out_of_range():
    s = make()
    with pytest.raises(InvalidRateError):
        s.group_index(0.0)
    with pytest.raises(InvalidRateError):
        s.group_index(1.5)


def test_group_ceilings_follow_division_chain():
    s = make(c=3.0)
    s.group_index(1e-4)  # force growth
    hi = 1.0
    for i in range(s.n_groups):
        assert s.group_ceiling(i) == hi
        hi = hi / 3.0


def test_parameter_validation():
    with pytest.raises(ValueError):
        CompositionRejectionSampler(1.0, c=1.0)
    with pytest.raises(ValueError):
        CompositionRejectionSampler(1.0, c=float("nan"))
    with pytest.raises(InvalidRateError):
        CompositionRejectionSampler(0.0)


# -- membership bookkeeping ----------------------------------------------------------

def test_add_places_rates_in_their_bands():
    s = make([(0, 1.0), (1, 0.6), (2, 0.3), (3, 0.04)])
    assert s.group_count(0) == 2
    assert s.group_count(1) == 1
    assert s.group_count(4) == 1  # 0.04 in (1/32, 1/16]
    assert len(s) == 4
    s.validate()


def test_update_same_band_is_in_place():
    s = make([(0, 0.8)])
    s.update(0, 0.9)  # still band 0
    assert s.group_count(0) == 1 and s.rate_of(0) == 0.9
    assert s.total_rate() == pytest.approx(0.9)
    s.validate()


def test_update_migrates_between_bands():
    s = make([(0, 0.8), (1, 0.7)])
    s.update(0, 0.01)
    assert s.group_count(0) == 1
    assert s.group_count(s.group_index(0.01)) == 1
    assert s.total_rate() == pytest.approx(0.71)
    s.validate()


def test_dormant_lifecycle():
    s = make([("a", 0.5), ("b", 0.125)])
    s.update(1, 0.0)
    assert len(s) == 1 and s.payload_of(1) == "b"
    assert s.rate_of(1) == 0.0
    seen = {s.extract(RandomSource(k))[0] for k in range(30)}
    assert seen == {0}
    s.update(1, 0.9)  # wakes into a different band than it left
    assert len(s) == 2
    assert s.group_count(0) == 1
    s.validate()


def test_delete_and_stale():
    s = make([("a", 0.5), ("b", 0.3)])
    s.delete(0)
    with pytest.raises(StaleHandleError):
        s.update(0, 0.1)
    assert len(s) == 1
    assert s.total_rate() == pytest.approx(0.3)
    s.validate()


def test_ceiling_enforced():
    s = make()
    with pytest.raises(RateExceedsMaxError):
        s.add("x", 1.1)
    h = s.add("x", 1.0)
    with pytest.raises(RateExceedsMaxError):
        s.update(h, 1.0001)


def test_emptied_band_sums_to_exact_zero():
    s = make([(0, 0.3), (1, 0.27)])  # both band 1
    s.delete(0)
    s.delete(1)
    assert s.group_sum(1) == 0.0
    assert s.total_rate() == 0.0
    s.validate()


def test_rebuild_sums_restores_exactness():
    s = make(rate_pairs(n=500, seed=5))
    rng = RandomSource(6)
    for k in range(2000):
        s.update(k % 500, rng.uniform())
    s.rebuild_sums()
    for gi in range(s.n_groups):
        grp = s._groups[gi]
        assert s.group_sum(gi) == math.fsum(grp.rates[: grp.n].tolist())
    s.validate()


# -- extraction ------------------------------------------------------------------------

@pytest.mark.parametrize("engine", ENGINES)
def test_counters_cover_scans_and_attempts(engine):
    s = make(rate_pairs(n=200, seed=1), engine=engine)
    h, groups, att = s.extract_many(RandomSource(2), 400, stats=True)
    assert s.n_extracts == 400
    assert s.n_scan_steps == int(groups.sum())
    assert s.n_attempts == int(att.sum())
    assert (att >= 1).all()
    assert h.shape == (400,)


@pytest.mark.parametrize("engine", ENGINES)
def test_single_extract_consistent_across_calls(engine):
    s = make(rate_pairs(n=100, seed=3), engine=engine)
    a = [s.extract(RandomSource(11))[0] for _ in range(100)]
    b = [s.extract(RandomSource(11))[0] for _ in range(100)]
    assert a == b


def test_empty_band_is_skipped_by_scan():
    # bands 0 and 2 occupied, band 1 empty
    s = make([(0, 0.9), (1, 0.13)])
    assert s.group_count(0) == 1
    assert s.group_count(1) == 0
    assert s.group_count(2) == 1
    seen = {s.extract(RandomSource(k))[0] for k in range(60)}
    assert seen == {0, 1}
    s.validate()


def test_extract_empty_raises():
    s = make()
    with pytest.raises(EmptyStructureError):
        s.extract(RandomSource(0))
    s.add("zero", 0.0)
    with pytest.raises(EmptyStructureError):
        s.extract_many(RandomSource(0), 2)


@pytest.mark.parametrize("engine", ENGINES)
def test_attempt_limit_raises_loudly(engine):
    # a rate at the very bottom of a wide band accepts ~ once per c attempts;
    # with c huge and a one-attempt budget the failsafe fires
    s = CompositionRejectionSampler(
        1.0, [("stuck", np.nextafter(1e-6, 1.0))], c=1e6, engine=engine,
        max_attempts=1)
    with pytest.raises(AttemptLimitError):
        for k in range(50):  # acceptance ~1e-6 per attempt; 50 tries is plenty
            s.extract(RandomSource(k))


def test_payload_roundtrip_through_extraction():
    payloads = ["p%d" % i for i in range(50)]
    s = make(list(zip(payloads, [0.5 + 0.005 * i for i in range(50)])))
    h, p = s.extract(RandomSource(1))
    assert p == payloads[h]


# -- structural fuzzing -------------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(
    ops=st.lists(
        st.tuples(st.sampled_from(["add", "update", "delete"]),
                  st.floats(min_value=0.0, max_value=1.0, allow_nan=False)),
        min_size=1, max_size=60),
    pick=st.randoms(use_true_random=False),
)
def test_random_op_sequences_preserve_invariants(ops, pick):
    s = make([(i, 0.5) for i in range(3)])
    live = [0, 1, 2]
    for op, value in ops:
        if op == "add":
            live.append(s.add(None, value))
        elif op == "update" and live:
            s.update(pick.choice(live), value)
        elif op == "delete" and live:
            h = pick.choice(live)
            live.remove(h)
            s.delete(h)
    s.validate()
    exact = math.fsum(s.rate_of(h) for h in live)
    assert abs(s.total_rate() - exact) <= 1e-9 * max(1.0, exact)
    assert len(s) == sum(1 for h in live if s.rate_of(h) > 0.0)
