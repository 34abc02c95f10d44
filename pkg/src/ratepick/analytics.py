"""Closed-form expected-cost models for the rejection-based samplers.

Plain rejection against a ceiling accepts each attempt with probability
E[rate]/ceiling, so the expected attempt count is the reciprocal:

* uniform rates: attempts -> 2 as low/high -> 0 (mean rate approaches
  half the ceiling);
* log-uniform rates: attempts = ln(high/low)/(1 - low/high), growing
  with the log of the skew.

The grouped sampler is modelled band by band.  With bands
(high/c**(i+1), high/c**i], a draw lands in band i with probability
rho_i equal to the band's share of the total rate (groups are selected
proportionally to their rate sums, so the share is the band integral of
x*f(x) over E[rate], not the fraction of outcomes that live there).
The per-attempt acceptance, conditioned on the draw landing in that
band, is q_i = E[rate | band i]/ceiling_i.  A draw that lands in band i
costs i scan steps plus 1/q_i expected attempts, so

    E[cost] = sum_i rho_i * (i + 1/q_i)

evaluated over the finite band list with the last band integrating only
down to ``low`` (the bands then partition the support and the shares sum
to 1).  This finite sum is measurement-grade: Monte-Carlo scan and
attempt counters converge to it.

``cr_cost`` additionally reports a closed-form total obtained by summing
the geometric series in the band index, the form the asymptotic analysis
works with (for rates uniform on (0, high] it grows like
(c/ln c) * ln(high/low) * high/low, whose c-dependence is minimised at
c = e; for log-uniform rates it grows like ln^2(high/low) with no
interior optimum in c).  The closed form treats every band as full width
and keeps the series algebra of the derivation, so it tracks the finite
sum only in shape, not value; use the finite sum to predict measurements
and the closed form to reason about scaling and to choose c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .distributions import DistributionSpec

__all__ = ["CostPrediction", "rejection_cost", "cr_cost", "optimal_c"]


@dataclass(frozen=True)
class CostPrediction:
    """Expected per-extraction cost of a rejection-family sampler.

    p_accept is the overall per-attempt acceptance probability, so
    expected_attempts == 1/p_accept.  expected_select counts group scan
    steps (zero for plain rejection) and expected_total is their sum.
    depth_d is the index of the band holding the smallest rate; the
    structure spans depth_d + 1 bands.  group_mass[i] is rho_i, band i's
    share of the total rate (its selection probability), and
    group_acceptance[i] is q_i; closed_form_total is the
    geometric-series form (None for plain rejection).
    """

    p_accept: float
    expected_attempts: float
    expected_select: float
    expected_total: float
    depth_d: int
    group_mass: tuple = field(default=())
    group_acceptance: tuple = field(default=())
    closed_form_total: float | None = None


def rejection_cost(spec: DistributionSpec) -> CostPrediction:
    """Expected attempts for plain rejection with ceiling = spec.high."""
    p = spec.mean() / spec.high
    attempts = 1.0 / p
    return CostPrediction(
        p_accept=p,
        expected_attempts=attempts,
        expected_select=0.0,
        expected_total=attempts,
        depth_d=0,
    )


def _bands(spec: DistributionSpec, c: float):
    """Yield (index, lo, hi) down to and including the band holding low.

    Bounds come from the division chain high, high/c, high/c/c, ...,
    mirroring the grouped sampler, so the band count is immune to the
    one-ulp noise a floor(log) would suffer at exact powers of c.
    """
    hi = spec.high
    i = 0
    while True:
        lo = hi / c
        yield i, lo, hi
        if lo < spec.low:
            return
        hi = lo
        i += 1


def cr_cost(spec: DistributionSpec, c: float) -> CostPrediction:
    """Per-extraction cost model of the grouped sampler with constant c.

    Returns the finite-sum evaluation in the expected_* fields and the
    geometric-series closed form in closed_form_total.
    """
    c = float(c)
    if not (math.isfinite(c) and c > 1.0):
        raise ValueError("band factor c must be finite and > 1")
    masses: list[float] = []
    accepts: list[float] = []
    e_select = 0.0
    e_attempts = 0.0
    mean_rate = spec.mean()
    for i, lo, hi in _bands(spec, c):
        a = max(lo, spec.low)
        b = min(hi, spec.high)
        if spec.degenerate:
            mass = 1.0 if i == 0 else 0.0
            q = spec.low / hi
        elif b > a:
            # selection probability = band integral of x f(x) over E[x]
            mass = spec.mass_between(a, b) * spec.mean_between(a, b) / mean_rate
            q = spec.mean_between(a, b) / hi
        else:
            mass, q = 0.0, 1.0  # edge band left unpopulated by the clamp
        masses.append(mass)
        accepts.append(q)
        e_select += i * mass
        if mass > 0.0:
            e_attempts += mass / q
    depth = len(masses) - 1
    return CostPrediction(
        p_accept=1.0 / e_attempts,
        expected_attempts=e_attempts,
        expected_select=e_select,
        expected_total=e_select + e_attempts,
        depth_d=depth,
        group_mass=tuple(masses),
        group_acceptance=tuple(accepts),
        closed_form_total=_closed_form(spec, c, depth),
    )


def _closed_form(spec: DistributionSpec, c: float, d: int) -> float:
    """Geometric-series total for d+1 full-width bands.

    Uniform case:   [c + c^(1+d)(cd - d - 1)] / [(1 - m)(c - 1)]
                    + 2c^2 (c^(1+d) - 1)/(c^2 - 1),  m = low/high.
    Log-uniform:    (1/t) [d(d+1)/2 + (d+1) c L/(c-1)],
                    L = ln(high/low), t = L/ln(c).
    """
    if spec.degenerate:
        return 1.0
    m = spec.ratio
    if spec.kind == "uniform":
        first = (c + c ** (1 + d) * (c * d - d - 1.0)) / ((1.0 - m) * (c - 1.0))
        second = 2.0 * c * c * (c ** (1 + d) - 1.0) / (c * c - 1.0)
        return first + second
    span = math.log(spec.high / spec.low)
    t = span / math.log(c)
    return (d * (d + 1) / 2.0 + (d + 1) * c * span / (c - 1.0)) / t


def optimal_c(spec: DistributionSpec) -> float | None:
    """Cost-minimising band factor, when the model singles one out.

    For uniform rates the closed-form total scales as c/ln(c) (times
    terms independent of c), which is minimised at exactly c = e.  For
    log-uniform rates the leading term has no c-dependence left, so no
    particular c is preferred and None is returned.
    """
    if spec.kind == "uniform":
        return math.e
    return None
