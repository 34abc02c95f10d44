"""Dynamic weighted random selection structures.

Pick outcome i with probability rate_i / total while rates change
between draws.  Three structures cover different rate regimes, plus a
cumulative-array oracle for cross-checking:

==============================  =========  ==========================
structure                       extract    best when
==============================  =========  ==========================
TreeSampler                     O(log n)   general purpose
RejectionSampler                O(1) exp.  rates within a tight band
CompositionRejectionSampler     O(1)-ish   wide or drifting rate range
CumulativeSampler               O(n) prep  small n, or as an oracle
==============================  =========  ==========================

Hot paths run on a compiled extension when it is importable and fall
back to pure numpy otherwise; set RATEPICK_ENGINE=python|compiled to
force one.  Single extractions are bit-identical across engines for a
given RNG state.
"""

from ._kernels import available_engines, default_engine
from .analytics import CostPrediction, cr_cost, optimal_c, rejection_cost
from .base import KahanSum, Sampler, as_rate
from .composition import CompositionRejectionSampler
from .cumulative import CumulativeSampler
from .distributions import DistributionSpec
from .errors import (
    AttemptLimitError,
    EmptyStructureError,
    InvalidRateError,
    RateExceedsMaxError,
    SamplerError,
    StaleHandleError,
)
from .rejection import RejectionSampler
from .rng import RandomSource
from .tree import TreeSampler

__version__ = "0.1.0"

__all__ = [
    "available_engines", "default_engine",
    "CostPrediction", "cr_cost", "optimal_c", "rejection_cost",
    "KahanSum", "Sampler", "as_rate",
    "CompositionRejectionSampler", "CumulativeSampler",
    "DistributionSpec",
    "AttemptLimitError", "EmptyStructureError", "InvalidRateError",
    "RateExceedsMaxError", "SamplerError", "StaleHandleError",
    "RejectionSampler", "RandomSource", "TreeSampler",
    "__version__",
]
