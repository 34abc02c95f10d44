"""Kernel engine selection.

Two interchangeable implementations of the sampler hot loops exist: a
Cython extension (``ckernels``) and a pure numpy module (``pykernels``).
The compiled engine is used when the extension was built; the environment
variable RATEPICK_ENGINE=python|compiled overrides the default for the
whole process, and every sampler constructor accepts ``engine=`` for a
per-instance choice.
"""

from __future__ import annotations

import os

from . import pykernels

try:
    from . import ckernels
except ImportError:  # extension not built on this install
    ckernels = None

_ENGINES = {"python": pykernels}
if ckernels is not None:
    _ENGINES["compiled"] = ckernels

__all__ = ["available_engines", "default_engine", "get_kernels"]


def available_engines() -> tuple[str, ...]:
    return tuple(sorted(_ENGINES))


def default_engine() -> str:
    env = os.environ.get("RATEPICK_ENGINE", "").strip().lower()
    if env and env != "auto":
        if env not in _ENGINES:
            raise ValueError(
                "RATEPICK_ENGINE=%r is not available; choose from %s"
                % (env, sorted(_ENGINES))
            )
        return env
    return "compiled" if "compiled" in _ENGINES else "python"


def get_kernels(engine: str = "auto"):
    """Resolve an engine name to its kernel module."""
    if engine == "auto":
        engine = default_engine()
    try:
        return _ENGINES[engine]
    except KeyError:
        raise ValueError(
            "unknown engine %r; available: %s" % (engine, sorted(_ENGINES))
        ) from None


def engine_name(module) -> str:
    return "compiled" if module is ckernels else "python"
