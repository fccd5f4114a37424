"""Hot loops behind a backend switch.

The compiled module is used when it was built; otherwise, or when
``TRENDTRACE_PURE_PYTHON`` is set to a non-empty value, the pure-Python
module is used. Both produce identical results.
"""

from __future__ import annotations

import importlib
import os
import sys
from contextlib import contextmanager
from types import ModuleType
from typing import Iterator

from . import _py

_API = ("splitmix64", "uniform_int", "poisson", "place_events", "accumulate_keywords", "bincount")


def load_backend(name: str) -> ModuleType:
    """Return the kernel module for ``"cython"`` or ``"python"``."""
    if name == "python":
        return _py
    if name == "cython":
        return importlib.import_module(f"{__name__}._cy")
    raise ValueError(f"unknown kernel backend {name!r}")


def available_backends() -> list[str]:
    names = ["python"]
    try:
        load_backend("cython")
    except ImportError:
        pass
    else:
        names.insert(0, "cython")
    return names


if os.environ.get("TRENDTRACE_PURE_PYTHON"):
    BACKEND = "python"
else:
    BACKEND = available_backends()[0]

_impl = load_backend(BACKEND)

splitmix64 = _impl.splitmix64
uniform_int = _impl.uniform_int
poisson = _impl.poisson
place_events = _impl.place_events
accumulate_keywords = _impl.accumulate_keywords
bincount = _impl.bincount



@contextmanager
def use_backend(name: str) -> Iterator[ModuleType]:
    """Temporarily rebind the kernel functions to another backend.

    Callers reach kernels as ``_kernels.<name>`` at call time, so the swap
    reaches the whole pipeline. Not thread-safe; meant for benchmarks and tests.
    """
    global BACKEND
    module = sys.modules[__name__]
    saved = {fn: getattr(module, fn) for fn in _API}, BACKEND
    impl = load_backend(name)
    for fn in _API:
        setattr(module, fn, getattr(impl, fn))
    BACKEND = name
    try:
        yield impl
    finally:
        for fn, f in saved[0].items():
            setattr(module, fn, f)
        BACKEND = saved[1]


__all__ = ["BACKEND", "available_backends", "load_backend", "use_backend", *_API]
