"""Kernel selection.

The compiled kernel is used when it imports; ``ULAMPOLY_BACKEND=python``
forces the pure-Python fallback.  ``load(name)`` returns a specific one, which
is how the tests and the benchmark compare the two.
"""
from __future__ import annotations

import importlib
import os

_MODULES = {"cython": "ulampoly._ckernel", "python": "ulampoly._pykernel"}


def load(name: str):
    if name not in _MODULES:
        raise ValueError(f"unknown backend {name!r}; choose from {sorted(_MODULES)}")
    return importlib.import_module(_MODULES[name])


def available() -> list[str]:
    names = []
    for name in _MODULES:
        try:
            load(name)
        except ImportError:
            continue
        names.append(name)
    return names


def _select():
    forced = os.environ.get("ULAMPOLY_BACKEND", "").strip().lower()
    if forced:
        return forced, load(forced)
    try:
        return "cython", load("cython")
    except ImportError:
        return "python", load("python")


BACKEND, kernel = _select()
