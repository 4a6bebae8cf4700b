import functools

import numpy as np
import pytest

from ulampoly import _backend
from ulampoly.enumeration import enumerate_ulam
from ulampoly.homotopy import TrackerConfig


@functools.lru_cache(maxsize=None)
def enumerated(n, seed=0):
    """U_n for a given seed, computed once per test session."""
    return enumerate_ulam(n, TrackerConfig(seed=seed), threads=1)


@pytest.fixture(scope="session")
def ulam_sets():
    return enumerated


@pytest.fixture(params=_backend.available())
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20081)
