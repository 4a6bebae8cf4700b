import cmath
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ulampoly.core import ulam_map, verify_fixed_point
from ulampoly.polyroots import (
    MonicPoly,
    RootFindConfig,
    RootFindError,
    eval_horner,
    multiset_match,
    roots_aberth,
    verify_ulam_by_roots,
)

from helpers import random_disc


def brute_match(a, b, tol):
    return any(all(abs(a[i] - b[p[i]]) <= tol for i in range(len(a))) for p in itertools.permutations(range(len(b))))


@pytest.mark.parametrize("coeffs, z, expected", [
    ((1, -2), 1, (0, 3)),
    ((0, 0), 0, (0, 0)),
    ((0, 0, -1), 1, (0, 3)),
])
def test_eval_horner_examples(coeffs, z, expected):
    assert eval_horner(MonicPoly(coeffs), z) == expected


def test_quadratic_formula_oracle():
    # z^2 + z - 2
    disc = cmath.sqrt(1 + 8)
    expected = [(-1 + disc) / 2, (-1 - disc) / 2]
    assert multiset_match(roots_aberth((1, -2)), expected, 1e-12)


def test_cube_roots_of_unity():
    expected = [cmath.exp(2j * cmath.pi * k / 3) for k in range(3)]
    assert multiset_match(roots_aberth((0, 0, -1)), expected, 1e-12)


def test_double_root_at_zero():
    roots = roots_aberth((0, 0))
    assert np.max(np.abs(roots)) < 1e-6


def test_non_convergence_carries_best_iterate():
    with pytest.raises(RootFindError) as info:
        roots_aberth((1, -1, -1, 2, 3), RootFindConfig(max_iterations=1))
    assert info.value.best is not None and len(info.value.best) == 5


def test_config_validation():
    with pytest.raises(ValueError):
        RootFindConfig(max_iterations=0)
    with pytest.raises(ValueError):
        RootFindConfig(convergence_tol=0)
    with pytest.raises(ValueError):
        MonicPoly(np.zeros(33))


@pytest.mark.parametrize("a, b, tol, expected", [
    ((1, -2), (-2, 1), 1e-9, True),
    ((1, -2), (1, -2.1), 1e-3, False),
    ((0, 0), (1e-12, -1e-12), 1e-9, True),
])
def test_multiset_match_examples(a, b, tol, expected):
    assert multiset_match(a, b, tol) is expected


def test_multiset_match_not_greedy():
    # greedy nearest pairing takes 0 -> 0.4 and strands 0.8
    a = (0.0, 0.5)
    b = (0.4, 0.8)
    assert multiset_match(a, b, 0.45)
    assert brute_match(a, b, 0.45)


pts = st.lists(st.integers(-3, 3).map(lambda k: k * 0.25), min_size=1, max_size=5)


@given(pts, pts, st.sampled_from([0.1, 0.3, 0.6]))
@settings(max_examples=150, deadline=None)
def test_multiset_match_agrees_with_permutation_oracle(a, b, tol):
    if len(a) != len(b):
        b = (b * 5)[: len(a)]
    assert multiset_match(a, b, tol) == brute_match(a, b, tol)


@pytest.mark.parametrize("c, expected", [
    ((1, -2), True),
    ((1, -1, -1), True),
    ((1, 1), False),
])
def test_verify_ulam_by_roots_examples(c, expected):
    assert verify_ulam_by_roots(c) is expected


def _separated_tuple(rng, n, radius=2.0, sep=1e-3):
    while True:
        x = random_disc(rng, n, radius)
        d = np.abs(x[:, None] - x[None, :]) + np.eye(n) * 10
        if d.min() > sep:
            return x


def test_root_reconstruction_and_horner(rng):
    for _ in range(100):
        n = int(rng.integers(1, 11))
        x = _separated_tuple(rng, n)
        p = MonicPoly(ulam_map(x))
        roots = roots_aberth(p)
        assert multiset_match(roots, x, 1e-8)
        assert max(abs(eval_horner(p, r)[0]) for r in roots) < 1e-8


def test_verifiers_agree_on_enumerated_sets(ulam_sets):
    for n in range(1, 6):
        for s in ulam_sets(n).solutions:
            assert verify_ulam_by_roots(s.x, tol=1e-6) == verify_fixed_point(s.x, 1e-6)[0] is True


def test_verifiers_agree_on_random_points(rng):
    for _ in range(200):
        x = random_disc(rng, int(rng.integers(1, 7)), 2.0)
        assert verify_ulam_by_roots(x, tol=1e-6) == verify_fixed_point(x, 1e-6)[0]
