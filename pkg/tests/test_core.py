import itertools

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from ulampoly.core import (
    InputDomainError,
    UlamSystem,
    elem_sym,
    hypersurface_f,
    iterate_map,
    jacobian,
    opposite_residual,
    pad_zero,
    residual,
    ulam_map,
    verify_fixed_point,
)

from helpers import random_disc

finite = st.floats(min_value=-3, max_value=3, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)
tuples = st.lists(cplx, min_size=1, max_size=7)


def fd_jacobian(x, h=1e-6):
    # central differences along the real axis; F is holomorphic so this is dF/dx_k
    n = len(x)
    out = np.empty((n, n), dtype=complex)
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        out[:, k] = (residual(x + e) - residual(x - e)) / (2 * h)
    return out


def brute_sigma(x, j):
    return sum(np.prod(c) for c in itertools.combinations(x, j))


@pytest.mark.parametrize("x, expected", [
    ((1, -2), (-1, -2)),
    ((1, 1, 1), (3, 3, 1)),
    ((0, 0, 0), (0, 0, 0)),
])
def test_elem_sym_examples(x, expected):
    np.testing.assert_allclose(elem_sym(x), expected, atol=0)


def test_elem_sym_matches_subset_sums(rng):
    x = random_disc(rng, 6, 2.0)
    np.testing.assert_allclose(elem_sym(x), [brute_sigma(x, j) for j in range(1, 7)], rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("bad", [[], [np.nan], [1.0, np.inf]])
def test_input_domain(bad):
    with pytest.raises(InputDomainError):
        elem_sym(bad)


@pytest.mark.parametrize("x, expected", [
    ((1, -2), (1, -2)),
    ((0, 0, 0, 0), (0, 0, 0, 0)),
    ((1, 1, 1), (-3, 3, -1)),
])
def test_ulam_map_examples(x, expected):
    np.testing.assert_array_equal(ulam_map(x), expected)


@pytest.mark.parametrize("x, expected", [
    ((1, -2), (0, 0)),
    ((0, 0), (0, 0)),
    ((1, 1, 1), (-4, 2, -2)),
])
def test_residual_examples(x, expected):
    np.testing.assert_array_equal(residual(x), expected)


@pytest.mark.parametrize("x, expected", [
    ((0, 0), [[-2, -1], [0, -1]]),
    ((1, -2), [[-2, -1], [-2, 0]]),
])
def test_jacobian_examples(x, expected):
    np.testing.assert_array_equal(jacobian(x), expected)


def test_jacobian_matches_finite_differences_n4(rng):
    x = random_disc(rng, 4)
    jac = jacobian(x)
    fd = fd_jacobian(x)
    assert np.max(np.abs(jac - fd) / np.maximum(np.abs(fd), 1.0)) < 1e-6


def test_jacobian_at_repeated_entries():
    # double entry: division-based formulas break here, re-expansion must not
    x = np.array([1.0, -1.0, -1.0])
    assert np.max(np.abs(jacobian(x) - fd_jacobian(x))) < 1e-8


def test_jacobian_matches_sympy_symbolic():
    syms = sp.symbols("a b c d")
    z = sp.Symbol("z")
    coeffs = sp.Poly(sp.prod([z - s for s in syms]), z).all_coeffs()[1:]
    F = [coeffs[j] - syms[j] for j in range(4)]
    J = sp.Matrix(F).jacobian(syms)
    point = {syms[0]: 1, syms[1]: -2, syms[2]: sp.Rational(1, 3), syms[3]: 5}
    expected = np.array(J.subs(point).evalf(), dtype=complex)
    np.testing.assert_allclose(jacobian([1, -2, 1 / 3, 5]), expected, rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("x, ok, norm", [
    ((1, -1, -1), True, 0.0),
    ((1, -2, 0), True, 0.0),
    ((1, 1), False, 3.0),
])
def test_verify_fixed_point_examples(x, ok, norm):
    assert verify_fixed_point(x, 1e-10) == (ok, norm)


def test_fixed_points_from_polynomial_expansion():
    # (z-1)(z+1)^2 = z^3 + z^2 - z - 1 and z(z-1)(z+2) = z^3 + z^2 - 2z
    z = sp.Symbol("z")
    for roots in [(1, -1, -1), (1, -2, 0)]:
        coeffs = sp.Poly(sp.expand(sp.prod([z - r for r in roots])), z).all_coeffs()[1:]
        assert tuple(int(c) for c in coeffs) == roots


def test_verify_rejects_bad_tol():
    with pytest.raises(ValueError):
        verify_fixed_point((0,), 0.0)


@pytest.mark.parametrize("z, x, expected", [
    (5, (1, -2), 0),
    (1, (1, 1), 3),
    (0, (0, 1), 1),
])
def test_hypersurface_examples(z, x, expected):
    assert hypersurface_f(z, x) == expected


def test_hypersurface_matches_direct_product(rng):
    x = random_disc(rng, 5, 2.0)
    for z in random_disc(rng, 10, 3.0):
        lhs = z ** 5 + sum(x[j] * z ** (4 - j) for j in range(5))
        rhs = np.prod(z - x)
        assert abs(hypersurface_f(z, x) - (lhs - rhs)) < 1e-10


@pytest.mark.parametrize("x, expected", [
    ((1, -2), (1, -2, 0)),
    ((0,), (0, 0)),
    ((1, -1, -1), (1, -1, -1, 0)),
])
def test_pad_zero_examples(x, expected):
    padded = pad_zero(x)
    np.testing.assert_array_equal(padded, expected)
    if verify_fixed_point(x, 1e-10)[0]:
        assert verify_fixed_point(padded, 1e-10)[0]


@pytest.mark.parametrize("x, expected", [
    ((2.5 - 1j,), (0,)),
    ((1, -2), (2, -4)),
    ((0, 0), (0, 0)),
])
def test_opposite_residual_examples(x, expected):
    np.testing.assert_array_equal(opposite_residual(x), expected)


def test_iterate_map_examples():
    orbit = iterate_map((1, -2), 3)
    assert len(orbit.points) == 4 and not orbit.diverged
    for p in orbit.points:
        np.testing.assert_array_equal(p, (1, -2))
    orbit = iterate_map((0.5, 0.5), 1)
    np.testing.assert_array_equal(orbit.points[1], (-1, 0.25))
    orbit = iterate_map((0, 0, 0), 5)
    assert len(orbit.points) == 6 and all(np.all(p == 0) for p in orbit.points)


def test_iterate_map_flags_divergence():
    orbit = iterate_map((3, 3, 3), 50)
    assert orbit.diverged
    assert len(orbit.points) < 51
    assert all(np.max(np.abs(p)) <= 1e8 for p in orbit.points)
    with pytest.raises(ValueError):
        iterate_map((1,), -1)


def test_ulam_system_checks_degree():
    system = UlamSystem(2)
    np.testing.assert_array_equal(system.residual((1, -2)), (0, 0))
    with pytest.raises(InputDomainError):
        system.jacobian((1, 2, 3))
    with pytest.raises(ValueError):
        UlamSystem(0)


# --- properties -------------------------------------------------------------

@given(tuples, st.randoms(use_true_random=False))
@settings(max_examples=60, deadline=None)
def test_permutation_symmetry(x, rnd):
    x = np.array(x)
    base = elem_sym(x)
    for _ in range(10):
        perm = list(range(len(x)))
        rnd.shuffle(perm)
        np.testing.assert_allclose(elem_sym(x[perm]), base, rtol=1e-9, atol=1e-9)


@given(tuples, st.lists(cplx, min_size=20, max_size=20))
@settings(max_examples=60, deadline=None)
def test_vieta_consistency(x, zs):
    x = np.array(x)
    n = len(x)
    c = ulam_map(x)
    for z in zs:
        lhs = z ** n + sum(c[j] * z ** (n - 1 - j) for j in range(n))
        rhs = np.prod(z - x)
        scale = max(1.0, abs(z) + 1.0) ** n * max(1.0, np.max(np.abs(x)) + 1.0) ** n
        assert abs(lhs - rhs) <= 1e-10 * max(abs(rhs), 1.0) or abs(lhs - rhs) <= 1e-13 * scale


def test_jacobian_correct_at_100_points(rng):
    worst = 0.0
    for _ in range(100):
        x = random_disc(rng, int(rng.integers(1, 8)))
        fd = fd_jacobian(x)
        worst = max(worst, np.max(np.abs(jacobian(x) - fd) / np.maximum(np.abs(fd), 1.0)))
    assert worst < 1e-6


@given(st.builds(complex, st.floats(-1e6, 1e6), st.floats(-1e6, 1e6)))
def test_degree_one_opposite_family(alpha):
    assert opposite_residual([alpha])[0] == 0


def test_line_membership_iff_fixed_point(ulam_sets, rng):
    candidates = [s.x for n in range(1, 5) for s in ulam_sets(n).solutions]
    candidates += [random_disc(rng, int(rng.integers(1, 6)), 2.0) for _ in range(30)]
    for x in candidates:
        zs = random_disc(rng, 50, 10.0)
        on_line = max(abs(hypersurface_f(z, x)) for z in zs) < 1e-8
        assert on_line == verify_fixed_point(x, 1e-10)[0]


def test_padding_closure_on_known_points(ulam_sets):
    for n in range(1, 5):
        for s in ulam_sets(n).solutions:
            ok, r = verify_fixed_point(s.x, 1e-10)
            assert ok
            assert verify_fixed_point(pad_zero(s.x), 1e-10)[0]


def test_fixed_points_fixed_under_iteration(ulam_sets):
    points = [s.x for n in range(1, 5) for s in ulam_sets(n).solutions]
    points += [np.array(x, dtype=complex) for x in [(1, -2), (0, 0, 0), (1, -1, -1), (1, -2, 0, 0)]]
    for x in points:
        for p in iterate_map(x, 3).points:
            assert np.max(np.abs(p - x)) <= 1e-12
