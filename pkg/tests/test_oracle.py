from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from ulampoly.core import verify_fixed_point
from ulampoly.oracle import RationalTuple, exact_verify_rational, multistart_newton, oracle_u3, u3_quartic

from conftest import enumerated
from helpers import same_set


@pytest.mark.parametrize("x,ok", [
    ((0,), True),
    ((1,), False),
    ((1, -2), True),
    ((0, 0), True),
    ((1, -1, -1), True),
    ((1, -1, -1, 0), True),
    ((Fraction(1, 2), -2), False),
    ((1, -2, 0, 0, 0), True),
])
def test_exact_verify_examples(x, ok):
    assert exact_verify_rational(x) is ok


def test_rational_tuple_parse():
    t = RationalTuple.parse("1, -2, 3/4, 0.1")
    assert t.entries == (1, -2, Fraction(3, 4), Fraction(1, 10))
    np.testing.assert_array_equal(t.to_cvec(), [1, -2, 0.75, 0.1])
    with pytest.raises(ValueError):
        RationalTuple.parse("1,abc")
    with pytest.raises(ValueError):
        RationalTuple([])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=8), min_size=1, max_size=5))
def test_exact_and_float_agree_on_rationals(entries):
    # every rational input is exactly representable after scaling by a power of two
    exact = exact_verify_rational(entries)
    x = np.array([float(e) for e in entries], dtype=complex)
    if all(Fraction(float(e)) == e for e in entries):
        assert exact == verify_fixed_point(x, 1e-12)[0]
    elif exact:
        assert verify_fixed_point(x, 1e-10)[0]


def test_quartic_derivation():
    x = sp.Symbol("x1")
    q = u3_quartic()
    assert q.as_expr().expand() == (2 * x**4 - 2 * x**2 - x + 1)
    assert sp.factor(q.as_expr()) == (x - 1) * (2 * x**3 + 2 * x**2 - 1)


def test_oracle_u3():
    s = oracle_u3()
    assert len(s) == 6 and s.unverified == 0
    assert sum(x.is_real for x in s.solutions) == 4
    for sol in s.solutions:
        assert verify_fixed_point(sol.x, 1e-12)[0]
    assert same_set(s.points(), enumerated(3).points(), 1e-8)


def test_multistart_small():
    s1 = multistart_newton(1, 10, seed=3)
    assert len(s1) == 1 and s1.solutions[0].x[0] == 0
    s2 = multistart_newton(2, 1000, seed=1)
    assert same_set(s2.points(), [[0, 0], [1, -2]], 1e-10)
    assert s2.path_stats["total"] == 1000 and s2.path_stats["converged"] > 500


@pytest.mark.parametrize("n", [3, 4])
def test_multistart_agrees_with_tracking(n):
    s = multistart_newton(n, 20000, box_radius=3.0, seed=0)
    assert same_set(s.points(), enumerated(n).points(), 1e-8)


def test_multistart_bad_arguments():
    for kwargs in ({"num_starts": 0}, {"num_starts": 5, "box_radius": -1}):
        with pytest.raises(ValueError):
            multistart_newton(2, **kwargs)
    with pytest.raises(ValueError):
        multistart_newton(0, 5)
