from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from trikernel.errors import DivisionByZeroSeries, NoConvergence, NonSquareLeading
from trikernel.pseries import (
    PuiseuxSeries,
    T,
    ZPoly,
    power,
    puiseux_roots,
    residue_on_unit_circle,
    solve_fixed_point,
    solve_quadratic_root,
    sqrt_series,
)

ONE = PuiseuxSeries.constant(1)


def ps(terms, order=None):
    return PuiseuxSeries.from_terms(terms, order)


def binomial_half(n):
    # coefficient of t^n in (1 + t)^(1/2)
    c = Fraction(1)
    for k in range(n):
        c *= Fraction(1, 2) - k
    for k in range(1, n + 1):
        c /= k
    return c


def test_arith_examples():
    assert (1 + T) * (1 - T) == 1 - T * T
    half = PuiseuxSeries.monomial(1, Fraction(1, 2))
    assert half * half == T
    geo = 1 / PuiseuxSeries({0: 1, 1: -1}, 1, 10)
    assert geo == PuiseuxSeries({k: 1 for k in range(10)}, 1, 10)


def test_division_by_zero():
    with pytest.raises(DivisionByZeroSeries):
        ONE / PuiseuxSeries({}, 1, 5)


def test_sqrt_one_minus_four_t():
    s = sqrt_series(PuiseuxSeries({0: 1, 1: -4}), order=15)
    oracle = PuiseuxSeries({n: binomial_half(n) * (-4) ** n for n in range(15)}, 1, 15)
    assert s == oracle
    # the same numbers are -2 times the Catalan numbers
    assert all(s.coefficient(n) == -2 * comb(2 * n - 2, n - 1) // n for n in range(1, 15))


def test_sqrt_examples():
    assert sqrt_series(T * T).agrees_through(T, 20)
    s = sqrt_series(4 + T, order=8)
    assert s.agrees_through(ps([(0, 2), (1, Fraction(1, 4)), (2, Fraction(-1, 64))]), 3)
    assert s * s == (4 + T).truncate(8)


def test_sqrt_negative_leading():
    with pytest.raises(NonSquareLeading):
        sqrt_series(-1 + T, order=4)


def test_sqrt_ramifies():
    s = sqrt_series(T, order=4)
    assert s.agrees_through(PuiseuxSeries.monomial(1, Fraction(1, 2)), 4)
    with pytest.raises(NonSquareLeading):
        sqrt_series(T, order=4, allow_ramification=False)


def test_fixed_point_W():
    W = solve_fixed_point(lambda S: T * (2 + S**3), 0, order=11)
    assert W == ps([(1, 2), (4, 8), (7, 96), (10, 1536)], 11)
    assert (W - T * (2 + W**3)).truncate(11).is_zero()


def test_fixed_point_Z():
    F = lambda S: T * (1 - 2 * S + 6 * S**2 - 2 * S**3 + S**4) / (1 - S) ** 2  # noqa: E731
    Z = solve_fixed_point(F, 0, order=12)
    assert Z.coefficient(0) == 0 and Z.coefficient(1) == 1
    assert (Z * (1 - Z) ** 2 - T * (1 - 2 * Z + 6 * Z**2 - 2 * Z**3 + Z**4)).truncate(12).is_zero()


def test_fixed_point_trivial():
    assert solve_fixed_point(lambda S: T + S * 0, 0, order=5) == T.truncate(5)


def test_fixed_point_not_contracting():
    with pytest.raises(NoConvergence):
        solve_fixed_point(lambda S: 1 + S, 0, order=3, max_iter=20)


def test_quadratic_trivial():
    roots = [solve_quadratic_root(ONE, -2 * T, 0 * T, b) for b in (1, -1)]
    assert roots[0].agrees_through(2 * T, 20)
    assert roots[1].agrees_through(PuiseuxSeries({}), 20)


def test_kreweras_branch_points():
    d = [T * T, -2 * T, ONE, -4 * T * T]  # (t - x)^2 - 4 t^2 x^3
    roots = puiseux_roots(d, 10)
    x1 = ps([(1, 1), ("5/2", -2), (4, 6), ("11/2", -21), (7, 80), ("17/2", Fraction(-1287, 4))], 10)
    x2 = ps([(1, 1), ("5/2", 2), (4, 6), ("11/2", 21), (7, 80), ("17/2", Fraction(1287, 4))], 10)
    assert any(r.agrees_through(x1, 10) for r in roots)
    assert any(r.agrees_through(x2, 10) for r in roots)


def test_residue_examples():
    assert residue_on_unit_circle(PuiseuxSeries({0: ZPoly.z(-1)})) == ONE
    assert residue_on_unit_circle(PuiseuxSeries({0: ZPoly.z(1) + ZPoly.z(2)})).is_zero()
    assert residue_on_unit_circle({-1: T, 2: ONE}) == T


def test_power_rational():
    a = PuiseuxSeries({0: 1, 1: -1}, 1, 10)
    assert power(power(a, Fraction(3, 2), 10), Fraction(2, 3), 10) == a


def test_serialization_roundtrip():
    s = ps([(Fraction(-1), 3), ("5/4", Fraction(-3, 2))], "41/4")
    assert PuiseuxSeries.from_quadruples(s.to_quadruples(), s.order) == s
    assert PuiseuxSeries.from_json(s.to_json()) == s


def test_pretty():
    W = ps([(1, 2), (4, 8), (7, 96), (10, 1536)], 11)
    assert W.pretty() == "2t + 8t⁴ + 96t⁷ + 1536t¹⁰ + O(t¹¹)"


# properties

coeff = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@st.composite
def series_st(draw, q=None, nonneg=True):
    q = q or draw(st.sampled_from([1, 2, 4]))
    keys = draw(st.lists(st.integers(0 if nonneg else -3, 12), max_size=6))
    trunc = draw(st.integers(13, 20))
    return PuiseuxSeries({k: draw(coeff) for k in keys}, q, trunc)


@settings(max_examples=60, deadline=None)
@given(series_st(), series_st(), series_st())
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


@settings(max_examples=60, deadline=None)
@given(series_st(), st.fractions(min_value=Fraction(1, 5), max_value=9, max_denominator=5))
def test_sqrt_squares_back(a, c0):
    # force a positive square leading coefficient and an even valuation
    b = c0 * c0 + a * T
    s = sqrt_series(b)
    assert s * s == b


@settings(max_examples=60, deadline=None)
@given(series_st(q=1))
def test_ramification_roundtrip(a):
    assert a.with_ramification(4).reduced() == a


@settings(max_examples=40, deadline=None)
@given(series_st(), series_st())
def test_quadratic_residual(b, c):
    # A = 1, B = 1 + ..., so the discriminant has a unit leading term
    s = solve_quadratic_root(ONE, 1 + b * T, c * T, 1)
    assert (s * s + (1 + b * T) * s + c * T).is_zero()


@settings(max_examples=40, deadline=None)
@given(series_st())
def test_inverse(a):
    u = 1 + a * T
    assert (u * (1 / u) - 1).is_zero()
