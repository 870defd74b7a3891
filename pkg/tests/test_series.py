from __future__ import annotations

from fractions import Fraction
from math import factorial

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from tropper.errors import NotWeightPositive, WeightSearchFailed
from tropper.exact import LaurentCoefficient
from tropper.series import (
    Grading,
    SeriesRing,
    TruncatedSeries,
    exp_series,
    factorize_binomials,
    find_grading,
    graded,
    inverse_series,
    log_series,
    normalize_slab,
    zero_exponent_part,
)


def positive_series(draw_terms, ring: SeriesRing) -> TruncatedSeries:
    f = ring.one()
    for lam, tdeg, num, den in draw_terms:
        f = f + ring.monomial(lam[: ring.rank], tdeg, Fraction(num, den))
    return f


term = st.tuples(
    st.tuples(st.integers(-2, 2), st.integers(-2, 2)),
    st.integers(1, 3),
    st.integers(-5, 5),
    st.integers(1, 4),
)


def test_parse_and_arithmetic():
    ring = SeriesRing(("x", "y"), "t", 3)
    f = ring.parse("1 + x + y*t")
    g = ring.parse("1 - x")
    assert f * g == ring.parse("1 + y*t - x^2 - x*y*t")
    assert (f ** 2).coefficient((0, 2), 2) == LaurentCoefficient.constant(1)
    assert ring.parse("t^4") == ring.zero()


def test_parameters_as_coefficients():
    ring = SeriesRing(("u",), "t", 2)
    f = ring.parse("(a*u^-1 + 1)*(1 + b*u)")
    assert f.coefficient((0,), 0) == LaurentCoefficient.parse("1 + a*b")
    assert f.evaluate([2.0], 0.0, {"a": 1.0, "b": 1.0}) == pytest.approx((0.5 + 1) * 3)


@given(st.lists(term, min_size=1, max_size=4), st.integers(1, 6))
@settings(max_examples=40, deadline=None)
def test_log_exp_round_trip(terms, k):
    ring = SeriesRing(("x", "y"), "t", k)
    f = positive_series(terms, ring)
    assert exp_series(log_series(f)) == f
    g = f - 1
    assert log_series(exp_series(g)) == g


@given(st.lists(term, min_size=1, max_size=4), st.integers(1, 6))
@settings(max_examples=40, deadline=None)
def test_inverse_series(terms, k):
    ring = SeriesRing(("x", "y"), "t", k)
    f = positive_series(terms, ring)
    assert f * inverse_series(f) == ring.one()


@given(st.lists(term, min_size=1, max_size=3), st.integers(1, 6))
@settings(max_examples=40, deadline=None)
def test_factorize_round_trip(terms, k):
    ring = SeriesRing(("x", "y"), "t", k)
    f = positive_series(terms, ring).scale(3)
    unit, factors = factorize_binomials(f)
    prod = ring.constant(unit)
    for b in factors:
        prod = prod * b.as_series(ring)
    assert prod == f


def test_factorize_recovers_binomials():
    ring = SeriesRing(("u",), "t", 4)
    f = ring.parse("(1 + 2*u*t)*(1 + u^-1*t^2)")
    unit, factors = factorize_binomials(f)
    assert unit == LaurentCoefficient.constant(1)
    got = sorted((b.exponent, b.t_order, str(b.coeff)) for b in factors)
    assert got == [((-1,), 2, "1"), ((1,), 1, "2")]


def test_log_of_unit_is_formal():
    ring = SeriesRing(("u",), "t", 3)
    r = log_series(ring.parse("a*t^2*(1 + u*t)"))
    assert r.logs == {"a": 1, "t": 2}
    assert exp_series(r) == ring.parse("a*t^2*(1 + u*t)")


def test_find_grading_needs_a_positive_direction():
    ring = SeriesRing(("u",), "t", 3)
    with pytest.raises(WeightSearchFailed):
        find_grading(ring.parse("1 + u + u^-1"))
    grading, unit = find_grading(ring.parse("1 + u + t*u^-1"))
    assert unit == ((0,), 0, ())
    assert grading.weight(((1,), 0, ())) > 0
    assert grading.weight(((-1,), 1, ())) > 0


def test_log_rejects_non_positive_series():
    ring = SeriesRing(("u",), "t", 3)
    with pytest.raises(NotWeightPositive):
        log_series(ring.parse("1 + u + u^-1"))


def _log_h_oracle(k: int) -> dict[int, Fraction]:
    """Constant term of ``log(1 + x + y + s/(xy))`` by multinomial extraction.

    ``(x + y + s/(xy))^j`` has a constant term only for ``j = 3c`` with
    coefficient ``(3c)! / (c!)^3 s^c``.
    """
    return {c: Fraction((-1) ** (3 * c - 1), 3 * c) * Fraction(factorial(3 * c), factorial(c) ** 3) for c in range(1, k + 1)}


def test_constant_term_of_log_matches_multinomial_oracle():
    ring = SeriesRing(("x", "y"), "s", 4)
    f = ring.parse("1 + x + y + s*x^-1*y^-1")
    grading, _ = find_grading(f, unit=f.constant_key())
    z = zero_exponent_part(log_series(graded(f, grading)))
    oracle = _log_h_oracle(4)
    assert {key[1]: c for key, c in z.terms.items()} == oracle
    assert oracle[1] == 2 and oracle[2] == -15 and oracle[3] == Fraction(560, 3)


def test_normalize_slab_local_p2():
    ring = SeriesRing(("x", "y"), "s", 3)
    f = ring.parse("1 + x + y + s*x^-1*y^-1")
    grading, _ = find_grading(f, unit=f.constant_key())
    g = normalize_slab(graded(f, grading))
    assert {key[1]: c for key, c in g.terms.items()} == {1: -2, 2: 5, 3: -32}
    h = graded(f, grading) + g
    assert not zero_exponent_part(log_series(h)).terms


def test_normalize_slab_is_zero_for_binomial_products():
    ring = SeriesRing(("u",), "t", 4)
    f = ring.parse("(1 + u*t)*(1 + 3*u^-1*t)")
    grading, _ = find_grading(f, unit=f.constant_key())
    assert normalize_slab(graded(f, grading)) == ring.zero()


def test_json_round_trip():
    ring = SeriesRing(("x", "y"), "t", 3)
    f = ring.parse("1 + a*x*t - 2/3*y^-1*t^2")
    assert TruncatedSeries.from_json(ring, f.to_json()) == f


def test_grading_rejects_non_positive_t_weight():
    with pytest.raises(ValueError):
        Grading((Fraction(0),), Fraction(0))


def test_sympy_cross_check_of_exp():
    ring = SeriesRing(("u",), "t", 5)
    f = ring.parse("t + u*t^2")
    e = exp_series(f)
    t, u = sympy.symbols("t u")
    ref = sympy.series(sympy.exp(t + u * t ** 2), t, 0, 6).removeO()
    poly = sympy.Poly(sympy.expand(ref), t, u)
    for (i, j), c in poly.terms():
        assert e.coefficient((j,), i) == LaurentCoefficient.constant(Fraction(str(c)))
    assert len(e.terms) == len(poly.terms())
