from fractions import Fraction

import pytest
from hypothesis import given, settings

from core.lexi import (
    NON_TERMINATING,
    TOP,
    ClosureDepth,
    Rank,
    closure_depth,
    coefficient_at,
    compare_lex,
    expand,
    first_divergence,
    remainder,
    render_series,
    valuation,
)
from core.nafield import EPS, ZERO, FieldValue, Ordering, compare
from tests.strategies import field_values

HALF = Fraction(1, 2)
RATIO = (1 + EPS) / (2 + EPS)


def test_valuation_examples():
    assert valuation(EPS ** 2) == Rank(2)
    assert valuation(3 + EPS) == Rank(0)
    assert valuation(EPS / (1 + EPS)) == Rank(1)
    assert valuation(1 / EPS) == Rank(-1)
    assert valuation(ZERO) == TOP


def test_rank_order():
    assert Rank(0) < Rank(1) < TOP
    assert not TOP < Rank(10 ** 6)
    assert str(Rank(2)) == "Int(2)"
    assert str(TOP) == "Top"
    assert Rank(1) + Rank(2) == Rank(3)
    assert Rank(1) + TOP == TOP


def test_coefficient_at_examples():
    assert coefficient_at(RATIO, 0) == HALF
    assert coefficient_at(RATIO, 1) == Fraction(1, 4)
    assert coefficient_at(RATIO, 2) == Fraction(-1, 8)
    assert coefficient_at(EPS ** 2, 2) == 1
    assert coefficient_at(EPS ** 2, 1) == 0
    assert coefficient_at(ZERO, 0) == 0


def test_remainder_examples():
    assert remainder(RATIO, 1) == EPS / (2 * (2 + EPS))
    assert remainder(EPS ** 2, 1) == ZERO
    assert remainder(RATIO, 0) == RATIO
    with pytest.raises(ValueError):
        remainder(RATIO, -1)


def test_expand_examples():
    series = expand(RATIO, 3)
    assert series.valuation == Rank(0)
    assert series.coefficients == (HALF, Fraction(1, 4), Fraction(-1, 8))
    assert not series.exact

    assert expand(EPS ** 2, 5).coefficients == (1,)
    assert expand(EPS ** 2, 5).valuation == Rank(2)
    assert expand(EPS ** 2, 5).exact

    empty = expand(ZERO, 3)
    assert empty.valuation == TOP
    assert empty.coefficients == ()
    assert empty.exact


def test_expand_skips_zero_coefficients():
    value = 1 + EPS ** 3 + EPS ** 5 / (1 - EPS)
    series = expand(value, 2)
    assert series.coefficients == (1, 0, 0, 1)
    assert not series.exact
    assert series.terms == [(0, 1), (3, 1)]

    gap = expand(1 + EPS ** 5, 2)
    assert gap.coefficients == (1, 0, 0, 0, 0, 1)
    assert gap.exact


def test_remainder_at_depth_zero_returns_non_terminating_values():
    for value in (1 / (1 + EPS), RATIO, EPS / (1 - EPS ** 3)):
        assert remainder(value, 0) == value


def test_closure_depth_examples():
    assert closure_depth(HALF + 3 * EPS) == ClosureDepth(2)
    assert closure_depth(1 / (1 + EPS)) == NON_TERMINATING
    assert closure_depth(ZERO) == ClosureDepth(0)
    assert closure_depth(EPS ** -2 + 1) == ClosureDepth(2)
    assert str(closure_depth(1 / (1 + EPS))) == "NonTerminating"
    assert str(ClosureDepth(3)) == "Finite(3)"


def test_compare_lex_examples():
    assert compare_lex(HALF + EPS, FieldValue(HALF)) is Ordering.GREATER
    assert first_divergence(HALF + EPS, FieldValue(HALF)) == (Rank(1), 1, 0)
    assert compare_lex(RATIO, FieldValue(HALF)) is Ordering.GREATER
    assert first_divergence(RATIO, FieldValue(HALF)) == (Rank(1), Fraction(1, 4), 0)
    assert compare_lex(RATIO, RATIO) is Ordering.EQUAL
    assert first_divergence(RATIO, RATIO) is None
    assert compare_lex(ZERO, -EPS) is Ordering.GREATER


def test_render_series():
    assert render_series(expand(EPS / (1 + EPS), 2)) == "e − e^2 + O(e^3)"
    assert render_series(expand(RATIO, 3)) == "1/2 + 1/4·e − 1/8·e^2 + O(e^3)"
    assert render_series(expand(HALF + 3 * EPS, 4)) == "1/2 + 3·e"
    assert render_series(expand(ZERO, 1)) == "0"
    assert render_series(expand(1 / (EPS * (1 + EPS)), 1)) == "e^-1 + O(1)"


@settings(deadline=None, max_examples=200)
@given(field_values(), field_values())
def test_lexicographic_order_matches_field_order(a, b):
    assert compare_lex(a, b) == compare(a, b)


@settings(deadline=None, max_examples=100)
@given(field_values())
def test_remainder_recurrence_and_strict_rank_increase(a):
    previous = remainder(a, 0)
    for n in range(1, 13):
        current = remainder(a, n)
        if previous.is_zero:
            assert current.is_zero
        else:
            k = previous.order()
            leading = previous.num.lowest() / previous.den.lowest()
            assert current == previous - FieldValue.from_laurent((leading,), k)
            assert valuation(current) > valuation(previous)
        previous = current


@settings(deadline=None)
@given(field_values())
def test_expansion_reconstitutes_plus_remainder(a):
    for depth in (1, 3, 6):
        series = expand(a, depth)
        assert series.reconstitute() + remainder(a, depth) == a
        assert series.exact == remainder(a, depth).is_zero


@settings(deadline=None)
@given(field_values())
def test_closure_depth_is_where_expansion_becomes_exact(a):
    depth = closure_depth(a)
    if depth.is_finite and depth.terms > 0:
        assert remainder(a, depth.terms).is_zero
        assert not remainder(a, depth.terms - 1).is_zero
    elif not depth.is_finite:
        assert not remainder(a, 12).is_zero


@settings(deadline=None)
@given(field_values(), field_values())
def test_valuation_is_additive_and_ultrametric(a, b):
    assert valuation(a * b) == valuation(a) + valuation(b)
    assert valuation(a + b) >= min(valuation(a), valuation(b))
    if valuation(a) != valuation(b):
        assert valuation(a + b) == min(valuation(a), valuation(b))
