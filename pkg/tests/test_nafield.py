from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from core.exceptions import DivisionByZero, FieldValueSyntaxError, InfiniteValue
from core.nafield import (
    EPS,
    ONE,
    ZERO,
    EpsPoly,
    FieldValue,
    Ordering,
    add,
    compare,
    div,
    is_finite,
    is_infinitesimal,
    mul,
    parse_value,
    render_value,
    sign,
    standard_part,
    sub,
)
from tests.strategies import field_values, nonzero_field_values


def test_add_examples():
    x = FieldValue(EpsPoly([3, 1]), EpsPoly([2, 0, 1]))
    assert add(ZERO, x) == x
    assert add(EPS, EPS) == 2 * EPS
    assert add(EPS / (1 + EPS), 1 / (1 + EPS)) == ONE


def test_mul_div_examples():
    assert mul(EPS, EPS) == FieldValue.eps_power(2)
    inverse = div(ONE, EPS)
    assert inverse == FieldValue.eps_power(-1)
    assert not is_finite(inverse)
    assert div(EPS ** 2, EPS) == EPS
    assert sub(EPS, EPS) == ZERO


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        div(ONE, ZERO)
    with pytest.raises(DivisionByZero):
        FieldValue(1, 0)


def test_compare_examples():
    assert compare(EPS, FieldValue(Fraction(1, 1000))) is Ordering.LESS
    assert compare((1 - EPS) / (1 + EPS), 1 - 2 * EPS) is Ordering.GREATER
    assert compare(ZERO, ZERO) is Ordering.EQUAL
    assert EPS > 0
    assert -EPS < 0


def test_standard_part_examples():
    assert standard_part(Fraction(1, 2) + 3 * EPS) == Fraction(1, 2)
    assert standard_part(EPS / (1 + EPS)) == 0
    assert standard_part((1 + EPS) / (2 - EPS)) == Fraction(1, 2)
    with pytest.raises(InfiniteValue):
        standard_part(1 / EPS)


def test_predicates():
    assert is_infinitesimal(EPS ** 2 / (1 + EPS))
    assert not is_infinitesimal(ZERO)
    assert not is_finite(1 / EPS)
    assert is_finite(ONE + EPS)
    assert sign(-EPS) == -1
    assert sign(ZERO) == 0


def test_canonical_form():
    value = FieldValue(EpsPoly([0, 2]), EpsPoly([0, 4]))
    assert value == FieldValue(Fraction(1, 2))
    assert value.num == EpsPoly([Fraction(1, 2)])
    assert value.den == EpsPoly([1])

    scaled = FieldValue(EpsPoly([0, 6]), EpsPoly([3, 3]))
    assert scaled.den.lowest() == 1
    assert scaled == 2 * EPS / (1 + EPS)


def test_zero_is_stored_as_zero_over_one():
    value = FieldValue(EpsPoly([]), EpsPoly([5, 1]))
    assert value.num.is_zero
    assert value.den == EpsPoly([1])


def test_rational_values_hash_like_fractions():
    assert hash(FieldValue(Fraction(3, 4))) == hash(Fraction(3, 4))
    assert FieldValue(Fraction(3, 4)) == Fraction(3, 4)


def test_render_value():
    assert render_value(EPS / (1 + EPS)) == "e/(1 + e)"
    assert render_value((1 + 2 * EPS) / (2 + EPS ** 2)) == "(1/2 + e)/(1 + 1/2*e^2)"
    assert render_value(FieldValue(Fraction(-1, 2))) == "-1/2"
    assert render_value(ZERO) == "0"


def test_parse_value():
    assert parse_value("e/(1+e)") == EPS / (1 + EPS)
    assert parse_value("(1 + 2e)/(2 + e^2)") == (1 + 2 * EPS) / (2 + EPS ** 2)
    assert parse_value("1/2") == FieldValue(Fraction(1, 2))
    assert parse_value("e^-1") == 1 / EPS
    assert parse_value("-3e^2 + 1") == 1 - 3 * EPS ** 2
    assert parse_value("ε·ε") == EPS ** 2


def test_parse_value_errors():
    with pytest.raises(FieldValueSyntaxError) as info:
        parse_value("1 + ")
    assert info.value.position == 4
    with pytest.raises(FieldValueSyntaxError):
        parse_value("x")
    with pytest.raises(DivisionByZero):
        parse_value("1/0")


@settings(deadline=None)
@given(field_values())
def test_render_parse_round_trip(x):
    assert parse_value(render_value(x)) == x


@settings(deadline=None)
@given(field_values(), field_values(), field_values())
def test_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a - a == ZERO
    assert a * ONE == a


@settings(deadline=None)
@given(nonzero_field_values(), field_values())
def test_division_inverts_multiplication(a, b):
    assert a * a.inverse() == ONE
    assert (b / a) * a == b


@settings(deadline=None)
@given(field_values(), field_values(), field_values())
def test_order_axioms(a, b, c):
    ordering = compare(a, b)
    assert compare(b, a) == Ordering(-ordering)
    if ordering is Ordering.LESS:
        assert a + c < b + c
        if c > 0:
            assert a * c < b * c
    if a <= b and b <= c:
        assert a <= c


@settings(deadline=None)
@given(field_values())
def test_trichotomy_of_sign(a):
    assert sign(a) in (-1, 0, 1)
    assert (sign(a) == 0) == a.is_zero
    assert sign(-a) == -sign(a)
    assert a * a >= 0


@settings(deadline=None)
@given(field_values())
def test_standard_part_of_finite_values(a):
    assume(is_finite(a))
    rest = a - standard_part(a)
    assert rest.is_zero or is_infinitesimal(rest)


def test_parse_plain_rationals_and_rendered_ratios():
    assert parse_value("1/2") == FieldValue(Fraction(1, 2))
    assert parse_value(render_value(EPS / (1 + EPS))) == EPS / (1 + EPS)
    assert parse_value("2^3") == FieldValue(8)
    assert parse_value("(1 + e)^2") == 1 + 2 * EPS + EPS ** 2


def test_cancellation_with_large_coefficients():
    big = 10 ** 6
    factor = EpsPoly([big - 1, -big, 1])
    value = FieldValue(EpsPoly([3, big]) * factor, EpsPoly([big, 7, -1]) * factor)
    assert value == FieldValue(EpsPoly([3, big]), EpsPoly([big, 7, -1]))
    assert value.den.lowest() == 1
    assert value.num == EpsPoly([Fraction(3, big), 1])


@settings(deadline=None)
@given(field_values())
def test_canonical_form_is_idempotent(a):
    again = FieldValue(a.num, a.den)
    assert again.num == a.num
    assert again.den == a.den
    assert a.den.lowest() == 1


@settings(deadline=None)
@given(field_values(), field_values())
def test_standard_part_is_a_ring_homomorphism(a, b):
    assume(is_finite(a) and is_finite(b))
    assert standard_part(a + b) == standard_part(a) + standard_part(b)
    assert standard_part(a * b) == standard_part(a) * standard_part(b)
    assert standard_part(-a) == -standard_part(a)


@given(st.fractions(min_value=Fraction(1, 10 ** 9), max_value=10 ** 9), st.integers(1, 6))
def test_eps_is_below_every_positive_rational(q, k):
    assert ZERO < EPS < q
    assert EPS ** k < q
    assert 1 / EPS > q
    assert not is_infinitesimal(FieldValue(q))
