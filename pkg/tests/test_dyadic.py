"""Exact dyadic arithmetic, checked against fractions.Fraction as oracle."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from divmart.dyadic import Dyadic

dyadics = st.builds(
    Dyadic,
    st.integers(min_value=-(2**40), max_value=2**40),
    st.integers(min_value=0, max_value=48),
)


def frac(d: Dyadic) -> Fraction:
    return Fraction(d.num, 1 << d.exp)


def test_canonical_form():
    assert Dyadic(4, 2) == Dyadic(1)
    assert Dyadic(4, 2).num == 1 and Dyadic(4, 2).exp == 0
    assert Dyadic(6, 3).num == 3 and Dyadic(6, 3).exp == 2
    assert Dyadic(0, 7).exp == 0
    # negative exp means multiplication by 2**-exp
    assert Dyadic(3, -2) == Dyadic(12)


def test_constructors():
    assert Dyadic.zero() == 0
    assert Dyadic.one() == 1
    assert Dyadic.pow2(3) == 8
    assert Dyadic.pow2(-3) == Dyadic(1, 3)


def test_arithmetic_golden():
    half = Dyadic(1, 1)
    q = Dyadic(1, 2)
    assert half + q == Dyadic(3, 2)
    assert half - q == q
    assert half * q == Dyadic(1, 3)
    assert (half + half) == 1
    assert -q == Dyadic(-1, 2)
    assert abs(Dyadic(-3, 2)) == Dyadic(3, 2)
    assert q.mul_pow2(2) == 1
    assert q.mul_pow2(-1) == Dyadic(1, 3)
    assert Dyadic(3, 1).half() == Dyadic(3, 2)


def test_int_mixing():
    assert Dyadic(1, 1) + 1 == Dyadic(3, 1)
    assert 1 - Dyadic(1, 2) == Dyadic(3, 2)
    assert 2 * Dyadic(1, 1) == 1
    with pytest.raises(TypeError):
        Dyadic(1, 1) + 0.5  # floats never mix in


def test_comparisons():
    assert Dyadic(1, 2) < Dyadic(1, 1) <= Dyadic(2, 2)
    assert Dyadic(1, 1) >= 0
    assert Dyadic(5, 3) > Dyadic(1, 1)
    assert Dyadic(1, 1) != Dyadic(1, 2)


def test_decimal_rendering():
    assert Dyadic(1, 1).decimal() == "0.5"
    assert Dyadic(3, 2).decimal() == "0.75"
    assert Dyadic(-3, 2).decimal() == "-0.75"
    assert Dyadic(5).decimal() == "5"
    assert Dyadic(1, 4).decimal() == "0.0625"
    assert str(Dyadic(3, 2)) == "3/2^2"
    assert str(Dyadic(3)) == "3"


def test_json_round_trip():
    for d in [Dyadic(0), Dyadic(1), Dyadic(-7, 5), Dyadic(12345, 17)]:
        assert Dyadic.from_json(d.to_json()) == d
    with pytest.raises(ValueError):
        Dyadic.from_json({"num": "4", "exp": 2})  # not canonical
    with pytest.raises(ValueError):
        Dyadic.from_json({"num": "1", "exp": -1})


@given(dyadics, dyadics)
def test_add_matches_fraction(a, b):
    assert frac(a + b) == frac(a) + frac(b)


@given(dyadics, dyadics)
def test_sub_matches_fraction(a, b):
    assert frac(a - b) == frac(a) - frac(b)


@given(dyadics, dyadics)
def test_mul_matches_fraction(a, b):
    assert frac(a * b) == frac(a) * frac(b)


@given(dyadics, dyadics)
def test_ordering_matches_fraction(a, b):
    assert (a < b) == (frac(a) < frac(b))
    assert (a == b) == (frac(a) == frac(b))


@given(dyadics, st.integers(min_value=-30, max_value=30))
def test_mul_pow2_matches_fraction(a, k):
    assert frac(a.mul_pow2(k)) == frac(a) * Fraction(2) ** k


@given(dyadics)
def test_canonical_invariant(a):
    assert a.exp >= 0
    assert a.num % 2 == 1 or (a.num == 0 and a.exp == 0) or a.exp == 0


@given(dyadics)
def test_decimal_is_exact(a):
    assert Fraction(a.decimal()) == frac(a)
