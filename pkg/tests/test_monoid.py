from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gseries import (AmbiguityError, DomainError, GeneratorBasis, Ordering, exp_add,
                     exp_compare, exp_sub, format_exponent, parse_exponent, qsqrt, sqrt_basis)

from conftest import HALF_ROOT2, exponents

B = sqrt_basis(2)
mpmath.mp.dps = 50
ROOT2 = mpmath.sqrt(2)


def test_add_componentwise():
    e = exp_add(B.exponent(1, 0), B.exponent(0, 1))
    assert e.coeffs == (1, 1)
    assert e == B.exponent(1, 1)


def test_add_identity():
    assert exp_add(B.exponent(0, 0), B.exponent(2, 3)) == B.exponent(2, 3)


def test_add_with_negative_components():
    e = exp_add(B.exponent(2, -1), B.exponent(-1, 2))
    assert e.coeffs == (1, 1)
    assert abs(mpmath.mpf(float(e)) - (1 + ROOT2)) < 1e-15


def test_negative_value_rejected():
    with pytest.raises(DomainError):
        B.exponent(1, -1)


def test_sub():
    assert exp_sub(B.exponent(1, 1), B.exponent(0, 1)) == B.exponent(1, 0)
    e = exp_sub(B.exponent(0, 1), B.exponent(1, 0))
    assert e.coeffs == (-1, 1)
    assert abs(float(e) - float(ROOT2 - 1)) < 1e-15


def test_sub_negative_raises():
    with pytest.raises(DomainError):
        exp_sub(B.exponent(1, 0), B.exponent(0, 1))


def test_compare():
    assert exp_compare(B.exponent(2, 0), B.exponent(0, 1)) is Ordering.GREATER
    assert exp_compare(B.exponent(1, 1), B.exponent(1, 1)) is Ordering.EQUAL
    assert exp_compare(B.exponent(0, 1), B.exponent(2, 0)) is Ordering.LESS


def test_rational_generators_canonicalise():
    b = GeneratorBasis([1, Fraction(1, 2)], ["h"])
    assert b.exponent(1, 0) == b.exponent(0, 2)
    assert exp_compare(b.exponent(1, 0), b.exponent(0, 2)) is Ordering.EQUAL


def test_float_basis_collision_raises():
    b = GeneratorBasis([1, 2 ** 0.5, 3 ** 0.5], ["a", "b"])
    assert not b.exact
    close = b.exponent(0, 1, 0)
    assert exp_compare(close, b.exponent(1, 0, 0)) is Ordering.GREATER
    with pytest.raises((AmbiguityError, ValueError)):
        GeneratorBasis([1, 2 ** 0.5, 2 ** 0.5 + 1e-40])


def test_text_round_trip():
    for coeffs in [(0, 0), (1, 0), (0, 1), (3, 2), (-1, 1)]:
        e = B.exponent(*coeffs)
        assert parse_exponent(format_exponent(e), B) == e


@given(exponents(), exponents(), exponents())
def test_add_associative_commutative(a, b, c):
    assert exp_add(a, b) == exp_add(b, a)
    assert exp_add(exp_add(a, b), c) == exp_add(a, exp_add(b, c))


@given(exponents(), exponents())
def test_sub_inverts_add(a, b):
    assert exp_sub(exp_add(a, b), b) == a


@given(st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=2, max_size=12))
def test_compare_total_order_exact(pairs):
    # oracle: the sign of p + q sqrt(2) decided in Q(sqrt 2) by squaring
    def sign(p, q):
        if p >= 0 and q >= 0:
            return int((p, q) != (0, 0))
        if p <= 0 and q <= 0:
            return -1 if (p, q) != (0, 0) else 0
        s = p * p - 2 * q * q
        return (1 if p > 0 else -1) if s > 0 else (1 if q > 0 else -1)

    pairs = [(p, q) for p, q in pairs if sign(p, q) >= 0]
    es = [B.exponent(p, q) for p, q in pairs]
    for (p1, q1), a in zip(pairs, es):
        for (p2, q2), b in zip(pairs, es):
            want = int(sign(p1 - p2, q1 - q2))
            assert int(exp_compare(a, b)) == want


def test_exact_value_of_sqrt_basis():
    assert B.exponent(0, 1).value == qsqrt(2)
    assert HALF_ROOT2.exponent(0, 1, 0).value == Fraction(1, 2)
