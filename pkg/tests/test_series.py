from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from gseries import (INF, DomainError, ElementaryBox, ElementarySet, GeneralizedSeries,
                     box_normalize, format_series, gs_gamma_representation, gs_linear, gs_mul,
                     gs_partial_x, gs_partial_y, gs_reassemble, gs_truncate_gamma,
                     gs_truncate_set, parse_series, qsqrt, sqrt_basis)
from gseries.series import Bound

from conftest import HALF_ROOT2, exponents, parse, series

B2 = sqrt_basis(2)


def p2(text, m=1, n=0, cap=INF):
    return parse_series(text, B2, m, n, cap)


# -- arithmetic ----------------------------------------------------------------
def test_linear_examples():
    assert gs_linear(1, p2("X1^(1)"), 1, p2("X1^(r)")) == p2("X1^(1) + X1^(r)")
    F = parse("X1^(h) + 2*X1^(r)", cap=3)
    assert gs_linear(1, F, -1, F).is_zero()
    assert gs_linear(2, parse("3*X1^(h)"), 0, parse("X1^(r)")) == parse("6*X1^(h)")


def test_mul_examples():
    assert gs_mul(parse("X1^(h)"), parse("X1^(r)")) == parse("X1^(h + r)")
    assert gs_mul(p2("1 + Y1", 0, 1), p2("1 - Y1", 0, 1)) == p2("1 - Y1^2", 0, 1)
    got = gs_mul(p2("1 + X1^(r)", cap=3), p2("1 + X1^(1)", cap=3))
    assert got == p2("1 + X1^(1) + X1^(r) + X1^(1 + r)", cap=3)


def test_cap_is_min_and_terms_above_cap_dropped():
    got = gs_mul(p2("1 + X1^(r)", cap=2), p2("1 + X1^(1)", cap=5))
    assert got.cap == 2
    assert got == p2("1 + X1^(1) + X1^(r)", cap=2)


def test_no_zero_coefficients_stored():
    F = p2("X1^(1) - X1^(1) + 2*X1^(r)")
    assert list(F.terms.values()) == [2]


def test_zero_series_keeps_cap():
    Z = GeneralizedSeries.zero(B2, 1, 0, 4)
    assert Z.is_zero() and Z.cap == 4


# -- truncation ----------------------------------------------------------------
def test_truncate_set_examples():
    F = parse("2*X1^(h) + 3*X1^(3*h)")
    S = ElementarySet.orthant([1])
    assert gs_truncate_set(F, S) == parse("3*X1^(h)")
    assert gs_truncate_set(F, ElementarySet.orthant([0])) == F
    G = parse("1 + X1^(1)*Y1", 1, 1)
    box = ElementaryBox.from_bounds([1, 1], [2, 1])
    assert gs_truncate_set(G, ElementarySet((box,))) == parse("1", 1, 1)


def test_truncate_gamma_examples():
    F = parse("2*X1^(h) + 3*X1^(3*h)")
    assert gs_truncate_gamma(F, [1]) == parse("3*X1^(h)")
    assert gs_truncate_gamma(F, [0]) == F
    assert gs_truncate_gamma(p2("X1^(r)"), [2]).is_zero()


def test_elementary_set_disjointness_checked():
    a = ElementaryBox.from_bounds([0], [2])
    b = ElementaryBox.from_bounds([1], [3])
    with pytest.raises(ValueError):
        ElementarySet((a, b))
    c = ElementaryBox.from_bounds([Bound(2, True)], [3])
    assert ElementarySet((a, c)).contains((Fraction(5, 2),))


# -- gamma representation ------------------------------------------------------
def test_gamma_rep_constant():
    F = parse("5", 2, 0)
    rep = gs_gamma_representation(F, (1, 1))
    zero = HALF_ROOT2.zero()
    assert rep[((0, 1), (zero, zero))] == F


def test_gamma_rep_two_terms():
    F = parse("X1^(h)*X2 + X1^(1)*X2^2", 2, 0)
    rep = gs_gamma_representation(F, (1, 1))
    half = HALF_ROOT2.exponent(0, 1, 0)
    assert rep[((0,), (half,))] == parse("1", 2, 0)
    assert rep[((), ())] == parse("X2^(1)", 2, 0)
    assert gs_reassemble(rep, (1, 1), F) == F


def test_gamma_rep_shifted_component():
    G = parse("3 + X1^(h)*X2^(r)", 2, 0)
    F = gs_mul(parse("X1^(1)*X2^(2)", 2, 0), G)
    rep = gs_gamma_representation(F, (1, 2))
    assert rep[((), ())] == G


# -- derivatives ---------------------------------------------------------------
def test_partial_x_examples():
    assert gs_partial_x(p2("X1^(r)"), 0).terms == {((B2.exponent(0, 1),), ()): qsqrt(2)}
    assert gs_partial_x(p2("7"), 0).is_zero()
    assert gs_partial_x(p2("X1^(1) + 2*X1^(3)"), 0) == p2("X1^(1) + 6*X1^(3)")


def test_partial_y_examples():
    assert gs_partial_y(p2("Y1^3", 0, 1), 0) == p2("3*Y1^2", 0, 1)
    assert gs_partial_y(p2("X1^(r)", 1, 1), 0).is_zero()
    assert gs_partial_y(parse("X1^(h)*Y1^2", 1, 1), 0) == parse("2*X1^(h)*Y1", 1, 1)


# -- box normalisation ---------------------------------------------------------
def test_box_normalize_examples():
    bn = box_normalize([(0,), (1,), (2,)], ElementaryBox.from_bounds([1], [1]))
    assert bn.gamma == (1,) and bn.deltas == ((2,),)
    bn = box_normalize([(0,), (1,), (2,)], ElementaryBox.from_bounds([0]))
    assert bn.gamma == (0,) and bn.deltas == ()
    half, r2 = Fraction(1, 2), qsqrt(2)
    box = ElementaryBox.from_bounds([Bound(1, True)], [2])
    bn = box_normalize([(half,), (r2,)], box)
    assert bn.gamma == (r2,)
    assert bn.deltas in ((), ((None,),))


points = st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), min_size=1, max_size=15,
                  unique=True)
bounds = st.tuples(st.integers(0, 5), st.integers(0, 6), st.booleans(), st.booleans())


@given(points, bounds, bounds)
def test_box_normalize_matches_brute_force(S, bx, by):
    def side(lo, hi, sl, sh):
        lo, hi = min(lo, hi), max(lo, hi)
        return Bound(Fraction(lo, 2), sl), Bound(Fraction(hi, 2), sh)
    (lx, hx), (ly, hy) = side(*bx), side(*by)
    box = ElementaryBox((lx, ly), (hx, hy))
    pts = [(Fraction(a, 2), Fraction(b, 2)) for a, b in S]
    bn = box_normalize(pts, box)
    assert bn.select(pts) == {p for p in pts if box.contains(p)}


# -- properties ----------------------------------------------------------------
@given(series(), series(), series())
def test_ring_axioms(F, G, H):
    assert (F * G) * H == F * (G * H)
    assert F * G == G * F
    assert F * (G + H) == F * G + F * H


@given(series(2, 1), series(2, 1), st.tuples(exponents(), exponents()))
def test_truncation_additive(F, G, gamma):
    assert gs_truncate_gamma(F + G, gamma) == gs_truncate_gamma(F, gamma) + \
        gs_truncate_gamma(G, gamma)


@given(series(2, 1, caps=(INF, 4)), st.tuples(exponents(), exponents()))
def test_gamma_representation_reassembles(F, gamma):
    rep = gs_gamma_representation(F, gamma)
    assert gs_reassemble(rep, gamma, F) == F
    assert rep[((), ())] == gs_truncate_gamma(F, gamma)


@given(series(2, 1, caps=(INF, 4)), series(2, 1, caps=(INF, 4)), st.integers(0, 1))
def test_leibniz(F, G, i):
    lhs = gs_partial_x(F * G, i)
    rhs = gs_partial_x(F, i) * G + F * gs_partial_x(G, i)
    cap = min(lhs.cap, rhs.cap)
    assert lhs.truncate(cap) == rhs.truncate(cap)
    lhs = gs_partial_y(F * G, 0)
    rhs = gs_partial_y(F, 0) * G + F * gs_partial_y(G, 0)
    cap = min(lhs.cap, rhs.cap)
    assert lhs.truncate(cap) == rhs.truncate(cap)


@given(series(2, 1, caps=(INF,)), st.tuples(exponents(), exponents()), st.integers(0, 1))
def test_derivative_of_truncation(F, gamma, i):
    # (d_i F)_gamma = gamma_i F_gamma + d_i (F_gamma), the derivative being the Euler operator
    lhs = gs_truncate_gamma(gs_partial_x(F, i), gamma)
    Fg = gs_truncate_gamma(F, gamma)
    rhs = gamma[i].value * Fg + gs_partial_x(Fg, i)
    assert lhs == rhs


@given(series(2, 2))
def test_text_round_trip(F):
    assert parse_series(format_series(F), HALF_ROOT2, 2, 2, F.cap) == F
