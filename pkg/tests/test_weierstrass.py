import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from gseries import (INF, GeneralizedSeries, NotRegular, NotSymmetric, SingularJacobian,
                     elementary_substitutes, gs_compose, implicit_solve,
                     implicit_solve_lagrange, implicit_solve_system, regular_order,
                     symmetric_reduce, w_divide, w_prepare)
from gseries.weierstrass import _substitute_last

from conftest import HALF_ROOT2, coefficients, exponents, parse


def vanishes_to(D, cap):
    return D.truncate(cap).is_zero()


@st.composite
def regular_series(draw, m=1, n=1, max_d=3, cap=6):
    """``c Y_n^d`` plus higher ``Y_n`` powers plus terms of positive (X, Y') order."""
    d = draw(st.integers(1, max_d))
    zero = HALF_ROOT2.zero()
    terms = {((zero,) * m, (0,) * (n - 1) + (d,)): draw(coefficients)}
    for k in range(d + 1, d + 3):
        if draw(st.booleans()):
            terms[((zero,) * m, (0,) * (n - 1) + (k,))] = draw(coefficients)
    for _ in range(draw(st.integers(1, 5))):
        xe = tuple(draw(exponents()) for _ in range(m))
        ye = tuple(draw(st.integers(0, 2)) for _ in range(n))
        if not any(any(e.coeffs) for e in xe) and not any(ye[:-1]):
            continue
        terms[(xe, ye)] = draw(coefficients)
    F = GeneralizedSeries(HALF_ROOT2, m, n, terms, cap)
    assume(regular_order(F).order == d)
    return F


shapes = st.sampled_from([(1, 1), (2, 1), (1, 2), (2, 2), (0, 2)])


# -- regularity ----------------------------------------------------------------
def test_regular_order_examples():
    r = regular_order(parse("Y1^2 - X1^(1)", 1, 1))
    assert (r.order, r.coefficient) == (2, 1)
    assert regular_order(parse("X1^(r)", 1, 1)).order is None
    r = regular_order(parse("3*Y1 + X1^(1)*Y1^2", 1, 1))
    assert (r.order, r.coefficient) == (1, 3)


# -- division ------------------------------------------------------------------
def test_divide_examples():
    q, r = w_divide(parse("Y1^2", 1, 1, 4), parse("Y1", 1, 1, 4), 1)
    assert q == parse("Y1", 1, 1, 4) and r.is_zero()
    q, r = w_divide(parse("1", 1, 1, 4), parse("Y1 - X1^(h)", 1, 1, 4), 1)
    assert q.is_zero() and r == parse("1", 1, 1, 4)
    q, r = w_divide(parse("Y1^2", 1, 1, 4), parse("Y1 - X1^(h)", 1, 1, 4), 1)
    assert q == parse("Y1 + X1^(h)", 1, 1, 4)
    assert r == parse("X1^(1)", 1, 1, 4)


def test_divide_rejects_wrong_order():
    with pytest.raises(NotRegular):
        w_divide(parse("Y1", 1, 1, 4), parse("Y1^2 - X1^(1)", 1, 1, 4), 1)


@given(shapes.flatmap(lambda s: st.tuples(regular_series(*s), st.just(s))), st.data())
def test_divide_residual_and_schedules(fs, data):
    f, (m, n) = fs
    d = regular_order(f).order
    terms = {}
    for _ in range(data.draw(st.integers(0, 5))):
        key = (tuple(data.draw(exponents()) for _ in range(m)),
               tuple(data.draw(st.integers(0, 4)) for _ in range(n)))
        terms[key] = data.draw(coefficients)
    g = GeneralizedSeries(HALF_ROOT2, m, n, terms, 6)
    q, r = w_divide(g, f)
    assert max((ye[-1] for (_, ye) in r.terms), default=0) < d
    assert vanishes_to(g - q * f - r, 6)
    q2, r2 = w_divide(g, f, schedule="term")
    assert q2 == q and r2 == r


# -- preparation ---------------------------------------------------------------
def test_prepare_examples():
    u, w = w_prepare(parse("Y1^2 - X1^(1)", 1, 1, 4))
    assert u == parse("1", 1, 1, u.cap) and w == parse("Y1^2 - X1^(1)", 1, 1, w.cap)
    f = parse("Y1^2 + X1^(3*h) + X1^(1)*Y1^2 + X1^(5*h)", 1, 1, 5)
    u, w = w_prepare(f)
    assert u == parse("1 + X1^(1)", 1, 1, u.cap)
    assert w == parse("Y1^2 + X1^(3*h)", 1, 1, w.cap)
    u, w = w_prepare(parse("2*Y1 + Y1^2", 1, 1, 4))
    assert u == parse("2 + Y1", 1, 1, u.cap) and w == parse("Y1", 1, 1, w.cap)


def test_prepare_non_regular():
    with pytest.raises(NotRegular, match="regular_order = none"):
        w_prepare(parse("X1^(r)*Y1", 1, 1, 4))


@given(shapes.flatmap(lambda s: regular_series(*s)))
def test_prepare_properties(f):
    d = regular_order(f).order
    u, w = w_prepare(f)
    assert u.constant_term() != 0
    assert vanishes_to(f - u * w, 6)
    ydeg = [ye[-1] for (_, ye) in w.terms]
    assert max(ydeg) == d
    lead = [(k, c) for k, c in w.terms.items() if k[1][-1] == d]
    assert lead == [((tuple(HALF_ROOT2.zero() for _ in range(f.m)),
                      (0,) * (f.n - 1) + (d,)), 1)]
    for (xe, ye), c in w.terms.items():
        if ye[-1] < d:
            assert any(any(e.coeffs) for e in xe) or any(ye[:-1])


# -- implicit functions --------------------------------------------------------
def test_implicit_examples():
    assert implicit_solve(parse("Y1 - X1^(r)", 1, 1, 5)) == parse("X1^(r)", 1, 0, 5)
    h = implicit_solve(parse("Y1 - X1^(1) - Y1^2", 1, 1, 6))
    catalan = [1, 1, 2, 5, 14, 42]
    for k, c in enumerate(catalan, start=1):
        assert h.coefficient((HALF_ROOT2.exponent(k, 0, 0),)) == c
    h = implicit_solve(parse("Y1 + X1^(1) + X1^(1)*Y1", 1, 1, 5))
    assert h == parse("-X1^(1) + X1^(2) - X1^(3) + X1^(4) - X1^(5)", 1, 0, h.cap)


def test_implicit_singular_jacobian():
    with pytest.raises(SingularJacobian):
        implicit_solve(parse("Y1^2 - X1^(1)", 1, 1, 4))


def test_implicit_system_examples():
    f1 = parse("Y1 - X1^(1)", 1, 2, 6)
    f2 = parse("Y2 - X1^(2)", 1, 2, 6)
    h = implicit_solve_system([f1, f2])
    assert h[0] == parse("X1^(1)", 1, 0, h[0].cap)
    assert h[1] == parse("X1^(2)", 1, 0, h[1].cap)
    f1 = parse("Y1 - X1^(1) - Y2^2", 1, 2, 6)
    h = implicit_solve_system([f1, f2])
    assert h[0] == parse("X1^(1) + X1^(4)", 1, 0, h[0].cap)
    assert h[1] == parse("X1^(2)", 1, 0, h[1].cap)


@st.composite
def implicit_instances(draw):
    terms = {((HALF_ROOT2.zero(),), (1,)): draw(coefficients)}
    for _ in range(draw(st.integers(1, 5))):
        xe = (draw(exponents()),)
        ye = (draw(st.integers(0, 3)),)
        if ye[0] <= 1 and not any(xe[0].coeffs):
            continue
        terms[(xe, ye)] = draw(coefficients)
    return GeneralizedSeries(HALF_ROOT2, 1, 1, terms, draw(st.sampled_from([3, 4])))


@given(implicit_instances())
def test_newton_matches_lagrange(f):
    h = implicit_solve(f)
    assert h == implicit_solve_lagrange(f)
    assert vanishes_to(_substitute_last(f, h), h.cap)
    assert implicit_solve(f, schedule="linear") == h


# -- symmetric reduction -------------------------------------------------------
def test_symmetric_examples():
    # with l = n, the result's analytic variables are sigma_1 .. sigma_l
    assert symmetric_reduce(parse("Y1*Y2", 0, 2, 4), 2) == parse("Y2", 0, 2, 4)
    assert symmetric_reduce(parse("Y1^2 + Y2^2", 0, 2, 4), 2) == parse("Y1^2 - 2*Y2", 0, 2, 4)
    got = symmetric_reduce(parse("X1^(r)*Y1 + X1^(r)*Y2", 1, 2, 4), 2)
    assert got == parse("X1^(r)*Y1", 1, 2, 4)


def test_symmetric_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        symmetric_reduce(parse("Y1 + 2*Y2", 0, 2, 4), 2)


@st.composite
def symmetric_series(draw, l=3):
    import itertools
    terms = {}
    for _ in range(draw(st.integers(1, 4))):
        xe = (draw(exponents()),)
        ze = tuple(draw(st.integers(0, 2)) for _ in range(l))
        c = draw(coefficients)
        for perm in set(itertools.permutations(ze)):
            terms[(xe, perm)] = c
    return GeneralizedSeries(HALF_ROOT2, 1, l, terms, INF)


@given(symmetric_series())
def test_symmetric_reduce_resubstitutes(f):
    g = symmetric_reduce(f, 3)
    sig = elementary_substitutes(HALF_ROOT2, 1, 3, 3)
    assert gs_compose(g, sig) == f
