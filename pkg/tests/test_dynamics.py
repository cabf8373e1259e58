import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gseries import DomainError, qsqrt
from gseries.dynamics import (CornerMap, MuPoly, NotHyperbolic, PlanarAnalyticField,
                              PolycycleSpec, QuadraticDomain, ResonantWithinTolerance,
                              SectionPair, SectionsOutsideChart, TransitionMap, analyze_saddle,
                              conjugacy_defect, count_fixed_points, dulac_series,
                              inject_fault, integrate_transition, normal_form, poincare_map,
                              poincare_series, quadratic_domain_contains, verify_asymptotics)

R2 = qsqrt(2)


def linear(lam=R2):
    return analyze_saddle(PlanarAnalyticField({(1, 0): 1}, {(0, 1): -lam}))


def perturbed():
    return analyze_saddle(PlanarAnalyticField({(1, 0): 1}, {(0, 1): -R2, (2, 0): 1}))


def generic():
    return analyze_saddle(PlanarAnalyticField({(1, 0): 1, (0, 2): 1, (1, 1): -1},
                                              {(0, 1): -R2, (2, 0): 1, (1, 1): 1}))


# -- saddle analysis -----------------------------------------------------------
def test_analyze_examples():
    s = linear()
    assert s.ratio == R2 and s.diagonal
    with pytest.raises(ResonantWithinTolerance) as err:
        analyze_saddle(PlanarAnalyticField({(1, 0): 2, (0, 1): 1}, {(0, 1): -1}))
    assert (err.value.p, err.value.q) == (1, 2)
    with pytest.raises(NotHyperbolic):
        analyze_saddle(PlanarAnalyticField({(2, 0): 1}, {(0, 1): -1}))


def test_float_ratio_near_rational_is_resonant():
    with pytest.raises(ResonantWithinTolerance):
        analyze_saddle(PlanarAnalyticField({(1, 0): 1.0}, {(0, 1): -(1 / 3 + 1e-11)}))


def test_origin_must_be_singular():
    with pytest.raises(DomainError):
        PlanarAnalyticField({(0, 0): 1, (1, 0): 1}, {(0, 1): -1})


def test_certified_order():
    assert linear().certified_order(2) == 4
    half = analyze_saddle(PlanarAnalyticField({(1, 0): 1}, {(0, 1): -R2 / 2}))
    assert half.certified_order(2) == 2 + R2


def test_quadratic_domain():
    W = QuadraticDomain(1, 1)
    assert quadratic_domain_contains(W, 0.5, 0)
    assert not W.contains(0.5, 4)
    assert not W.contains(1.0, 0)


# -- normal form ---------------------------------------------------------------
def test_linear_field_normal_form_is_identity():
    nf = normal_form(linear(), 3)
    assert nf.is_identity()
    assert not nf.remainder_u and not nf.remainder_v


def test_elimination_coefficient():
    nf = normal_form(perturbed(), 1)
    U, V = nf.at()
    assert U == {(1, 0): 1}
    assert V == {(0, 1): 1, (2, 0): -1 / (2 + R2)}
    assert V[(2, 0)] == -1 + R2 / 2


def test_normal_form_orders_are_stable():
    a = normal_form(generic(), 2).at()
    b = normal_form(generic(), 3).at()
    for W, Wb in zip(a, b):
        assert {k: c for k, c in Wb.items() if sum(k) <= 4} == W


@settings(max_examples=30)
@given(st.floats(0, 2 * math.pi))
def test_conjugacy_defect_is_high_order(angle):
    # N = 3 linearises through degree 6, so the defect scales like r^7
    nf = normal_form(generic(), 3)
    a, b = math.cos(angle), math.sin(angle)
    big = conjugacy_defect(nf, 2e-2 * a, 2e-2 * b)
    small = conjugacy_defect(nf, 1e-2 * a, 1e-2 * b)
    for d_big, d_small in zip(big, small):
        assert abs(d_big) <= 1e3 * 2e-2 ** 7
        if abs(d_big) > 1e-12:
            assert 2 ** 6.5 <= abs(d_big / d_small) <= 2 ** 7.5


# -- transition maps -----------------------------------------------------------
def test_linear_transition_closed_form():
    s = linear()
    for t in (0.1, 0.05, 0.01):
        got = integrate_transition(s, SectionPair(), t, tol=1e-10)
        assert abs(got - t ** math.sqrt(2)) <= 1e-6 * t ** math.sqrt(2)
    assert integrate_transition(s, SectionPair(), 0.1, tol=1e-12) == \
        pytest.approx(0.1 ** math.sqrt(2), rel=1e-9)


def test_transition_boundary_and_domain():
    tm = TransitionMap(linear(), SectionPair(eps=0.5))
    assert tm(0.0) == 0.0 and tm(-1.0) == 0.0
    with pytest.raises(DomainError):
        tm(0.6)


def test_perturbed_transition_exact():
    # x' = x, y' = -r y + x^2 solves in closed form: y e^{r s} - x^2/(2+r) is constant
    s = perturbed()
    tm = TransitionMap(s, SectionPair(), tol=1e-12)
    r = math.sqrt(2)
    k = 1 / (2 + r)
    for t in (0.01, 0.1, 0.3):
        y_end = (1 - k * t * t) * t ** r + k
        assert tm(t) + tm.y_star == pytest.approx(y_end, rel=1e-11)
        assert tm.reverse(tm(t)) == pytest.approx(t, rel=1e-10)


def test_transition_monotone_on_grid():
    tm = TransitionMap(generic(), SectionPair(0.2, 0.2, 0.12))
    grid = np.geomspace(1e-3, 0.11, 60)
    values = np.array([tm(t) for t in grid])
    assert np.all(np.diff(values) > 0)


def test_transition_semigroup():
    tm = TransitionMap(generic(), SectionPair(0.2, 0.2, 0.12), tol=1e-12)
    for t in (1e-3, 1e-2, 0.1):
        x = tm.x_star + t
        direct = tm.between(x, 0.2, 0.2)
        mid = tm.between(x, 0.2, 0.1)
        assert abs(tm.between(0.1, mid, 0.2) - direct) <= 10 * tm.tol * max(1, abs(direct))


# -- Dulac series --------------------------------------------------------------
def test_dulac_linear():
    e = dulac_series(linear(), 2, SectionPair())
    assert [(float(a), c) for a, c in e.terms()] == [(float(R2), 1)]
    e = dulac_series(linear(), 2, SectionPair(x0=0.5))
    assert len(e.terms()) == 1
    assert float(e.leading()[1]) == pytest.approx(2 ** math.sqrt(2), rel=1e-14)


def test_dulac_perturbed_exact_terms():
    e = dulac_series(perturbed(), 2, SectionPair())
    assert [c for _, c in e.terms()] == [1, -1 + R2 / 2]
    assert [a.value for a, _ in e.terms()] == [R2, 2 + R2]


def test_dulac_rejects_uncertified_nu():
    with pytest.raises(DomainError):
        dulac_series(perturbed(), 1, SectionPair(), nu=3)


def test_dulac_chart_check():
    with pytest.raises(SectionsOutsideChart):
        dulac_series(generic(), 2, SectionPair(1, 1, 0.5))


def test_verify_linear_is_at_noise_floor():
    s = linear()
    rep = verify_asymptotics(s, dulac_series(s, 2, SectionPair()), float(R2))
    assert rep.passed and rep.noise_floor


def test_verify_detects_dropped_term():
    s = perturbed()
    e = dulac_series(s, 2, SectionPair())
    rep = verify_asymptotics(s, e, 3)
    assert rep.passed and rep.slope >= 3.25
    cut = verify_asymptotics(s, e, float(R2))
    assert cut.slope == pytest.approx(2 + math.sqrt(2), abs=0.15)


@pytest.mark.parametrize("beta", [2, R2, 1 + R2])
def test_fault_injection_localises(beta):
    s = perturbed()
    e = dulac_series(s, 2, SectionPair())
    bad = inject_fault(e, beta, 0.5)
    rep = verify_asymptotics(s, bad, 3)
    assert not rep.passed
    assert rep.slope == pytest.approx(float(beta), abs=0.15)


def test_generic_saddle_verifies():
    s = generic()
    sec = SectionPair(0.2, 0.2, 0.12)
    e = dulac_series(s, 2, sec)
    assert verify_asymptotics(s, e, 3, sections=sec).passed


def test_short_chart_is_rejected():
    with pytest.raises(SectionsOutsideChart):
        dulac_series(generic(), 2, SectionPair(0.3, 0.3, 0.15), chart_degree=16)


def test_parameter_consistency():
    mu1 = MuPoly.var(0, 1)
    fam = analyze_saddle(PlanarAnalyticField(
        {(1, 0): 1}, {(0, 1): -R2, (2, 0): 1 + mu1, (1, 1): mu1}, p=1))
    sec = SectionPair(0.2, 0.2, 0.12)
    for mu in (0.1, -0.2):
        fixed = analyze_saddle(PlanarAnalyticField(
            {(1, 0): 1}, {(0, 1): -R2, (2, 0): 1 + mu, (1, 1): mu}))
        a = dulac_series(fam, 2, sec, (mu,))
        b = dulac_series(fixed, 2, sec)
        ta, tb = a.certified_terms(), b.certified_terms()
        assert [float(x) for x, _ in ta] == [float(x) for x, _ in tb]
        for (_, ca), (_, cb) in zip(ta, tb):
            assert float(ca) == pytest.approx(float(cb), rel=1e-10, abs=1e-12)


# -- polycycles ----------------------------------------------------------------
def one_vertex():
    return PolycycleSpec([(linear(), SectionPair(eps=0.95))], [CornerMap((2,))])


def test_corner_map():
    f = CornerMap((2, 1), radius=1.0, bound=3.0)
    assert f(0.0) == 0.0 and f(0.5) == pytest.approx(1.25)
    assert f.tail_bound(0.5) == pytest.approx(3 * 0.5 ** 3 / 0.5)
    with pytest.raises(DomainError):
        CornerMap((-1,))
    with pytest.raises(DomainError):
        f(1.5)


def test_poincare_one_vertex():
    poly = one_vertex()
    assert poincare_map(poly, 0.0) == 0.0
    assert poincare_map(poly, 0.1) == pytest.approx(2 * 0.1 ** math.sqrt(2), rel=1e-9)
    S = poincare_series(poly, 3)
    assert [(e, c) for (e,), c in ((k[0], v) for k, v in S.terms.items())] == \
        [(S.basis.from_value(R2), 2)]


def test_poincare_identity_product():
    k = 1 / math.sqrt(2)
    poly = PolycycleSpec([(linear(), SectionPair(eps=0.95)), (linear(R2 / 2), SectionPair())],
                         [CornerMap.identity(), CornerMap.identity()])
    S = poincare_series(poly, 2)
    (lead,), c = S.sorted_terms()[0][0][0], S.sorted_terms()[0][1]
    assert lead.value == 1 and c == 1
    assert poincare_map(poly, 0.2) == pytest.approx(0.2, rel=1e-8)
    assert k > 0


def test_fixed_points():
    t_star = 2 ** (1 / (1 - math.sqrt(2)))
    rep = count_fixed_points(lambda t: 2 * t ** math.sqrt(2), (0.01, 0.9))
    assert rep.count == 1
    (a, b), = rep.brackets
    assert a <= t_star <= b
    assert rep.roots[0] == pytest.approx(t_star, rel=1e-10)
    rep = count_fixed_points(lambda t: t, (0.01, 0.9))
    assert rep.count == 0 and rep.all_indeterminate
    assert count_fixed_points(lambda t: t ** math.sqrt(2), (0.01, 0.9)).count == 0
