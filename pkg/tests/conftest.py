from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from gseries import INF, GeneralizedSeries, GeneratorBasis, qsqrt, sqrt_basis

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SQRT2 = qsqrt(2)
HALF_ROOT2 = GeneratorBasis([1, Fraction(1, 2), SQRT2], ["h", "r"])


@pytest.fixture
def basis():
    return HALF_ROOT2


@pytest.fixture
def root2():
    return sqrt_basis(2)


coefficients = st.one_of(
    st.integers(-4, 4).filter(bool),
    st.fractions(min_value=-3, max_value=3, max_denominator=4).filter(bool),
)


@st.composite
def exponents(draw, basis=HALF_ROOT2, max_half=4, max_root=2):
    return basis.exponent(0, draw(st.integers(0, max_half)), draw(st.integers(0, max_root)))


@st.composite
def series(draw, m=1, n=0, basis=HALF_ROOT2, max_terms=5, caps=(3, 4, Fraction(7, 2)),
           max_ydeg=2, constant=None):
    cap = draw(st.sampled_from(list(caps)))
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        key = (tuple(draw(exponents(basis)) for _ in range(m)),
               tuple(draw(st.integers(0, max_ydeg)) for _ in range(n)))
        terms[key] = draw(coefficients)
    F = GeneralizedSeries(basis, m, n, terms, cap)
    if constant is not None:
        F = F + GeneralizedSeries.constant(constant, basis, m, n, cap)
    return F


def parse(text, m=1, n=0, cap=INF, basis=HALF_ROOT2):
    from gseries import parse_series
    return parse_series(text, basis, m, n, cap)
