"""Helpers for the coefficient ring.

Coefficients are duck-typed: ``int``/``Fraction`` and
:class:`~gseries.quadratic.QuadIrrational` keep results exact, ``float``
is used once an irrational power or root forces it.  Anything else with
ring operators (e.g. parameter polynomials) works for the ring operations
that do not divide.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath

from .quadratic import QuadIrrational, is_exact


def is_zero(c) -> bool:
    return c == 0


def magnitude(c) -> float:
    if hasattr(c, "magnitude"):
        return c.magnitude()
    return abs(float(c))


def to_float(v) -> float:
    return float(v)


def scale_by_value(c, v):
    """``c * v`` where ``v`` is an exponent value (exact or mpf)."""
    if isinstance(c, float) or not is_exact(v):
        if is_exact(c) or isinstance(c, float):
            return float(c) * float(v)
        return c * float(v)
    return c * v


def reciprocal(c):
    if isinstance(c, int):
        c = Fraction(c)
    if c == 0:
        raise ZeroDivisionError("reciprocal of zero coefficient")
    return 1 / c


def _int_root(n: int, k: int) -> int | None:
    if n < 0:
        return None
    r = int(round(n ** (1.0 / k))) if n < 2 ** 1000 else int(mpmath.root(n, k))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** k == n:
            return cand
    return None


def real_power(base, e):
    """``base ** e`` for a positive coefficient and a real exponent value.

    Stays exact when the result is rational/quadratic (integer ``e``,
    ``base == 1``, or a rational base that is a perfect power).
    """
    if is_exact(e):
        if isinstance(e, Fraction) or isinstance(e, int):
            e = Fraction(e)
            if e.denominator == 1:
                if is_exact(base):
                    return Fraction(base) ** int(e) if not isinstance(base, QuadIrrational) \
                        else base ** int(e)
                return base ** int(e)
            if is_exact(base) and not isinstance(base, QuadIrrational):
                b = Fraction(base)
                if b == 1:
                    return Fraction(1)
                if b > 0:
                    num = _int_root(b.numerator, e.denominator)
                    den = _int_root(b.denominator, e.denominator)
                    if num is not None and den is not None:
                        return Fraction(num, den) ** e.numerator
        elif base == 1:
            return Fraction(1)
    if base == 1:
        return Fraction(1)
    fb = float(base)
    if fb <= 0:
        raise ValueError(f"real power of non-positive base {base}")
    return fb ** float(e)


def binomial(e, p: int):
    """Generalised binomial coefficient ``C(e, p)`` for real ``e``."""
    if not is_exact(e):
        e = float(e)
    out = Fraction(1) if is_exact(e) else 1.0
    for k in range(p):
        out = out * (e - k) / (k + 1)
    return out
