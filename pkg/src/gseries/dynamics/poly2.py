"""Bivariate polynomials ``{(i, j): coeff}`` in ``(x, y)``."""

from __future__ import annotations

from .. import coeffs as C


def add(a: dict, b: dict, scale=1) -> dict:
    out = dict(a)
    for k, c in b.items():
        v = out.get(k, 0) + (c if scale == 1 else c * scale)
        if C.is_zero(v):
            out.pop(k, None)
        else:
            out[k] = v
    return out


def mul(a: dict, b: dict, max_degree: int | None = None) -> dict:
    out: dict = {}
    for (i, j), ca in a.items():
        for (k, l), cb in b.items():
            if max_degree is not None and i + j + k + l > max_degree:
                continue
            key = (i + k, j + l)
            out[key] = out.get(key, 0) + ca * cb
    return {k: c for k, c in out.items() if not C.is_zero(c)}


def dx(a: dict) -> dict:
    return {(i - 1, j): c * i for (i, j), c in a.items() if i}


def dy(a: dict) -> dict:
    return {(i, j - 1): c * j for (i, j), c in a.items() if j}


def degree_part(a: dict, d: int) -> dict:
    return {k: c for k, c in a.items() if sum(k) == d}


def truncate(a: dict, d: int) -> dict:
    return {k: c for k, c in a.items() if sum(k) <= d}


def evaluate(a: dict, x: float, y: float) -> float:
    # Horner in y inside Horner in x would need dense storage; direct sum is fine here
    total = 0.0
    for (i, j), c in a.items():
        total += float(c) * x ** i * y ** j
    return total


def map_coeffs(a: dict, fn) -> dict:
    out = {k: fn(c) for k, c in a.items()}
    return {k: c for k, c in out.items() if not C.is_zero(c)}


def min_degree(a: dict) -> int | None:
    return min((sum(k) for k in a), default=None)


def univariate_in_x(a: dict, y) -> dict:
    """Coefficients in ``x`` after fixing ``y``."""
    out: dict = {}
    for (i, j), c in a.items():
        v = c * (y ** j if j else 1)
        out[i] = out.get(i, 0) + v
    return out


def univariate_in_y(a: dict, x) -> dict:
    out: dict = {}
    for (i, j), c in a.items():
        v = c * (x ** i if i else 1)
        out[j] = out.get(j, 0) + v
    return out


def translate(coeffs: dict, shift) -> dict:
    """``p(shift + t)`` for a univariate ``{power: coeff}``."""
    from math import comb
    out: dict = {}
    for k, c in coeffs.items():
        for q in range(k + 1):
            v = c * comb(k, q) * (shift ** (k - q) if k - q else 1)
            out[q] = out.get(q, 0) + v
    return {k: c for k, c in out.items() if not C.is_zero(c)}
