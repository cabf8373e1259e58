"""Text and JSON forms for numbers, exponents and series.

Series print as ``coeff*X1^(expr)*Y1^k`` terms joined by ``+``/``-``,
with exponents in the monoid text form.  ``parse_series`` accepts that
output plus a few conveniences: ``X``/``Y`` for ``X1``/``Y1``, bare
exponents (``X^r``, ``X^1/2``) and products of several coefficients.
"""

from __future__ import annotations

import json
import math
import re
from fractions import Fraction

import mpmath

from .monoid import (DomainError, GeneratorBasis, MonoidExponent, format_exponent,
                     parse_exponent)
from .quadratic import QuadIrrational, format_exact, is_exact, qsqrt
from .series import INF, GeneralizedSeries

_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_RATIONAL = re.compile(r"^[+-]?\d+/\d+$")


def format_number(x) -> str:
    if x == INF:
        return "inf"
    if isinstance(x, int):
        return str(x)
    if is_exact(x):
        return format_exact(x)
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, 40)
    if hasattr(x, "to_text"):
        return x.to_text()
    return repr(float(x))


def parse_number(text: str):
    """Exact where possible: ints, ``a/b``, ``k*sqrt(d)``, ``(a+b*sqrt(d))``."""
    s = text.strip()
    if not s:
        raise ValueError("empty number")
    if s in ("inf", "+inf", "oo"):
        return INF
    if re.fullmatch(r"[+-]?\d+", s):
        return int(s)
    if _RATIONAL.match(s):
        return Fraction(s)
    if _NUMBER.match(s):
        return float(s)
    return _parse_symbolic(s)


def _parse_symbolic(s: str):
    import sympy

    try:
        expr = sympy.sympify(s.replace("^", "**"), rational=True)
    except (sympy.SympifyError, SyntaxError, TypeError) as err:
        raise ValueError(f"cannot parse number {s!r}") from err
    return sympy_to_number(expr, s)


def sympy_to_number(expr, label=None):
    import sympy

    if expr.free_symbols:
        raise ValueError(f"number {label or expr} contains symbols")
    expr = sympy.nsimplify(expr) if expr.has(sympy.Float) else sympy.radsimp(expr)
    if expr.is_Rational:
        r = Fraction(int(expr.p), int(expr.q))
        return int(r) if r.denominator == 1 else r
    a, b, d = _quadratic_parts(expr)
    if d is not None:
        return a + b * qsqrt(d) if b else a
    val = float(expr.evalf(30))
    if math.isnan(val):
        raise ValueError(f"number {label or expr} is not real")
    return val


def _quadratic_parts(expr):
    import sympy

    expr = sympy.expand(expr)
    a = Fraction(0)
    b = Fraction(0)
    d = None
    for term in sympy.Add.make_args(expr):
        if term.is_Rational:
            a += Fraction(int(term.p), int(term.q))
            continue
        coeff, rest = term.as_coeff_Mul()
        if not coeff.is_Rational:
            return None, None, None
        if rest.is_Pow and rest.exp == sympy.Rational(1, 2) and rest.base.is_Integer:
            rad = int(rest.base)
        else:
            return None, None, None
        if d is not None and rad != d:
            return None, None, None
        d = rad
        b += Fraction(int(coeff.p), int(coeff.q))
    return a, b, d


# ---------------------------------------------------------------------------
# series text


def _format_term(key, c) -> tuple[str, bool]:
    xe, ye = key
    factors = []
    for i, e in enumerate(xe):
        if any(e.coeffs):
            factors.append(f"X{i + 1}^({format_exponent(e)})")
    for j, b in enumerate(ye):
        if b == 1:
            factors.append(f"Y{j + 1}")
        elif b:
            factors.append(f"Y{j + 1}^{b}")
    negative = False
    cs = format_number(c)
    if cs.startswith("-"):
        negative = True
        cs = cs[1:]
    if not factors:
        return cs, negative
    if cs == "1":
        return "*".join(factors), negative
    return cs + "*" + "*".join(factors), negative


def format_series(F: GeneralizedSeries) -> str:
    if F.is_zero():
        return "0"
    out = []
    for key, c in F.sorted_terms():
        body, neg = _format_term(key, c)
        if not out:
            out.append("-" + body if neg else body)
        else:
            out.append(("- " if neg else "+ ") + body)
    return " ".join(out)


def _split_top(s: str, seps: str) -> list[tuple[str, str]]:
    """Split at top-level separator characters, keeping the sign/separator."""
    parts = []
    depth = 0
    cur = ""
    lead = ""
    prev = ""
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValueError(f"unbalanced parentheses in {s!r}")
        if depth == 0 and ch in seps:
            binary = cur.strip() != "" and prev not in "*^/" and \
                not (prev in "eE" and re.search(r"\d[eE]$", cur.strip()))
            if ch in "+-" and not binary:
                cur += ch
                prev = ch
                continue
            parts.append((lead, cur.strip()))
            lead = ch
            cur = ""
            prev = ch
            continue
        cur += ch
        if not ch.isspace():
            prev = ch
    if depth:
        raise ValueError(f"unbalanced parentheses in {s!r}")
    parts.append((lead, cur.strip()))
    return parts


_VAR = re.compile(r"^([XY])(\d*)(?:\^(.+))?$")


def _parse_exponent_text(text: str, basis: GeneratorBasis) -> MonoidExponent:
    t = text.strip()
    if t.startswith("(") and t.endswith(")"):
        t = t[1:-1]
    try:
        return parse_exponent(t, basis)
    except (ValueError, KeyError):
        pass
    return basis.from_value(parse_number(t))


def parse_series(text: str, basis: GeneratorBasis, m: int, n: int, cap=INF) -> GeneralizedSeries:
    s = text.strip()
    if s in ("", "0"):
        return GeneralizedSeries.zero(basis, m, n, cap)
    terms: dict = {}
    for lead, body in _split_top(s, "+-"):
        if not body:
            raise ValueError(f"empty term in {text!r}")
        sign = -1 if lead == "-" else 1
        coeff = sign
        if body.startswith("-"):
            coeff = -coeff
            body = body[1:].strip()
        elif body.startswith("+"):
            body = body[1:].strip()
        x = [basis.zero()] * m
        y = [0] * n
        for _, factor in _split_top(body, "*"):
            mt = _VAR.match(factor)
            if mt:
                kind, idx, exp = mt.groups()
                i = int(idx) - 1 if idx else 0
                if kind == "X":
                    if not 0 <= i < m:
                        raise ValueError(f"variable {factor!r} outside X1..X{m}")
                    e = _parse_exponent_text(exp, basis) if exp else basis.exponent(1)
                    x[i] = x[i] + e
                else:
                    if not 0 <= i < n:
                        raise ValueError(f"variable {factor!r} outside Y1..Y{n}")
                    y[i] += int(exp.strip("()")) if exp else 1
            else:
                coeff = coeff * parse_number(factor)
        key = (tuple(x), tuple(y))
        terms[key] = terms.get(key, 0) + coeff
    return GeneralizedSeries(basis, m, n, terms, cap)


# ---------------------------------------------------------------------------
# structured form


def basis_to_dict(basis: GeneratorBasis) -> dict:
    return {"generators": [format_number(g) for g in basis.generators],
            "names": list(basis.names), "precision": basis.precision}


def basis_from_dict(d: dict) -> GeneratorBasis:
    prec = d.get("precision", 200)
    ctx = mpmath.MPContext()
    ctx.prec = prec
    gens = []
    for g in d["generators"]:
        v = parse_number(g)
        # decimal text keeps its full precision
        gens.append(ctx.mpf(g) if isinstance(v, float) else v)
    return GeneratorBasis(gens, d.get("names"), precision=prec)


def series_to_dict(F: GeneralizedSeries) -> dict:
    return {
        "basis": basis_to_dict(F.basis),
        "m": F.m,
        "n": F.n,
        "cap": format_number(F.cap),
        "terms": [[[list(e.coeffs) for e in xe], list(ye), format_number(c)]
                  for (xe, ye), c in F.sorted_terms()],
    }


def series_from_dict(d: dict, basis: GeneratorBasis | None = None) -> GeneralizedSeries:
    basis = basis or basis_from_dict(d["basis"])
    terms = {}
    for xs, ys, c in d["terms"]:
        key = (tuple(basis.exponent(*v) for v in xs), tuple(ys))
        terms[key] = parse_number(c)
    cap = parse_number(d["cap"])
    if isinstance(cap, str):
        cap = float(cap)
    return GeneralizedSeries(basis, d["m"], d["n"], terms, cap)


def dumps_series(F: GeneralizedSeries) -> str:
    return json.dumps(series_to_dict(F), indent=2)


def loads_series(text: str) -> GeneralizedSeries:
    return series_from_dict(json.loads(text))


__all__ = ["format_number", "parse_number", "format_series", "parse_series",
           "series_to_dict", "series_from_dict", "dumps_series", "loads_series",
           "basis_to_dict", "basis_from_dict", "DomainError"]
