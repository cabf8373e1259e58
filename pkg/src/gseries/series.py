"""Truncated generalized power series in mixed variables.

A :class:`GeneralizedSeries` has ``m`` generalized variables ``X1..Xm``
(exponents in a :class:`~gseries.monoid.GeneratorBasis` monoid) and ``n``
analytic variables ``Y1..Yn`` (natural exponents).  Every series carries a
``cap``: terms of total degree above the cap are not stored and are
semantically unknown, so a series is an element of the quotient ring modulo
the ideal of terms of degree ``> cap``.  ``cap = inf`` means the stored
terms are the whole series (a polynomial).

Variable indices in the Python API are 0-based; the text form uses 1-based
names ``X1``, ``Y1``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

from . import coeffs as C
from .monoid import (BasisMismatch, DomainError, GeneratorBasis, MonoidExponent,
                     exp_add, exp_sub, real_cmp, real_min)
from .quadratic import is_exact

INF = math.inf


@lru_cache(maxsize=200_000)
def _xdegree(xexp: tuple) -> object:
    total = 0
    for e in xexp:
        if any(e.coeffs):
            total = total + e.value
    return total


def key_degree(key):
    xe, ye = key
    d = _xdegree(xe)
    s = sum(ye)
    return d + s if s else d


def key_fdegree(key) -> float:
    xe, ye = key
    return sum(e.fvalue for e in xe) + sum(ye)


_SLACK = 1e-9


def degree_cmp(key, bound) -> int:
    """Sign of ``degree(key) - bound``, exact near ties."""
    if bound == INF:
        return -1
    diff = key_fdegree(key) - float(bound)
    if diff < -_SLACK:
        return -1
    if diff > _SLACK:
        return 1
    return real_cmp(key_degree(key), bound)


def _within_cap(key, cap) -> bool:
    return degree_cmp(key, cap) <= 0


class GeneralizedSeries:
    """Immutable truncated series; see the module docstring."""

    __slots__ = ("basis", "m", "n", "terms", "cap")

    def __init__(self, basis: GeneratorBasis, m: int, n: int,
                 terms: Mapping | None = None, cap=INF, _trusted: bool = False):
        if m < 0 or n < 0:
            raise ValueError("variable counts must be nonnegative")
        out = {}
        if terms:
            if _trusted:
                out = dict(terms)
            else:
                for key, c in terms.items():
                    xexp, yexp = key
                    xexp = tuple(xexp)
                    yexp = tuple(int(b) for b in yexp)
                    if len(xexp) != m or len(yexp) != n:
                        raise ValueError(f"term {key} does not match shape ({m}, {n})")
                    if any(b < 0 for b in yexp):
                        raise DomainError("negative analytic exponent")
                    for e in xexp:
                        if e.basis is not basis and e.basis != basis:
                            raise BasisMismatch("exponent from a foreign basis")
                    key = (xexp, yexp)
                    if C.is_zero(c) or not _within_cap(key, cap):
                        continue
                    if key in out:
                        c = out[key] + c
                        if C.is_zero(c):
                            del out[key]
                            continue
                    out[key] = c
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "terms", out)
        object.__setattr__(self, "cap", cap)

    def __setattr__(self, key, value):
        raise AttributeError("GeneralizedSeries is immutable")

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, basis, m, n, cap=INF):
        return cls(basis, m, n, {}, cap)

    @classmethod
    def constant(cls, c, basis, m, n, cap=INF):
        return cls(basis, m, n, {cls._zero_key(basis, m, n): c}, cap)

    @staticmethod
    def _zero_key(basis, m, n):
        z = basis.zero()
        return ((z,) * m, (0,) * n)

    @classmethod
    def monomial(cls, basis, m, n, x=(), y=(), coeff=1, cap=INF):
        """``coeff * X^x * Y^y``; ``x`` holds exponents or coefficient vectors."""
        xs = []
        x = list(x) + [basis.zero()] * (m - len(x))
        for e in x:
            if isinstance(e, MonoidExponent):
                xs.append(e)
            elif isinstance(e, (tuple, list)):
                xs.append(basis.exponent(*e))
            else:
                xs.append(basis.from_value(e))
        y = tuple(y) + (0,) * (n - len(y))
        return cls(basis, m, n, {(tuple(xs), y): coeff}, cap)

    @classmethod
    def x_var(cls, i, basis, m, n, cap=INF):
        x = [basis.zero()] * m
        x[i] = basis.exponent(1)
        return cls.monomial(basis, m, n, x, (), 1, cap)

    @classmethod
    def y_var(cls, j, basis, m, n, cap=INF):
        y = [0] * n
        y[j] = 1
        return cls.monomial(basis, m, n, (), y, 1, cap)

    def like(self, terms, cap=None, basis=None, m=None, n=None, trusted=False):
        return GeneralizedSeries(basis or self.basis, self.m if m is None else m,
                                 self.n if n is None else n, terms,
                                 self.cap if cap is None else cap, _trusted=trusted)

    # inspection ---------------------------------------------------------
    @property
    def shape(self):
        return (self.m, self.n)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.sorted_terms())

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self):
        return self.terms.get(self._zero_key(self.basis, self.m, self.n), 0)

    def support(self):
        return set(self.terms)

    def coefficient(self, x=(), y=()):
        b = self.basis
        xs = tuple(e if isinstance(e, MonoidExponent) else
                   (b.exponent(*e) if isinstance(e, (tuple, list)) else b.from_value(e))
                   for e in list(x) + [b.zero()] * (self.m - len(x)))
        ys = tuple(y) + (0,) * (self.n - len(y))
        return self.terms.get((xs, ys), 0)

    def order(self, tol: float = 0.0):
        """Least total degree of a term with ``|coeff| > tol``; ``inf`` if none."""
        best = INF
        for key, c in self.terms.items():
            if tol and C.magnitude(c) <= tol:
                continue
            d = key_degree(key)
            if best == INF or real_cmp(d, best) < 0:
                best = d
        return best

    def max_magnitude(self) -> float:
        return max((C.magnitude(c) for c in self.terms.values()), default=0.0)

    def sorted_terms(self):
        def sort_key(item):
            key = item[0]
            return (float(key_degree(key)),
                    tuple(-float(e.value) for e in key[0]),
                    tuple(-b for b in key[1]))
        return sorted(self.terms.items(), key=sort_key)

    def evaluate(self, x=(), y=()) -> float:
        total = 0.0
        for (xe, ye), c in self.terms.items():
            t = float(c)
            for xi, e in zip(x, xe):
                if any(e.coeffs):
                    t *= float(xi) ** float(e.value)
            for yi, b in zip(y, ye):
                if b:
                    t *= float(yi) ** b
            total += t
        return total

    def map_coefficients(self, fn):
        return self.like({k: fn(c) for k, c in self.terms.items()})

    # comparison ---------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, GeneralizedSeries):
            return NotImplemented
        if self.shape != other.shape or self.basis != other.basis:
            return False
        if real_cmp(self.cap, other.cap) != 0:
            return False
        return self.terms == other.terms

    __hash__ = None

    def same_terms(self, other, tol: float = 0.0, cap=None) -> bool:
        """Stored terms agree (to ``tol``) up to ``cap`` (default: min cap)."""
        d = self - other
        if cap is not None:
            d = d.truncate(cap)
        return d.order(tol) == INF

    # caps ---------------------------------------------------------------
    def truncate(self, cap) -> "GeneralizedSeries":
        """Lower the cap (never raises it)."""
        cap = real_min(cap, self.cap)
        return self.like({k: c for k, c in self.terms.items() if _within_cap(k, cap)},
                         cap=cap, trusted=True)

    def with_cap(self, cap) -> "GeneralizedSeries":
        """Reinterpret the stored terms with a new cap (may raise it)."""
        return self.like(self.terms, cap=cap)

    def with_basis(self, basis: GeneratorBasis) -> "GeneralizedSeries":
        if basis is self.basis:
            return self
        terms = {}
        for (xe, ye), c in self.terms.items():
            terms[(tuple(basis.convert(e) for e in xe), ye)] = c
        return GeneralizedSeries(basis, self.m, self.n, terms, self.cap, _trusted=True)

    # arithmetic ---------------------------------------------------------
    def _check_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other):
        if not isinstance(other, GeneralizedSeries):
            return self + GeneralizedSeries.constant(other, self.basis, self.m, self.n)
        return gs_linear(1, self, 1, other)

    __radd__ = __add__

    def __neg__(self):
        return self.like({k: -c for k, c in self.terms.items()}, trusted=True)

    def __sub__(self, other):
        if not isinstance(other, GeneralizedSeries):
            return self - GeneralizedSeries.constant(other, self.basis, self.m, self.n)
        return gs_linear(1, self, -1, other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, GeneralizedSeries):
            return gs_mul(self, other)
        if C.is_zero(other):
            return self.like({})
        return self.like({k: c * other for k, c in self.terms.items()})

    def __rmul__(self, other):
        if C.is_zero(other):
            return self.like({})
        return self.like({k: other * c for k, c in self.terms.items()})

    def __truediv__(self, scalar):
        inv = C.reciprocal(scalar)
        return self * inv

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("use gs_reciprocal for negative powers")
        result = GeneralizedSeries.constant(1, self.basis, self.m, self.n, self.cap)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __repr__(self):
        from .textio import format_series
        return f"GeneralizedSeries({format_series(self)}, cap={self.cap})"

    def __str__(self):
        from .textio import format_series
        return format_series(self)


# ---------------------------------------------------------------------------
# ring operations


def unify(*series: GeneralizedSeries) -> list[GeneralizedSeries]:
    """Re-express operands over one common basis."""
    basis = series[0].basis
    for s in series[1:]:
        if s.basis is not basis and s.basis != basis:
            basis = basis.merged(s.basis)
    return [s.with_basis(basis) if s.basis != basis or s.basis is not basis else s
            for s in series]


def gs_linear(a, F: GeneralizedSeries, b, G: GeneralizedSeries) -> GeneralizedSeries:
    """``a*F + b*G`` with cap ``min(F.cap, G.cap)``."""
    F._check_shape(G)
    if F.basis is not G.basis and F.basis != G.basis:
        F, G = unify(F, G)
    cap = real_min(F.cap, G.cap)
    out = {}
    for src, s in ((F, a), (G, b)):
        if C.is_zero(s):
            continue
        for k, c in src.terms.items():
            if not _within_cap(k, cap):
                continue
            v = c if s == 1 else s * c
            if k in out:
                v = out[k] + v
                if C.is_zero(v):
                    del out[k]
                    continue
            if not C.is_zero(v):
                out[k] = v
    return GeneralizedSeries(F.basis, F.m, F.n, out, cap, _trusted=True)


def gs_mul(F: GeneralizedSeries, G: GeneralizedSeries) -> GeneralizedSeries:
    """Cauchy product; terms above ``min(F.cap, G.cap)`` are discarded."""
    F._check_shape(G)
    if F.basis is not G.basis and F.basis != G.basis:
        F, G = unify(F, G)
    cap = real_min(F.cap, G.cap)
    fcap = INF if cap == INF else float(cap)
    out: dict = {}
    gitems = sorted(((k, key_fdegree(k), c) for k, c in G.terms.items()),
                    key=lambda t: t[1])
    for fk, fc in F.terms.items():
        fx, fy = fk
        fdeg = key_fdegree(fk)
        for gk, gdeg, gc in gitems:
            tot = fdeg + gdeg
            if tot > fcap + _SLACK:
                break
            gx, gy = gk
            key = (tuple(exp_add(a, b) for a, b in zip(fx, gx)),
                   tuple(a + b for a, b in zip(fy, gy)))
            if tot > fcap - _SLACK and real_cmp(key_degree(key), cap) > 0:
                continue
            v = fc * gc
            if key in out:
                v = out[key] + v
            out[key] = v
    out = {k: v for k, v in out.items() if not C.is_zero(v)}
    return GeneralizedSeries(F.basis, F.m, F.n, out, cap, _trusted=True)


def _cap_plus(cap, order):
    if cap == INF or order == INF:
        return INF
    if is_exact(cap) and is_exact(order):
        return cap + order
    return float(cap) + float(order)


def gs_mul_sharp(F: GeneralizedSeries, G: GeneralizedSeries) -> GeneralizedSeries:
    """Product with the sharper cap ``min(F.cap + ord G, G.cap + ord F)``.

    An unknown term of ``F`` (degree above its cap) meets terms of ``G`` of
    degree at least ``ord G``, hence this cap is still certified.
    """
    cap = real_min(_cap_plus(F.cap, G.order()), _cap_plus(G.cap, F.order()))
    if F.is_zero() or G.is_zero():
        return F.like({}, cap=cap)
    return gs_mul(F.with_cap(cap), G.with_cap(cap)).with_cap(cap)


# ---------------------------------------------------------------------------
# derivatives


def gs_partial_x(F: GeneralizedSeries, i: int) -> GeneralizedSeries:
    """Euler derivative ``X_i d/dX_i``: multiplies each term by its exponent."""
    if not 0 <= i < F.m:
        raise IndexError(f"X index {i} out of range for m={F.m}")
    out = {}
    for key, c in F.terms.items():
        e = key[0][i]
        if not any(e.coeffs):
            continue
        v = C.scale_by_value(c, e.value)
        if not C.is_zero(v):
            out[key] = v
    return F.like(out, trusted=True)


def gs_partial_y(F: GeneralizedSeries, j: int) -> GeneralizedSeries:
    """Ordinary partial derivative in ``Y_j``.

    The result is known up to ``cap - 1``: an unknown term of degree just
    above the cap drops by one.
    """
    if not 0 <= j < F.n:
        raise IndexError(f"Y index {j} out of range for n={F.n}")
    out = {}
    for (xe, ye), c in F.terms.items():
        b = ye[j]
        if b == 0:
            continue
        ny = ye[:j] + (b - 1,) + ye[j + 1:]
        out[(xe, ny)] = c * b
    cap = F.cap if F.cap == INF else F.cap - 1
    return F.like(out, cap=cap)


# ---------------------------------------------------------------------------
# elementary sets and truncation


@dataclass(frozen=True)
class Bound:
    """One side of a box coordinate: ``value`` (None = unbounded) and strictness."""

    value: object = None
    strict: bool = False

    def below(self, v) -> bool:
        """``self (<|<=) v`` for a lower bound."""
        if self.value is None:
            return True
        c = real_cmp(_val(self.value), _val(v))
        return c < 0 or (c == 0 and not self.strict)

    def above(self, v) -> bool:
        """``v (<|<=) self`` for an upper bound."""
        if self.value is None:
            return True
        c = real_cmp(_val(v), _val(self.value))
        return c < 0 or (c == 0 and not self.strict)


def _val(v):
    return v.value if isinstance(v, MonoidExponent) else v


@dataclass(frozen=True)
class ElementaryBox:
    """Product of intervals over the ``m + n`` exponent coordinates."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise ValueError("lower/upper dimension mismatch")

    @classmethod
    def from_bounds(cls, lower, upper=None):
        """``lower``/``upper``: sequences of values, ``Bound``s or None."""
        def norm(b):
            return b if isinstance(b, Bound) else Bound(b, False)
        lower = tuple(norm(b) if b is not None else Bound(0, False) for b in lower)
        upper = tuple(norm(b) for b in (upper if upper is not None else [None] * len(lower)))
        return cls(lower, upper)

    @property
    def dim(self):
        return len(self.lower)

    def contains(self, point) -> bool:
        return all(lo.below(p) and hi.above(p)
                   for lo, hi, p in zip(self.lower, self.upper, point))

    def disjoint_from(self, other: "ElementaryBox") -> bool:
        for lo1, hi1, lo2, hi2 in zip(self.lower, self.upper, other.lower, other.upper):
            if _interval_gap(hi1, lo2) or _interval_gap(hi2, lo1):
                return True
        return False


def _interval_gap(hi: Bound, lo: Bound) -> bool:
    """True when everything below ``hi`` lies strictly below everything above ``lo``."""
    if hi.value is None or lo.value is None:
        return False
    c = real_cmp(_val(hi.value), _val(lo.value))
    return c < 0 or (c == 0 and (hi.strict or lo.strict))


@dataclass(frozen=True)
class ElementarySet:
    """Finite union of pairwise disjoint boxes."""

    boxes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        boxes = tuple(self.boxes)
        object.__setattr__(self, "boxes", boxes)
        for a, b in itertools.combinations(boxes, 2):
            if a.dim != b.dim:
                raise ValueError("boxes of different dimension")
            if not a.disjoint_from(b):
                raise ValueError("boxes of an elementary set must be pairwise disjoint")

    def contains(self, point) -> bool:
        return any(b.contains(point) for b in self.boxes)

    @classmethod
    def orthant(cls, gamma_x, gamma_y=None, n=None):
        """``{(alpha, beta): alpha >= gamma_x, beta >= gamma_y}``."""
        gy = list(gamma_y) if gamma_y is not None else [0] * (n or 0)
        return cls((ElementaryBox.from_bounds(list(gamma_x) + gy),))


def _set_infimum(S: ElementarySet, F: GeneralizedSeries):
    """``inf S`` per coordinate from the set itself (lower bounds, strict or not)."""
    if not S.boxes:
        raise DomainError("infimum of an empty elementary set")
    xs, ys = [], []
    b = F.basis
    for i in range(F.m + F.n):
        vals = []
        for box in S.boxes:
            lo = box.lower[i]
            v = 0 if lo.value is None else lo.value
            if i >= F.m:
                v = _val(v)
                iv = math.ceil(v) if not isinstance(v, int) else v
                if lo.strict and iv == v:
                    iv += 1
                vals.append(int(iv))
            else:
                vals.append(v if isinstance(v, MonoidExponent) else b.from_value(v))
        if i < F.m:
            best = vals[0]
            for v in vals[1:]:
                if real_cmp(v.value, best.value) < 0:
                    best = v
            xs.append(best)
        else:
            ys.append(min(vals))
    return tuple(xs), tuple(ys)


def gs_truncate_set(F: GeneralizedSeries, S: ElementarySet) -> GeneralizedSeries:
    """``F_S``: terms of ``F`` with exponent in ``S``, shifted by ``inf S``.

    Coefficients at shifted degree ``d`` come from degree ``d + |inf S|``,
    so the cap drops by ``|inf S|``.
    """
    a, bvec = _set_infimum(S, F)
    out = {}
    for (xe, ye), c in F.terms.items():
        point = tuple(e.value for e in xe) + ye
        if not S.contains(point):
            continue
        try:
            nx = tuple(exp_sub(e, s) for e, s in zip(xe, a))
        except DomainError as err:
            raise DomainError(f"shift by inf S leaves the monoid: {err}") from None
        ny = tuple(y - s for y, s in zip(ye, bvec))
        if any(v < 0 for v in ny):
            raise DomainError("analytic shift below zero")
        out[(nx, ny)] = c
    shift = key_degree((a, bvec))
    cap = F.cap if F.cap == INF else F.cap - shift
    return F.like(out, cap=cap, trusted=True)


def _as_exponents(F, gamma):
    b = F.basis
    out = []
    for g in gamma:
        if isinstance(g, MonoidExponent):
            out.append(b.convert(g) if g.basis is not b else g)
        elif isinstance(g, (tuple, list)):
            out.append(b.exponent(*g))
        else:
            out.append(b.from_value(g))
    if len(out) != F.m:
        raise ValueError(f"gamma needs {F.m} entries")
    return tuple(out)


def _geq(e: MonoidExponent, g: MonoidExponent) -> bool:
    return e.coeffs == g.coeffs or real_cmp(e.value, g.value) >= 0


def gs_truncate_gamma(F: GeneralizedSeries, gamma, gamma_y=None) -> GeneralizedSeries:
    """``F_gamma``: keep terms with ``alpha >= gamma`` and divide by ``X^gamma``."""
    gx = _as_exponents(F, gamma)
    gy = tuple(gamma_y) if gamma_y is not None else (0,) * F.n
    out = {}
    for (xe, ye), c in F.terms.items():
        if all(_geq(e, g) for e, g in zip(xe, gx)) and all(y >= g for y, g in zip(ye, gy)):
            out[(tuple(exp_sub(e, g) for e, g in zip(xe, gx)),
                 tuple(y - g for y, g in zip(ye, gy)))] = c
    shift = key_degree((gx, gy))
    cap = F.cap if F.cap == INF else F.cap - shift
    return F.like(out, cap=cap, trusted=True)


def gs_gamma_representation(F: GeneralizedSeries, gamma) -> dict:
    """Decompose ``F`` by which exponent coordinates fall below ``gamma``.

    Returns ``{(I, alpha_I): component}`` with ``I`` a tuple of 0-based
    indices and ``alpha_I`` the exponents on ``I`` (all ``< gamma_I``); each
    component is independent of ``X_I`` and satisfies
    ``F = sum X_{~I}^{gamma_{~I}} X_I^{alpha_I} component``.
    The component ``((), ())`` is ``gs_truncate_gamma(F, gamma)``.
    """
    gx = _as_exponents(F, gamma)
    zero = F.basis.zero()
    groups: dict = {}
    for (xe, ye), c in F.terms.items():
        I = tuple(i for i in range(F.m)
                  if xe[i].coeffs != gx[i].coeffs and real_cmp(xe[i].value, gx[i].value) < 0)
        alpha = tuple(xe[i] for i in I)
        nx = tuple(zero if i in I else exp_sub(xe[i], gx[i]) for i in range(F.m))
        groups.setdefault((I, alpha), {})[(nx, ye)] = c
    out = {}
    for (I, alpha), terms in groups.items():
        shift = _xdegree(tuple(gx[i] for i in range(F.m) if i not in I)) + _xdegree(alpha)
        cap = F.cap if F.cap == INF else F.cap - shift
        out[(I, alpha)] = F.like(terms, cap=cap, trusted=True)
    if ((), ()) not in out:
        out[((), ())] = gs_truncate_gamma(F, gx).like({})
    return out


def gs_reassemble(representation: Mapping, gamma, template: GeneralizedSeries):
    """Inverse of :func:`gs_gamma_representation`."""
    gx = _as_exponents(template, gamma)
    out = {}
    for (I, alpha), comp in representation.items():
        amap = dict(zip(I, alpha))
        for (xe, ye), c in comp.terms.items():
            nx = []
            for i in range(template.m):
                if i in amap:
                    if any(xe[i].coeffs):
                        raise DomainError(f"component {I} depends on X{i + 1}")
                    nx.append(amap[i])
                else:
                    nx.append(exp_add(xe[i], gx[i]))
            key = (tuple(nx), ye)
            out[key] = out.get(key, 0) + c
    return template.like(out)


# ---------------------------------------------------------------------------
# box normalisation over a finite support


@dataclass(frozen=True)
class BoxNormalization:
    """``S ∩ B = S ∩ {a >= gamma} minus the union of S ∩ {a >= delta_j}``.

    ``None`` entries stand for +infinity (an empty constraint set).
    """

    gamma: tuple
    deltas: tuple

    def select(self, support: Iterable) -> set:
        def geq(p, v):
            return all(t is not None and real_cmp(_val(x), _val(t)) >= 0
                       for x, t in zip(p, v))
        out = set()
        for p in support:
            if not geq(p, self.gamma):
                continue
            if any(geq(p, d) for d in self.deltas):
                continue
            out.add(p)
        return out


def box_normalize(support: Iterable, box: ElementaryBox) -> BoxNormalization:
    """Rewrite ``S ∩ box`` with one lower orthant and ``k`` removed orthants.

    Per coordinate: ``gamma_i`` is the least projection value satisfying the
    lower bound, ``delta_i`` the largest satisfying the upper bound, and the
    ``j``-th removed orthant starts at the next projection value above
    ``delta_j`` in coordinate ``j`` (``None`` when there is none).
    """
    pts = list(support)
    k = box.dim
    proj = [sorted({p[i] for p in pts}, key=lambda v: float(_val(v))) for i in range(k)]
    gamma, upper = [], []
    for i in range(k):
        lo, hi = box.lower[i], box.upper[i]
        ok_lo = [r for r in proj[i] if lo.below(r)]
        ok_hi = [r for r in proj[i] if hi.above(r)]
        gamma.append(_pick(ok_lo, min))
        upper.append(_pick(ok_hi, max))
    deltas = []
    for j in range(k):
        if box.upper[j].value is None:
            continue
        nxt = None
        if upper[j] is not None:
            above = [r for r in proj[j] if real_cmp(_val(r), _val(upper[j])) > 0]
            nxt = _pick(above, min)
        else:
            nxt = _pick(proj[j], min)
        d = list(gamma)
        d[j] = nxt
        deltas.append(tuple(d))
    return BoxNormalization(tuple(gamma), tuple(deltas))


def _pick(values, how):
    if not values:
        return None
    best = values[0]
    for v in values[1:]:
        c = real_cmp(_val(v), _val(best))
        if (how is min and c < 0) or (how is max and c > 0):
            best = v
    return best
