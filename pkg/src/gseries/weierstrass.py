"""Division, preparation and implicit functions in the analytic variables.

Everything here works in the last analytic variable ``Y_n`` (or the last
``l`` of them), with the generalized variables and the other analytic
variables as parameters.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from . import coeffs as C
from .monoid import DomainError, SeriesError, real_cmp, real_min
from .quadratic import is_exact
from .series import INF, GeneralizedSeries, gs_mul_sharp, gs_partial_y, key_degree, unify
from .transform import gs_compose, gs_reciprocal, insert_y, permute_y


class NotRegular(SeriesError, ArithmeticError):
    """The series is not regular in the last analytic variable within its cap."""


class SingularJacobian(SeriesError, ArithmeticError):
    pass


class NotSymmetric(SeriesError, ValueError):
    def __init__(self, permutation, key, coefficient):
        self.permutation = permutation
        self.key = key
        self.coefficient = coefficient
        super().__init__(
            f"not symmetric under {permutation}: term {key} has coefficient {coefficient}")


@dataclass(frozen=True)
class RegularityReport:
    order: int | None
    coefficient: object = 0

    @property
    def regular(self) -> bool:
        return self.order is not None


def _is_y_last_only(key) -> bool:
    xe, ye = key
    return not any(any(e.coeffs) for e in xe) and not any(ye[:-1])


def regular_order(F: GeneralizedSeries) -> RegularityReport:
    """Lowest power of ``Y_n`` in ``F(0, 0, Y_n)`` and its coefficient."""
    if F.n < 1:
        raise ValueError("regularity needs an analytic variable")
    best = None
    for key, c in F.terms.items():
        if _is_y_last_only(key):
            d = key[1][-1]
            if best is None or d < best[0]:
                best = (d, c)
    if best is None:
        return RegularityReport(None, 0)
    return RegularityReport(best[0], best[1])


def _xy_order(key) -> object:
    """Total degree ignoring ``Y_n``."""
    xe, ye = key
    return key_degree((xe, ye[:-1] + (0,)))


def _xy_fdeg(key) -> float:
    xe, ye = key
    return sum(e.fvalue for e in xe) + sum(ye[:-1])


def _unit_inverse_coeffs(e: dict, bound: int) -> list:
    """Coefficients of ``1/e(Y)`` up to ``Y^bound`` for a univariate ``e``."""
    e0 = e.get(0, 0)
    inv = [C.reciprocal(e0)]
    for k in range(1, bound + 1):
        acc = 0
        for j in range(1, k + 1):
            if j in e:
                acc = acc + e[j] * inv[k - j]
        inv.append(-acc * inv[0] if not C.is_zero(acc) else 0)
    return inv


def w_divide(g: GeneralizedSeries, f: GeneralizedSeries, d: int | None = None,
             cap=None, schedule: str = "block"):
    """``g = q f + r`` with ``deg_{Y_n} r < d``; returns ``(q, r)`` with cap ``cap``.

    The stored terms of ``f`` and ``g`` are read as exact polynomials; their
    caps only bound the requested cap.  Writing ``f = Y_n^d e(Y_n) + R``
    with ``R`` of positive order in the other variables, each step divides
    the remainder by the ``Y_n^d e`` part and feeds ``-q_k R`` back, so the
    remainder's order in ``(X, Y')`` strictly grows.  ``schedule="term"``
    peels one ``(X, Y')``-order slice per step instead of the whole
    remainder; both give the same result.
    """
    report = regular_order(f)
    if d is None:
        d = report.order
    if report.order is None or report.order != d:
        raise NotRegular(f"f is not regular of order {d} (regular_order = {report.order})")
    if f.shape != g.shape:
        raise ValueError("g and f must have the same shape")
    if g.basis is not f.basis and g.basis != f.basis:
        g, f = unify(g, f)
    target = real_min(g.cap, f.cap, INF if cap is None else cap)
    if target == INF:
        raise ValueError("division needs a finite cap")
    unit: dict = {}
    R: dict = {}
    for key, c in f.terms.items():
        if _is_y_last_only(key):
            unit[key[1][-1] - d] = c
        else:
            R[key] = c
    if any(k < 0 for k in unit):
        raise NotRegular(f"term below Y_n-degree {d}")
    omega = min((_xy_fdeg(k) for k in R), default=INF)
    ftarget = float(target) + 1e-9

    def max_y(o: float) -> float:
        # largest Y_n-degree at (X, Y')-order o that can still reach the result:
        # each later division lowers it by d and costs at least omega in order
        if o > ftarget:
            return -1.0
        divisions = 1 if omega == INF else 1 + math.floor((ftarget - o) / omega)
        return ftarget - o + d * divisions

    def max_q(o: float) -> float:
        direct = ftarget - o
        return max(direct, max_y(o + omega)) if omega != INF else direct

    inv = _unit_inverse_coeffs(unit, int(max_q(0.0)) + 1)
    R_items = [(k, _xy_fdeg(k), c) for k, c in R.items()]
    current = {k: c for k, c in g.terms.items() if k[1][-1] <= max_y(_xy_fdeg(k))}
    q: dict = {}
    r: dict = {}
    while current:
        if schedule == "term":
            low = min(_xy_fdeg(k) for k in current)
            piece = {k: c for k, c in current.items() if _xy_fdeg(k) <= low + 1e-12}
            for k in piece:
                del current[k]
        else:
            piece, current = current, {}
        qk: dict = {}
        for (xe, ye), c in piece.items():
            if ye[-1] < d:
                _acc(r, (xe, ye), c)
                continue
            o = _xy_fdeg((xe, ye))
            limit = max_q(o)
            base = ye[-1] - d
            for j, ic in enumerate(inv):
                if base + j > limit:
                    break
                if not C.is_zero(ic):
                    _acc(qk, (xe, ye[:-1] + (base + j,)), c * ic)
        for qkey, qc in qk.items():
            _acc(q, qkey, qc)
            qx, qy = qkey
            qo = _xy_fdeg(qkey)
            for (rx, ry), ro, rc in R_items:
                o = qo + ro
                k = qy[-1] + ry[-1]
                if k > max_y(o):
                    continue
                key = (tuple(a + b for a, b in zip(qx, rx)), tuple(a + b for a, b in zip(qy, ry)))
                _acc(current, key, -qc * rc)
    Q = GeneralizedSeries(g.basis, g.m, g.n, q, target)
    Rm = GeneralizedSeries(g.basis, g.m, g.n, r, target)
    return Q, Rm


def _acc(d: dict, key, v):
    v = d.get(key, 0) + v
    if C.is_zero(v):
        d.pop(key, None)
    else:
        d[key] = v


def w_prepare(f: GeneralizedSeries, cap=None):
    """``f = u w`` with ``u`` a unit and ``w`` monic of degree ``d`` in ``Y_n``."""
    report = regular_order(f)
    if report.order is None:
        raise NotRegular("not regular in the last analytic variable (regular_order = none)")
    d = report.order
    yd = GeneralizedSeries.monomial(f.basis, f.m, f.n, (), (0,) * (f.n - 1) + (d,), 1)
    q, r = w_divide(yd, f, d, cap)
    w = (yd - r).with_cap(q.cap)
    u = gs_reciprocal(q, q.cap)
    return u, w


# ---------------------------------------------------------------------------
# implicit functions


def _substitute_last(F: GeneralizedSeries, h: GeneralizedSeries, cap=None):
    """``F(X, Y', h(X, Y'))`` with ``h`` in the ring with one fewer Y."""
    m, n = h.shape
    subs = [GeneralizedSeries.y_var(j, h.basis, m, n) for j in range(n)] + [h]
    return gs_compose(F, subs, cap)


def implicit_solve(f: GeneralizedSeries, cap=None, schedule: str = "doubling"):
    """``h(X, Y')`` with ``h(0) = 0`` and ``f(X, Y', h) = 0`` up to the result cap.

    Newton iteration ``h <- h - f(h) / f_Y(h)`` starting from
    ``-f(X, Y', 0) / f_Y(0)``; the working cap doubles from the order of the
    start value up to the target.
    """
    if f.n < 1:
        raise ValueError("need an analytic variable to solve for")
    if not C.is_zero(f.constant_term()):
        raise DomainError("f(0) must vanish")
    fy = gs_partial_y(f, f.n - 1)
    slope = fy.constant_term()
    if C.is_zero(slope):
        raise SingularJacobian("df/dY_n vanishes at the origin")
    target = real_min(f.cap, INF if cap is None else cap)
    if target == INF:
        raise ValueError("implicit_solve needs a finite cap")
    m, n = f.m, f.n - 1
    basis = f.basis
    zero = GeneralizedSeries.zero(basis, m, n)
    a0 = _substitute_last(f, zero)
    h = (a0 * (-C.reciprocal(slope))).truncate(target)
    if a0.truncate(target).is_zero():
        return zero.with_cap(_solution_cap(f, zero, target))
    omega = h.order() if not h.is_zero() else target
    level = target
    if schedule == "doubling":
        level = real_min(target, omega * 2)
    tol = _tolerance(f)
    extra = 0
    for _ in range(200):
        hc = h.truncate(level).with_cap(level)
        res = _substitute_last(f, hc, level)
        if level == target:
            if res.truncate(level).order(tol) == INF:
                return h.truncate(level).with_cap(_solution_cap(f, h, target))
            extra += 1
            if extra > 12:
                break
        deriv = _substitute_last(fy, hc, level)
        step = gs_mul_sharp(res, gs_reciprocal(deriv, level))
        h = (hc - step).truncate(level).with_cap(INF)
        if level != target:
            level = real_min(target, level * 2)
    raise ArithmeticError("Newton iteration did not converge")


def _tolerance(f: GeneralizedSeries) -> float:
    """Zero for exact coefficients, else a small multiple of the coefficient scale."""
    if all(is_exact(c) for c in f.terms.values()):
        return 0.0
    return 1e-11 * max(1.0, f.max_magnitude())


def _solution_cap(f, h, target):
    """Cap of the solution: unknown terms of ``f`` reach ``min(1, ord h) * cap``."""
    if f.cap == INF:
        return target
    omega = h.order() if not h.is_zero() else INF
    if omega == INF or real_cmp(omega, 1) >= 0:
        return real_min(target, f.cap)
    if is_exact(omega) and is_exact(f.cap):
        return real_min(target, f.cap * omega)
    return real_min(target, float(f.cap) * float(omega))


def implicit_solve_lagrange(f: GeneralizedSeries, cap=None) -> GeneralizedSeries:
    """Same solution via the Lagrange inversion formula (one analytic variable).

    With ``a0 = f(X, 0)`` and ``f - a0 = Y g1(X, Y)``:
    ``h = sum_p (1/p) [Y^(p-1)] g1^(-p) * (-a0)^p``.
    """
    if f.n != 1:
        raise ValueError("the Lagrange route handles exactly one analytic variable")
    if not C.is_zero(f.constant_term()):
        raise DomainError("f(0) must vanish")
    target = real_min(f.cap, INF if cap is None else cap)
    if target == INF:
        raise ValueError("needs a finite cap")
    m = f.m
    a0_terms, g1_terms = {}, {}
    for (xe, ye), c in f.terms.items():
        if ye[0] == 0:
            a0_terms[(xe, ())] = c
        else:
            g1_terms[(xe, (ye[0] - 1,))] = c
    a0 = GeneralizedSeries(f.basis, m, 0, a0_terms, target)
    g1 = GeneralizedSeries(f.basis, m, 1, g1_terms, INF)
    if C.is_zero(g1.constant_term()):
        raise SingularJacobian("df/dY vanishes at the origin")
    if a0.is_zero():
        return a0.with_cap(_solution_cap(f, a0, target))
    omega = a0.order()
    p_max = 0
    while real_cmp(omega * (p_max + 1), target) <= 0:
        p_max += 1
    inv = gs_reciprocal(g1, target + p_max - 1)
    h = GeneralizedSeries.zero(f.basis, m, 0, target)
    minus_a0 = -a0
    power = GeneralizedSeries.constant(1, f.basis, m, 0, target)
    inv_p = GeneralizedSeries.constant(1, f.basis, m, 1, inv.cap)
    for p in range(1, p_max + 1):
        power = power * minus_a0
        inv_p = inv_p * inv
        coeff = {(xe, ()): c for (xe, ye), c in inv_p.terms.items() if ye[0] == p - 1}
        b_p = GeneralizedSeries(f.basis, m, 0, coeff, target)
        h = h + b_p * power * C.reciprocal(p)
    return h.truncate(_solution_cap(f, h, target))


def implicit_solve_system(fs, l: int | None = None, cap=None):
    """Solve ``f_i(X, Y', h) = 0`` for the last ``l`` analytic variables.

    Pivot on an equation/variable pair with the largest nonzero partial at
    the origin, solve that equation for the variable, substitute into the
    others and recurse.  Returns one series per implicit variable, in the
    ring of the remaining ``n - l`` analytic variables.
    """
    fs = list(fs)
    l = len(fs) if l is None else l
    if l != len(fs):
        raise ValueError("need as many equations as implicit variables")
    if l == 0:
        return []
    n = fs[0].n
    if any(f.shape != fs[0].shape for f in fs):
        raise ValueError("equations must share one shape")
    implicit = list(range(n - l, n))
    sols = _solve_system(fs, implicit, cap)
    return [sols[v] for v in implicit]


def _solve_system(fs, implicit, cap):
    """Return ``{variable index: solution}`` in the ring without ``implicit``."""
    n = fs[0].n
    best = None
    for i, f in enumerate(fs):
        for v in implicit:
            c = gs_partial_y(f, v).constant_term()
            if not C.is_zero(c) and (best is None or C.magnitude(c) > best[0]):
                best = (C.magnitude(c), i, v)
    if best is None:
        raise SingularJacobian("Jacobian in the implicit variables is singular at the origin")
    _, i, v = best
    order = [k for k in range(n) if k != v] + [v]
    w = implicit_solve(permute_y(fs[i], order), cap)
    m = w.m
    # w lives in the ring of all variables except v, in the original order
    others = [f for k, f in enumerate(fs) if k != i]
    reduced = [_substitute_last(permute_y(f, order), w, cap) for f in others]
    rest = [k if k < v else k - 1 for k in implicit if k != v]
    if reduced:
        sub = _solve_system(reduced, rest, cap)
    else:
        sub = {}
    # map back: remaining ring has the non-implicit variables of the reduced ring
    keep = [k for k in range(n - 1) if k not in rest]
    basis = w.basis
    n_final = len(keep)
    subs = []
    for k in range(n - 1):
        if k in rest:
            subs.append(sub[k])
        else:
            subs.append(GeneralizedSeries.y_var(keep.index(k), basis, m, n_final))
    w_final = gs_compose(w, subs, cap) if subs else w
    out = {}
    for k_orig in implicit:
        if k_orig == v:
            out[k_orig] = w_final
        else:
            out[k_orig] = sub[k_orig if k_orig < v else k_orig - 1]
    return out


# ---------------------------------------------------------------------------
# symmetric functions


def _check_symmetric(f: GeneralizedSeries, l: int):
    start = f.n - l
    if l <= 6:
        perms = itertools.permutations(range(l))
    else:
        # adjacent transpositions generate the symmetric group
        perms = []
        for k in range(l - 1):
            p = list(range(l))
            p[k], p[k + 1] = p[k + 1], p[k]
            perms.append(tuple(p))
    for perm in perms:
        for (xe, ye), c in f.terms.items():
            z = ye[start:]
            key = (xe, ye[:start] + tuple(z[perm[k]] for k in range(l)))
            other = f.terms.get(key, 0)
            if other != c:
                raise NotSymmetric(perm, (xe, ye), c)


def _elementary(l: int):
    """Elementary symmetric polynomials as ``{z-exponent: 1}`` dicts."""
    out = []
    for k in range(1, l + 1):
        terms = {}
        for combo in itertools.combinations(range(l), k):
            e = [0] * l
            for i in combo:
                e[i] = 1
            terms[tuple(e)] = 1
        out.append(terms)
    return out


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            out[k] = out.get(k, 0) + ca * cb
    return {k: c for k, c in out.items() if c != 0}


def symmetric_reduce(f: GeneralizedSeries, l: int) -> GeneralizedSeries:
    """``g`` with ``f(X, Y', z) = g(X, Y', sigma_1(z), ..., sigma_l(z))``.

    Classical lexicographic elimination on the ``z`` part.  The cap of ``g``
    is read in the weighted degree where ``sigma_k`` has weight ``k``.
    """
    if not 0 < l <= f.n:
        raise ValueError(f"cannot treat {l} of {f.n} analytic variables as symmetric")
    _check_symmetric(f, l)
    start = f.n - l
    sig = _elementary(l)
    cache: dict = {}

    def sigma_power(exps):
        if exps not in cache:
            acc = {(0,) * l: 1}
            for k, e in enumerate(exps):
                for _ in range(e):
                    acc = _poly_mul(acc, sig[k])
            cache[exps] = acc
        return cache[exps]

    # group by the z exponent: z-exponent -> {(xe, y'): coeff}
    work: dict = {}
    for (xe, ye), c in f.terms.items():
        work.setdefault(ye[start:], {})[(xe, ye[:start])] = c
    g: dict = {}
    while work:
        lead = max(work)
        coeffs = work.pop(lead)
        exps = tuple(lead[k] - (lead[k + 1] if k + 1 < l else 0) for k in range(l))
        if any(e < 0 for e in exps):
            raise NotSymmetric(None, lead, coeffs)
        for (xe, yp), c in coeffs.items():
            g[(xe, yp + exps)] = g.get((xe, yp + exps), 0) + c
        for z, zc in sigma_power(exps).items():
            if z == lead:
                continue
            bucket = work.setdefault(z, {})
            for k, c in coeffs.items():
                v = bucket.get(k, 0) - c * zc
                if C.is_zero(v):
                    bucket.pop(k, None)
                else:
                    bucket[k] = v
            if not bucket:
                del work[z]
    return GeneralizedSeries(f.basis, f.m, f.n, {k: c for k, c in g.items() if c != 0},
                             f.cap)


def elementary_substitutes(basis, m: int, n: int, l: int, cap=INF):
    """``sigma_1(z), ..., sigma_l(z)`` for the last ``l`` of ``n`` analytic variables."""
    start = n - l
    zero_x = (basis.zero(),) * m
    out = [GeneralizedSeries(basis, m, n, {(zero_x, (0,) * start + e): 1 for e in terms}, cap)
           for terms in _elementary(l)]
    ys = [GeneralizedSeries.y_var(j, basis, m, n, cap) for j in range(start)]
    return ys + out


__all__ = ["RegularityReport", "regular_order", "w_divide", "w_prepare", "implicit_solve",
           "implicit_solve_lagrange", "implicit_solve_system", "symmetric_reduce",
           "elementary_substitutes", "NotRegular", "SingularJacobian", "NotSymmetric"]
