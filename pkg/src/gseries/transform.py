"""Substitutions acting on truncated series.

Blow-ups, composition, reciprocals and real powers of units, Taylor
translation in the analytic variables, substitution of a one-variable
series ``t^rho (lam + h(t))`` for a generalized variable, and the
compositional inverse of a positive one-variable series.

Caps follow one rule: a result claims only the degrees that no unknown
(above-cap) input term can reach.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import coeffs as C
from .monoid import DomainError, GeneratorBasis, MonoidExponent, real_cmp, real_min
from .quadratic import is_exact
from .series import (INF, GeneralizedSeries, degree_cmp, gs_truncate_gamma, key_degree,
                     unify)


def _scale_cap(cap, factor):
    """``min(1, factor) * cap``."""
    if cap == INF:
        return INF
    if factor == INF or real_cmp(factor, 1) >= 0:
        return cap
    if is_exact(cap) and is_exact(factor):
        return cap * factor
    return float(cap) * float(factor)


def _integer_value(e: MonoidExponent) -> bool:
    v = e.value
    if e.basis.exact:
        return not hasattr(v, "d") and Fraction(v).denominator == 1
    return not any(e.coeffs[1:])


def _scaled_basis(basis: GeneratorBasis, rho, F: GeneralizedSeries | None = None,
                  slot: int | None = None) -> GeneratorBasis:
    """A basis holding ``rho * e`` for the exponents ``e`` that will be scaled.

    Exact bases only gain the values actually needed (from ``F``'s X
    variable ``slot``, or the generators when no series is given); float
    bases gain ``rho`` times every generator.
    """
    if not (basis.exact and is_exact(rho)):
        return basis.extended_for_scale(rho)
    if F is None:
        values = [rho * g for g in basis.generators]
    else:
        values = {rho * xe[slot].value for (xe, _) in F.terms}
    missing = [v for v in values if v != 0 and not basis.contains(v)]
    if not missing:
        return basis
    return basis.extended_by(sorted(set(missing), key=float))


# ---------------------------------------------------------------------------
# variable bookkeeping


def permute_x(F: GeneralizedSeries, order) -> GeneralizedSeries:
    """New X variable ``k`` is old X variable ``order[k]``."""
    order = list(order)
    if sorted(order) != list(range(F.m)):
        raise ValueError(f"{order} is not a permutation of range({F.m})")
    terms = {(tuple(xe[i] for i in order), ye): c for (xe, ye), c in F.terms.items()}
    return F.like(terms, trusted=True)


def permute_y(F: GeneralizedSeries, order) -> GeneralizedSeries:
    order = list(order)
    if sorted(order) != list(range(F.n)):
        raise ValueError(f"{order} is not a permutation of range({F.n})")
    terms = {(xe, tuple(ye[i] for i in order)): c for (xe, ye), c in F.terms.items()}
    return F.like(terms, trusted=True)


def insert_x(F: GeneralizedSeries, pos: int) -> GeneralizedSeries:
    """Add an X variable at ``pos`` that ``F`` does not depend on."""
    z = F.basis.zero()
    terms = {(xe[:pos] + (z,) + xe[pos:], ye): c for (xe, ye), c in F.terms.items()}
    return F.like(terms, m=F.m + 1, trusted=True)


def insert_y(F: GeneralizedSeries, pos: int, count: int = 1) -> GeneralizedSeries:
    terms = {(xe, ye[:pos] + (0,) * count + ye[pos:]): c for (xe, ye), c in F.terms.items()}
    return F.like(terms, n=F.n + count, trusted=True)


# ---------------------------------------------------------------------------
# blow-ups


@dataclass(frozen=True)
class BlowupSpec:
    """``X_i -> X_j^rho (lam + X_i)``; singular when ``lam == 0``."""

    rho: object
    lam: object = 0
    i: int = 1
    j: int = 0

    def __post_init__(self):
        if real_cmp(self.rho, 0) <= 0:
            raise DomainError("blow-up exponent must be positive")
        if real_cmp(self.lam, 0) < 0:
            raise DomainError("blow-up constant must be nonnegative")
        if self.i == self.j:
            raise ValueError("blow-up needs two distinct variables")

    @property
    def singular(self) -> bool:
        return self.lam == 0

    def apply(self, F: GeneralizedSeries, cap=None) -> GeneralizedSeries:
        if self.singular:
            return blowup_singular(F, self.rho, self.i, self.j)
        if (self.j, self.i) != (F.m - 2, F.m - 1):
            raise ValueError("regular blow-ups act on the last two X variables")
        return blowup_regular(F, self.rho, self.lam, cap)


def blowup_singular(F: GeneralizedSeries, rho, i: int, j: int) -> GeneralizedSeries:
    """``X_i -> X_j^rho X_i``; the cap is unchanged since degrees only grow."""
    if i == j or not (0 <= i < F.m and 0 <= j < F.m):
        raise ValueError(f"bad variable pair ({i}, {j}) for m={F.m}")
    basis = _scaled_basis(F.basis, rho, F, i)
    out = {}
    for (xe, ye), c in F.terms.items():
        xs = [basis.convert(e) for e in xe]
        if any(xs[i].coeffs):
            xs[j] = xs[j] + basis.scale(xs[i], rho)
        out[(tuple(xs), ye)] = c
    return GeneralizedSeries(basis, F.m, F.n, out, F.cap)


def blowup_regular(F: GeneralizedSeries, rho, lam, cap=None) -> GeneralizedSeries:
    """``X_m -> X_{m-1}^rho (lam + Z)`` on the last two X variables.

    The result has ``m - 1`` X variables and ``n + 1`` analytic variables,
    the new ``Z`` being analytic variable 0.  An unknown input term of
    degree ``> cap`` lands in degree ``> min(1, rho) * cap``, which is the
    output cap.  ``cap`` optionally lowers it further; a finite cap is
    needed whenever a non-integer exponent makes the expansion infinite.
    """
    if F.m < 2:
        raise ValueError("regular blow-up needs at least two X variables")
    if real_cmp(lam, 0) <= 0:
        raise DomainError("regular blow-up needs lam > 0")
    basis = _scaled_basis(F.basis, rho, F, F.m - 1)
    cap_out = real_min(_scale_cap(F.cap, rho), INF if cap is None else cap)
    inv_lam = C.reciprocal(lam)
    out: dict = {}
    for (xe, ye), c in F.terms.items():
        xs = [basis.convert(e) for e in xe]
        a = xs[-1]
        head = list(xs[:-2])
        j_exp = xs[-2]
        if any(a.coeffs):
            j_exp = j_exp + basis.scale(a, rho)
        head.append(j_exp)
        key_x = tuple(head)
        base_deg = key_degree((key_x, ye))
        lead = c * C.real_power(lam, a.value)
        a_val = a.value
        integral = _integer_value(a)
        p = 0
        while True:
            if cap_out != INF and real_cmp(base_deg + p, cap_out) > 0:
                break
            if integral and p > int(a_val):
                break
            if cap_out == INF and not integral:
                raise ValueError("non-integer exponent needs a finite cap for the expansion")
            coeff = lead * C.binomial(a_val, p)
            if not C.is_zero(coeff):
                key = (key_x, (p,) + ye)
                out[key] = out.get(key, 0) + coeff
            lead = lead * inv_lam
            p += 1
    return GeneralizedSeries(basis, F.m - 1, F.n + 1, out, cap_out)


# ---------------------------------------------------------------------------
# composition


def gs_compose(F: GeneralizedSeries, G, cap=None) -> GeneralizedSeries:
    """``F(X, G(X, Y))``: substitute ``G[j]`` for ``Y_j``.

    Every ``G[j]`` lives in the target ring ``(m, n')`` and has zero
    constant term.  With ``w`` the least order among the nonzero ``G[j]``
    the result cap is ``min(caps of G, min(1, w) * F.cap)``.
    """
    G = list(G)
    if len(G) != F.n:
        raise ValueError(f"need {F.n} substitutes, got {len(G)}")
    if not G:
        return F if cap is None else F.truncate(cap)
    shapes = {g.shape for g in G}
    if len(shapes) != 1 or next(iter(shapes))[0] != F.m:
        raise ValueError("substitutes must share one shape with F's X variables")
    ops = unify(F, *G)
    F, G = ops[0], ops[1:]
    for j, g in enumerate(G):
        if not C.is_zero(g.constant_term()):
            raise DomainError(f"substitute for Y{j + 1} has a nonzero constant term")
    orders = [g.order() for g in G if not g.is_zero()]
    omega = INF
    for o in orders:
        if omega == INF or real_cmp(o, omega) < 0:
            omega = o
    cap_out = real_min(*[g.cap for g in G], _scale_cap(F.cap, omega),
                       INF if cap is None else cap)
    m, n2 = G[0].shape
    basis = F.basis
    G = [g.truncate(cap_out) for g in G]
    one = GeneralizedSeries.constant(1, basis, m, n2, cap_out)
    powers = [[one] for _ in G]

    def power(j, k):
        while len(powers[j]) <= k:
            powers[j].append(powers[j][-1] * G[j])
        return powers[j][k]

    monos: dict = {}

    def mono(beta):
        if beta not in monos:
            acc = one
            for j, k in enumerate(beta):
                if k:
                    acc = acc * power(j, k)
                    if acc.is_zero():
                        break
            monos[beta] = acc
        return monos[beta]

    out: dict = {}
    zero_y = (0,) * n2
    for (xe, ye), c in F.terms.items():
        if degree_cmp((xe, zero_y), cap_out) > 0:
            continue
        M = mono(ye)
        for (mx, my), mc in M.terms.items():
            key = (tuple(a + b for a, b in zip(xe, mx)), my)
            out[key] = out.get(key, 0) + c * mc
    return GeneralizedSeries(basis, m, n2, out, cap_out)


# ---------------------------------------------------------------------------
# units


def _unit_split(F: GeneralizedSeries, cap):
    c0 = F.constant_term()
    if C.is_zero(c0):
        raise DomainError("series has zero constant term; it is not a unit")
    H = F * C.reciprocal(c0) - 1
    cap = real_min(F.cap, INF if cap is None else cap)
    if cap == INF and not H.is_zero():
        raise ValueError("an infinite expansion needs a finite cap")
    return c0, H.truncate(cap), cap


def _geometric(H: GeneralizedSeries, coeff_of_k, cap):
    """``sum_k coeff_of_k(k) * H^k`` up to ``cap``."""
    total = GeneralizedSeries.constant(coeff_of_k(0), H.basis, H.m, H.n, cap)
    if H.is_zero():
        return total
    omega = H.order()
    power = GeneralizedSeries.constant(1, H.basis, H.m, H.n, cap)
    k = 0
    while True:
        k += 1
        if real_cmp(omega * k, cap) > 0:
            break
        power = power * H
        if power.is_zero():
            break
        total = total + power * coeff_of_k(k)
    return total


def gs_reciprocal(F: GeneralizedSeries, cap=None) -> GeneralizedSeries:
    """``1/F`` as a geometric series in ``1 - F/F(0)``."""
    c0, H, cap = _unit_split(F, cap)
    inv = C.reciprocal(c0)
    return _geometric(-H, lambda k: 1, cap) * inv


def gs_unit_power(F: GeneralizedSeries, e, cap=None) -> GeneralizedSeries:
    """``F**e`` for real ``e`` and ``F(0) > 0`` via the binomial series."""
    c0, H, cap = _unit_split(F, cap)
    if real_cmp(c0, 0) <= 0 and not (is_exact(e) and Fraction(e).denominator == 1):
        raise DomainError("real power needs a positive constant term")
    lead = C.real_power(c0, e) if real_cmp(c0, 0) > 0 else c0 ** int(e)
    return _geometric(H, lambda k: C.binomial(e, k), cap) * lead


# ---------------------------------------------------------------------------
# translation in analytic variables


def gs_translate_y(F: GeneralizedSeries, lam) -> GeneralizedSeries:
    """Shift the last ``len(lam)`` analytic variables: ``Z -> lam + Z``.

    Acts on the stored terms as a polynomial map; the cap is kept.  Above-cap
    terms would feed every degree, so callers needing a certified result
    pass series whose stored terms are complete (``cap = inf``) or accept
    the stored-term semantics.
    """
    lam = list(lam)
    l = len(lam)
    if l > F.n:
        raise ValueError(f"cannot translate {l} of {F.n} analytic variables")
    out: dict = {}
    start = F.n - l
    for (xe, ye), c in F.terms.items():
        partial = {ye[:start]: c}
        for k, s in enumerate(lam):
            b = ye[start + k]
            nxt: dict = {}
            for pre, pc in partial.items():
                for q in range(b + 1):
                    v = pc * _int_binom(b, q) * (s ** (b - q) if b - q else 1)
                    if C.is_zero(v):
                        continue
                    key = pre + (q,)
                    nxt[key] = nxt.get(key, 0) + v
            partial = nxt
        for ys, v in partial.items():
            key = (xe, ys)
            out[key] = out.get(key, 0) + v
    return F.like(out)


def _int_binom(b: int, q: int) -> int:
    from math import comb
    return comb(b, q)


# ---------------------------------------------------------------------------
# Puiseux-type substitution


@dataclass(frozen=True)
class PuiseuxShape:
    """``g(t) = t^rho (lam + h(t))`` split into its parts."""

    rho: object
    lam: object
    h: GeneralizedSeries


def puiseux_shape(g: GeneralizedSeries) -> PuiseuxShape:
    if g.shape != (1, 0):
        raise ValueError("expected a one-variable series in a single X variable")
    if g.is_zero():
        raise DomainError("zero series has no leading term")
    rho_val = g.order()
    rho = next(k[0][0] for k in g.terms if real_cmp(key_degree(k), rho_val) == 0)
    lam = g.coefficient([rho])
    if real_cmp(lam, 0) <= 0:
        raise DomainError("leading coefficient must be positive")
    if real_cmp(rho_val, 0) <= 0:
        raise DomainError("leading exponent must be positive")
    h = gs_truncate_gamma(g, [rho]) - lam
    return PuiseuxShape(rho_val, lam, h)


def gs_subst_puiseux(F: GeneralizedSeries, g: GeneralizedSeries, slot: int,
                     cap=None) -> GeneralizedSeries:
    """``F`` with ``X_slot`` replaced by ``g(t)``; ``t`` takes over the slot.

    ``g = t^rho (lam + h(t))`` with ``lam > 0`` and ``h(0) = 0``.  The
    substitution is a regular blow-up of a dummy variable followed by
    composing the new analytic variable with ``h``.
    """
    if not 0 <= slot < F.m:
        raise IndexError(f"X slot {slot} out of range for m={F.m}")
    F, g = unify(F, g)
    shape = puiseux_shape(g)
    if shape.h.is_zero():
        return _subst_power(F, shape, slot, cap)
    m, n = F.m, F.n
    order = [i for i in range(m) if i != slot] + [slot]
    moved = insert_x(permute_x(F, order), m - 1)
    # expand the known terms deep enough that h^p stays visible up to cap;
    # unknown terms of F are accounted for separately below
    omega = shape.h.order()
    work = cap
    if cap is not None and cap != INF and real_cmp(omega, 1) < 0:
        if is_exact(cap) and is_exact(omega):
            work = cap * C.reciprocal(omega)
        else:
            work = float(cap) / float(omega)
    blown = blowup_regular(moved.with_cap(INF), shape.rho, shape.lam, work)
    blown, h = unify(blown, shape.h)
    # lift h(t) into the ring with t in the last X slot
    zero = blown.basis.zero()
    lift = {((zero,) * (m - 1) + xe, (0,) * n): c for (xe, _), c in h.terms.items()}
    # the tail of h only disturbs terms that carry the new analytic variable
    h_lift = GeneralizedSeries(blown.basis, m, n, lift, INF)
    subs = [h_lift] + [GeneralizedSeries.y_var(j, blown.basis, m, n) for j in range(n)]
    composed = gs_compose(blown, subs, cap)
    composed = composed.truncate(_scale_cap(F.cap, shape.rho))
    if h.cap != INF:
        carriers = [_plus(key_degree(key), -key[1][0]) for key in blown.terms if key[1][0]]
        if carriers:
            composed = composed.truncate(_plus(h.cap, real_min(*carriers)))
    back = list(range(m))
    back.insert(slot, back.pop())
    return permute_x(composed, back)


def _subst_power(F: GeneralizedSeries, shape: PuiseuxShape, slot: int, cap):
    """``X_slot -> lam t^rho`` with no correction term: exponents are rescaled."""
    rho, lam = shape.rho, shape.lam
    basis = _scaled_basis(F.basis, rho, F, slot)
    out: dict = {}
    carriers = []
    for (xe, ye), c in F.terms.items():
        xs = [basis.convert(e) for e in xe]
        a = xs[slot]
        if any(a.coeffs):
            xs[slot] = basis.scale(a, rho)
            carriers.append(key_degree((tuple(xs), ye)))
        key = (tuple(xs), ye)
        out[key] = out.get(key, 0) + c * C.real_power(lam, a.value)
    cap_out = real_min(_scale_cap(F.cap, rho), INF if cap is None else cap)
    if shape.h.cap != INF and carriers:
        cap_out = real_min(cap_out, _plus(shape.h.cap, real_min(*carriers)))
    return GeneralizedSeries(basis, F.m, F.n, out, cap_out)


# ---------------------------------------------------------------------------
# compositional inverse


def _shift_x(F: GeneralizedSeries, e: MonoidExponent, cap) -> GeneralizedSeries:
    """``X^e * F`` for a one-X-variable ``F`` with the given cap."""
    out = {((xe[0] + e,) + xe[1:], ye): c for (xe, ye), c in F.terms.items()}
    return F.like(out, cap=cap)


def _with_value(basis: GeneratorBasis, value) -> GeneratorBasis:
    if basis.exact and is_exact(value) and not basis.contains(value):
        return basis.extended_by([value])
    return basis


def _exp_for(basis: GeneratorBasis, value) -> MonoidExponent:
    if basis.exact:
        return basis.from_value(value)
    return basis.scale(basis.exponent(1), value)


def _reciprocal_value(basis: GeneratorBasis, v):
    return C.reciprocal(v) if is_exact(v) else basis._mpf(1) / basis._mpf(v)


def _plus(a, b):
    if a == INF or b == INF:
        return INF
    if is_exact(a) and is_exact(b):
        return a + b
    return float(a) + float(b)


def _inverse_work_cap(shape: PuiseuxShape, rho, cap):
    """Blow-up cap so that substituting the tail still leaves ``cap`` certified."""
    omega = INF if shape.h.is_zero() else shape.h.order()
    if omega != INF:
        omega = omega * rho if is_exact(omega) and is_exact(rho) else float(omega) * float(rho)
    if omega == INF or real_cmp(omega, 1) >= 0:
        return cap
    return cap / omega if is_exact(cap) and is_exact(omega) else float(cap) / float(omega)


def gs_comp_inverse(f: GeneralizedSeries, cap, method: str = "newton") -> GeneralizedSeries:
    """``g`` with ``f(g(T)) = T`` up to ``cap`` (the cap of ``g``).

    ``f = t^alpha (lam_f + h)`` with ``lam_f > 0``; then
    ``g = T^(1/alpha) (c + psi(T))`` with ``c = lam_f^(-1/alpha)``.

    ``method="newton"`` blows up ``f(T^(1/alpha) (c + Y))``, divides by
    ``T`` and solves ``phi(T, Y) = 1`` with :func:`implicit_solve`.
    ``method="fixed_point"`` iterates ``g <- g * (T / f(g))^(1/alpha)``
    using Puiseux substitution and unit powers only.
    """
    if cap == INF:
        raise ValueError("the inverse needs a finite cap")
    shape = puiseux_shape(f)
    alpha, lam_f = shape.rho, shape.lam
    rho = _reciprocal_value(f.basis, alpha)
    c = C.real_power(C.reciprocal(lam_f), rho)
    if method == "newton":
        return _inverse_newton(f, shape, rho, c, cap)
    if method == "fixed_point":
        return _inverse_fixed_point(f, shape, rho, c, cap)
    raise ValueError(f"unknown method {method!r}")


def _inverse_newton(f, shape, rho, c, cap):
    from .weierstrass import implicit_solve

    target = _plus(cap, -rho if is_exact(rho) else -float(rho))
    work = _inverse_work_cap(shape, rho, target)
    blown = blowup_regular(insert_x(f, 0), rho, c, _plus(work, 1))
    phi = gs_truncate_gamma(blown, [blown.basis.exponent(1)])
    # phi(0) = c^alpha lam_f = 1, up to rounding when c is irrational
    one = phi.constant_term()
    if abs(float(one) - 1.0) > 1e-9:
        raise ArithmeticError(f"normalisation failed: phi(0) = {one}")
    psi = implicit_solve(phi - one, cap=target)
    if real_cmp(psi.cap, target) < 0:
        raise ArithmeticError(f"inverse tail certified only to {psi.cap}")
    psi = psi.truncate(target)
    basis = _with_value(psi.basis, rho)
    psi = psi.with_basis(basis)
    return _shift_x(psi + c, _exp_for(psi.basis, rho), cap)


def _inverse_fixed_point(f, shape, rho, c, cap, max_iter: int = 200):
    basis = _with_value(_scaled_basis(f.basis, rho, f, 0), rho)
    g = GeneralizedSeries.monomial(basis, 1, 0, [_exp_for(basis, rho)], (), c)
    work = _inverse_work_cap(shape, rho, _plus(cap, 1))
    neg_rho = -rho
    for _ in range(max_iter):
        # g is kept as a polynomial so the substitution is not cut back by its cap
        fg = gs_subst_puiseux(f, g, 0, work).truncate(_plus(cap, 1))
        ratio = gs_truncate_gamma(fg, [fg.basis.exponent(1)])
        factor = gs_unit_power(ratio, neg_rho, cap)
        if g.basis is not factor.basis:
            g, factor = unify(g, factor)
        g_new = (g.with_cap(cap) * factor).with_cap(INF)
        if g_new.terms == g.terms:
            return g_new.with_cap(cap)
        if not is_exact(c) and g_new.same_terms(g, tol=1e-15 * g.max_magnitude()):
            return g_new.with_cap(cap)
        g = g_new
    raise ArithmeticError("fixed-point inverse did not stabilise")
