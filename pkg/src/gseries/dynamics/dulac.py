"""Dulac series of a saddle passage and their numerical verification.

In linearising coordinates ``(u, v)`` the quantity ``u^lam v`` is a first
integral, so the passage satisfies

    E(s) = u_out(s)^lam v_out(s) = u_in(t)^lam v_in(t) = I(t)

where ``(u_in, v_in)`` and ``(u_out, v_out)`` are the linearising change
restricted to the entry and exit sections (charts measured from the
separatrix crossings).  ``E`` is analytic with a simple zero, hence
``g = E^{-1} o I`` with ``I = t^lam (c + h(t))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field, replace

import numpy as np

from .. import coeffs as C
from ..monoid import DomainError, GeneratorBasis
from ..quadratic import QuadIrrational, is_exact
from ..series import INF, GeneralizedSeries, gs_mul_sharp
from ..transform import gs_comp_inverse, gs_compose, gs_unit_power
from . import poly2
from .field import SaddleSpec, SectionPair
from .normal_form import NormalFormResult, normal_form
from .transition import TransitionMap

CHART_TOLERANCE = 1e-10
CHART_DEGREES = (8, 12, 16, 20, 24, 32)


class SectionsOutsideChart(DomainError):
    pass


def ratio_basis(ratios) -> GeneratorBasis:
    """Basis ``<1, lam_1, ..., lam_k>`` with duplicate ratios merged."""
    gens: list = []
    for r in ratios:
        if all((g != r) if is_exact(g) and is_exact(r) else abs(float(g) - float(r)) > 1e-15
               for g in gens):
            gens.append(r)
    names = ["r"] if len(gens) == 1 else [f"r{i + 1}" for i in range(len(gens))]
    return GeneratorBasis([1] + gens, ["1"] + names)


@dataclass(frozen=True, eq=False)
class DulacExpansion:
    series: GeneralizedSeries
    nu: object
    N: int
    ratio: object
    mu: tuple = ()
    entry_anchor: object = 0
    exit_anchor: object = 0
    normal_form: NormalFormResult | None = dc_field(default=None, repr=False)

    def terms(self, nu=None) -> list:
        """``[(exponent, coefficient)]`` by increasing exponent, up to ``nu``."""
        out = []
        for (xe, _), c in self.series.sorted_terms():
            e = xe[0]
            if nu is not None and float(e) > float(nu) + 1e-12:
                continue
            out.append((e, c))
        return out

    def certified_terms(self) -> list:
        return self.terms(self.nu)

    def coefficient(self, exponent_value):
        for e, c in self.terms():
            if abs(float(e) - float(exponent_value)) < 1e-12:
                return c
        return 0

    def evaluate(self, t, nu=None):
        t = np.asarray(t, dtype=float)
        total = np.zeros_like(t)
        for e, c in self.terms(nu):
            total = total + float(c) * t ** float(e)
        return total

    def leading(self):
        return self.terms()[0]


def _translate_x(P: dict, y, shift) -> dict:
    return poly2.translate(poly2.univariate_in_x(P, y), shift)


def _translate_y(P: dict, x, shift) -> dict:
    return poly2.translate(poly2.univariate_in_y(P, x), shift)


def _univariate_root(coeffs: dict):
    """Root near 0, exact when it is zero or the polynomial is linear."""
    coeffs = {k: c for k, c in coeffs.items() if not C.is_zero(c)}
    if not coeffs.get(0, 0):
        return 0
    if set(coeffs) <= {0, 1} and 1 in coeffs and all(is_exact(c) for c in coeffs.values()):
        return -coeffs[0] * C.reciprocal(coeffs[1])
    from .transition import _newton_root
    return _newton_root(coeffs)


def _sections_value(x):
    if isinstance(x, (int, QuadIrrational)) or is_exact(x):
        return x
    f = float(x)
    return int(f) if f.is_integer() else f


def _series_x(basis, coeffs: dict, cap) -> GeneralizedSeries:
    terms = {((basis.exponent(k),), ()): c for k, c in coeffs.items() if not C.is_zero(c)}
    return GeneralizedSeries(basis, 1, 0, terms, cap)


def _check_chart(nf: NormalFormResult, mu, points) -> None:
    U, V = nf.at(mu)
    top = 2 * nf.N
    for W in (U, V):
        for x, y in points:
            size = max(abs(poly2.evaluate(W, x, y)), 1.0)
            for k in (top - 1, top) if top > 2 else (top,):
                part = poly2.degree_part(W, k)
                if part and abs(poly2.evaluate(part, x, y)) > CHART_TOLERANCE * size:
                    raise SectionsOutsideChart(
                        f"degree-{k} part of the linearising change is not small at ({x}, {y}); "
                        "raise chart_degree or move the sections closer to the saddle")


def dulac_series(saddle: SaddleSpec, N: int, sections: SectionPair, mu=(), nu=None,
                 basis: GeneratorBasis | None = None, extra=1,
                 chart_degree: int | None = None) -> DulacExpansion:
    """Dulac series certified up to ``N (1 + min(lam, 1))``.

    Terms up to ``extra`` beyond the certified order are kept but are not
    certified.  The section maps use the linearising change to degree
    ``chart_degree``; by default the degree is raised from ``2N`` until its
    highest parts are negligible at the sections.
    """
    mu = tuple(mu)
    if basis is None:
        basis = ratio_basis([saddle.ratio])
    lam = saddle.ratio
    cert = saddle.certified_order(N)
    floaty = not basis.exact
    if floaty:
        lam, cert = float(lam), float(cert)
    if nu is not None and float(nu) > float(cert) + 1e-12:
        raise DomainError(f"N = {N} certifies exponents up to {float(cert):.6g} < nu = {nu}")
    x0, y0 = _sections_value(sections.x0), _sections_value(sections.y0)
    if chart_degree is None:
        degrees = [2 * N] + [d for d in CHART_DEGREES if d > 2 * N]
    else:
        degrees = [max(2 * N, chart_degree)]
    for k, degree in enumerate(degrees):
        nf = normal_form(saddle, -(-degree // 2))
        U, V = nf.at(mu)
        if floaty:
            U, V = (poly2.map_coeffs(W, float) for W in (U, V))
        x_star = _univariate_root(poly2.univariate_in_x(U, y0))
        y_star = _univariate_root(poly2.univariate_in_y(V, x0))
        try:
            _check_chart(nf, mu, [(float(x_star), float(y0)), (float(x0), float(y_star))])
            break
        except SectionsOutsideChart:
            if k == len(degrees) - 1:
                raise

    u_in = _translate_x(U, y0, x_star)
    v_in = _translate_x(V, y0, x_star)
    u_out = _translate_y(U, x0, y_star)
    v_out = _translate_y(V, x0, y_star)
    u_in.pop(0, None)
    v_out.pop(0, None)
    a1 = u_in.get(1, 0)
    v0 = v_in.get(0, 0)
    u0 = u_out.get(0, 0)
    b1 = v_out.get(1, 0)
    for name, val in (("du/dt on entry", a1), ("v on entry", v0),
                      ("u on exit", u0), ("dv/ds on exit", b1)):
        if not C.to_float(val) > 0:
            raise SectionsOutsideChart(f"{name} must be positive, got {float(val)!r}")

    cap = cert + extra
    lam_e = basis.from_value(saddle.ratio)

    # I(t) = a1^lam t^lam (u_in/(a1 t))^lam v_in(t)
    rest = cap - lam
    inner = _series_x(basis, {k - 1: c * C.reciprocal(a1) for k, c in u_in.items()}, rest)
    powered = gs_unit_power(inner, lam, rest)
    body = gs_mul_sharp(powered, _series_x(basis, v_in, INF))
    lead = C.real_power(a1, lam)
    I = GeneralizedSeries.monomial(basis, 1, 0, (lam_e,), (), lead)
    I = gs_mul_sharp(I, body).truncate(cap)

    # E(s) = u0^lam (u_out/u0)^lam v_out(s), inverted to the degrees that matter
    degree = int(math.floor(float(cap) / float(lam))) + 1
    unit = _series_x(basis, {k: c * C.reciprocal(u0) for k, c in u_out.items()}, degree + 1)
    E = gs_mul_sharp(gs_unit_power(unit, lam, degree + 1),
                     _series_x(basis, v_out, INF)) * C.real_power(u0, lam)
    E = E.truncate(degree + 1)
    Einv = gs_comp_inverse(E, degree)
    # keep stored terms as a polynomial in Y; dropped degrees exceed the cap
    yterms = {((Einv.basis.zero(),), (int(float(xe[0]) + 0.5),)): c
              for (xe, _), c in Einv.terms.items() if float(xe[0]) <= degree}
    Finv = GeneralizedSeries(Einv.basis, 1, 1, yterms, INF)
    g = gs_compose(Finv, [I], cap).truncate(cap)
    (lead_x, _), lead_c = g.sorted_terms()[0]
    lead_e = lead_x[0]
    if abs(float(lead_e) - float(lam)) > 1e-12 or not C.to_float(lead_c) > 0:
        raise ArithmeticError("Dulac series lost its leading term")
    return DulacExpansion(g, cert, N, lam, mu, x_star, y_star, nf)


def inject_fault(expansion: DulacExpansion, exponent, delta) -> DulacExpansion:
    """Copy with ``delta`` added to the coefficient of ``t^exponent``."""
    S = expansion.series
    basis = S.basis
    if basis.exact and not is_exact(exponent):
        raise DomainError(f"exact basis needs an exact exponent, got {exponent!r}")
    e = basis.from_value(exponent) if basis.exact else basis.scale(basis.exponent(1), exponent)
    bump = GeneralizedSeries.monomial(basis, 1, 0, (e,), (), delta, S.cap)
    return replace(expansion, series=S + bump)


def default_margin(ratio) -> float:
    return 0.25 * min(float(ratio), 1.0)


def default_grid(lo: float = 1e-3, hi: float = 1e-1, per_decade: int = 40) -> np.ndarray:
    decades = math.log10(hi / lo)
    return np.geomspace(lo, hi, int(round(decades * per_decade)) + 1)


@dataclass(frozen=True, eq=False)
class VerificationReport:
    t: np.ndarray
    numeric: np.ndarray
    series: np.ndarray
    residual: np.ndarray
    nu: float
    margin: float
    slope: float | None
    intercept: float | None
    monotone: bool
    noise_floor: bool
    passed: bool

    @property
    def threshold(self) -> float:
        return self.nu + self.margin

    def rows(self):
        return list(zip(self.t, self.numeric, self.series, self.residual))

    def summary(self) -> dict:
        return {"nu": self.nu, "margin": self.margin, "threshold": self.threshold,
                "slope": self.slope, "intercept": self.intercept, "monotone": self.monotone,
                "noise_floor": self.noise_floor, "passed": self.passed,
                "points": int(len(self.t))}


def fit_slope(t, r) -> tuple[float, float]:
    lt, lr = np.log(np.asarray(t, float)), np.log(np.asarray(r, float))
    slope, intercept = np.polyfit(lt, lr, 1)
    return float(slope), float(intercept)


def verify_asymptotics(saddle: SaddleSpec, expansion: DulacExpansion, nu, grid=None,
                       tol: float = 1e-13, sections: SectionPair | None = None,
                       margin: float | None = None, mu=None,
                       transition: TransitionMap | None = None) -> VerificationReport:
    nu = float(nu)
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if margin is None:
        margin = default_margin(saddle.ratio)
    mu = expansion.mu if mu is None else tuple(mu)
    tm = transition or TransitionMap(saddle, sections or SectionPair(), mu, tol)
    numeric = np.empty_like(grid)
    for k, t in enumerate(grid):
        try:
            numeric[k] = tm(float(t))
        except (ArithmeticError, DomainError) as err:
            raise type(err)(f"{err} at t = {t!r}") from err
    series = expansion.evaluate(grid, nu)
    residual = np.abs(numeric - series)
    floor = 20.0 * tm.tol * (np.abs(numeric) + abs(float(tm.y_star)))
    above = residual > floor
    if not above.any():
        return VerificationReport(grid, numeric, series, residual, nu, margin, None, None,
                                  True, True, True)
    clipped = np.maximum(residual, floor)
    slope, intercept = fit_slope(grid, clipped)
    order = np.argsort(grid)
    low = clipped[order][: max(2, len(grid) // 2)]
    monotone = bool(np.all(np.diff(low) >= 0))
    passed = slope >= nu + margin and monotone
    return VerificationReport(grid, numeric, series, residual, nu, margin, slope, intercept,
                              monotone, False, passed)
