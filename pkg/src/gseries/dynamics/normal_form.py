"""Degree-by-degree linearisation of a non-resonant saddle.

After dividing time by the unstable eigenvalue the field reads
``x' = x + f``, ``y' = -lam*y + g``.  We look for ``u = x + phi``,
``v = y + psi`` with ``u' = u`` and ``v' = -lam*v`` up to degree ``2N``.
Every monomial is non-resonant when ``lam`` is irrational, so the
homological equations

    x phi_x - lam y phi_y - phi        = -f - phi_x f - phi_y g
    x psi_x - lam y psi_y + lam psi    = -g - psi_x f - psi_y g

are solved one total degree at a time.  The monomial ``x^p y^q`` has
divisor ``p - q lam - 1`` in the first and ``p - (q - 1) lam`` in the
second equation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .. import coeffs as C
from ..monoid import DomainError
from . import poly2
from .field import SaddleSpec
from .mupoly import MuPoly

DEFAULT_DIVISOR_FLOOR = 1e-8


class SmallDivisor(DomainError):
    def __init__(self, p: int, q: int, divisor):
        super().__init__(f"homological divisor {float(divisor):.3e} at monomial x^{p} y^{q}")
        self.p = p
        self.q = q
        self.divisor = divisor


@dataclass(frozen=True, eq=False)
class NormalFormResult:
    saddle: SaddleSpec
    N: int
    u: dict
    v: dict
    remainder_u: dict
    remainder_v: dict
    divisor_floor: float

    @property
    def degree(self) -> int:
        return 2 * self.N

    def at(self, mu=()) -> tuple[dict, dict]:
        mu = tuple(mu)
        return (poly2.map_coeffs(self.u, lambda c: c(mu)),
                poly2.map_coeffs(self.v, lambda c: c(mu)))

    def evaluate(self, x: float, y: float, mu=()) -> tuple[float, float]:
        U, V = self.at(mu)
        return poly2.evaluate(U, x, y), poly2.evaluate(V, x, y)

    def is_identity(self) -> bool:
        return self.u == {(1, 0): MuPoly.const(1, self.saddle.field.p)} and \
            self.v == {(0, 1): MuPoly.const(1, self.saddle.field.p)}


def rescaled_nonlinear_parts(saddle: SaddleSpec):
    """``(f, g, lam)``: nonlinear parts after dividing time by ``lam1``."""
    if not saddle.diagonal:
        raise DomainError("normalisation needs a diagonal linear part; rotate coordinates first")
    fld = saddle.field
    inv = C.reciprocal(saddle.lam1)
    f = {k: c * inv for k, c in fld.P.items() if sum(k) >= 2}
    g = {k: c * inv for k, c in fld.Q.items() if sum(k) >= 2}
    return f, g, saddle.ratio


def _solve_degree(rhs: dict, k: int, divisor, floor: float) -> dict:
    out = {}
    for (p, q), c in poly2.degree_part(rhs, k).items():
        d = divisor(p, q)
        if abs(C.to_float(d)) < floor:
            raise SmallDivisor(p, q, d)
        out[(p, q)] = c * C.reciprocal(d)
    return out


def _residual(w: dict, f: dict, g: dict, own: dict, max_degree: int) -> dict:
    """``own + w_x f + w_y g`` truncated at ``max_degree``."""
    r = dict(own)
    r = poly2.add(r, poly2.mul(poly2.dx(w), f, max_degree))
    r = poly2.add(r, poly2.mul(poly2.dy(w), g, max_degree))
    return poly2.truncate(r, max_degree)


def normal_form(saddle: SaddleSpec, N: int,
                divisor_floor: float = DEFAULT_DIVISOR_FLOOR) -> NormalFormResult:
    if N < 1:
        raise ValueError("N must be at least 1")
    f, g, lam = rescaled_nonlinear_parts(saddle)
    p = saddle.field.p
    top = 2 * N

    def div_u(a, b):
        return a - b * lam - 1

    def div_v(a, b):
        return a - (b - 1) * lam

    phi: dict = {}
    psi: dict = {}
    for k in range(2, top + 1):
        rhs_u = _residual(phi, f, g, f, k)
        rhs_v = _residual(psi, f, g, g, k)
        phi.update({key: -c for key, c in _solve_degree(rhs_u, k, div_u, divisor_floor).items()})
        psi.update({key: -c for key, c in _solve_degree(rhs_v, k, div_v, divisor_floor).items()})
    phi = {k: c for k, c in phi.items() if c != 0}
    psi = {k: c for k, c in psi.items() if c != 0}
    rem_u = poly2.degree_part(_residual(phi, f, g, f, top + 1), top + 1)
    rem_v = poly2.degree_part(_residual(psi, f, g, g, top + 1), top + 1)
    one = MuPoly.const(1, p)
    u = poly2.add({(1, 0): one}, phi)
    v = poly2.add({(0, 1): one}, psi)
    floor = saddle.divisor_floor(N)
    return NormalFormResult(saddle, N, u, v, rem_u, rem_v, floor)


def conjugacy_defect(nf: NormalFormResult, x: float, y: float, mu=()) -> tuple[float, float]:
    """``(u' - u, v' + lam v)`` at a point, in rescaled time."""
    f, g, lam = rescaled_nonlinear_parts(nf.saddle)
    mu = tuple(mu)
    fx = poly2.evaluate(poly2.map_coeffs(f, lambda c: c(mu)), x, y)
    gy = poly2.evaluate(poly2.map_coeffs(g, lambda c: c(mu)), x, y)
    U, V = nf.at(mu)
    xd, yd = x + fx, -float(lam) * y + gy
    out = []
    for W, target in ((U, 1.0), (V, -float(lam))):
        dot = poly2.evaluate(poly2.dx(W), x, y) * xd + poly2.evaluate(poly2.dy(W), x, y) * yd
        out.append(dot - target * poly2.evaluate(W, x, y))
    return out[0], out[1]
