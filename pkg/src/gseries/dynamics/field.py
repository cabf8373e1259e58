"""Planar analytic vector fields, saddle analysis, sections and domains."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .. import coeffs as C
from ..monoid import DomainError
from ..quadratic import is_exact
from . import poly2
from .mupoly import MuPoly


class NotHyperbolic(DomainError):
    pass


class ResonantWithinTolerance(DomainError):
    def __init__(self, ratio: float, p: int, q: int):
        super().__init__(f"eigenvalue ratio {ratio!r} lies within tolerance of {p}/{q}")
        self.ratio = ratio
        self.p = p
        self.q = q


class PlanarAnalyticField:
    """``x' = P(x, y; mu)``, ``y' = Q(x, y; mu)`` with polynomial components.

    ``P`` and ``Q`` map ``(i, j)`` to a coefficient (number or
    :class:`MuPoly` in ``p`` parameters).
    """

    def __init__(self, P: dict, Q: dict, p: int = 0):
        self.p = p
        self.P = {tuple(k): MuPoly.coerce(c, p) for k, c in P.items()}
        self.Q = {tuple(k): MuPoly.coerce(c, p) for k, c in Q.items()}
        self.P = {k: c for k, c in self.P.items() if c != 0}
        self.Q = {k: c for k, c in self.Q.items() if c != 0}
        for comp in (self.P, self.Q):
            for k in comp:
                if len(k) != 2 or min(k) < 0:
                    raise ValueError(f"bad monomial {k}")
        if (0, 0) in self.P or (0, 0) in self.Q:
            raise DomainError("the origin must be a singular point for every parameter")

    def at(self, mu=()) -> tuple[dict, dict]:
        """Coefficient dicts with the parameters substituted."""
        mu = tuple(mu)
        P = poly2.map_coeffs(self.P, lambda c: c(mu))
        Q = poly2.map_coeffs(self.Q, lambda c: c(mu))
        return P, Q

    def numeric(self, mu=()):
        """Fast float evaluator ``(x, y) -> (P, Q)``."""
        P, Q = self.at(mu)
        pk = [(i, j, float(c)) for (i, j), c in P.items()]
        qk = [(i, j, float(c)) for (i, j), c in Q.items()]

        def rhs(x, y):
            return (sum(c * x ** i * y ** j for i, j, c in pk),
                    sum(c * x ** i * y ** j for i, j, c in qk))
        return rhs

    def linear_part(self):
        """``[[P_x, P_y], [Q_x, Q_y]]`` at the origin (parameter independent)."""
        out = []
        for comp in (self.P, self.Q):
            row = []
            for k in ((1, 0), (0, 1)):
                c = comp.get(k, MuPoly({}, self.p))
                if not c.is_constant():
                    raise DomainError("the linear part must not depend on the parameters")
                row.append(c.constant())
            out.append(row)
        return out

    def degree(self) -> int:
        return max((sum(k) for k in list(self.P) + list(self.Q)), default=0)

    def __repr__(self):
        return f"PlanarAnalyticField(P={self.P}, Q={self.Q}, p={self.p})"


def _exact_eigenvalues(A):
    (a, b), (c, d) = A
    if all(is_exact(v) for v in (a, b, c, d)) and (C.is_zero(b) or C.is_zero(c)):
        return a, d
    return None


@dataclass(frozen=True, eq=False)
class SaddleSpec:
    field: PlanarAnalyticField
    lam1: object
    lam2: object
    ratio: object
    diagonal: bool
    tolerance: float = 1e-9
    q_max: int = 50

    @property
    def ratio_float(self) -> float:
        return float(self.ratio)

    def divisor_floor(self, N: int) -> float:
        """Smallest homological divisor over monomials of degree 2..2N."""
        lam = self.ratio_float
        best = math.inf
        for deg in range(2, 2 * N + 1):
            for p in range(deg + 1):
                q = deg - p
                best = min(best, abs(p - q * lam - 1), abs(p - (q - 1) * lam))
        return best

    def certified_order(self, N: int):
        """``N (1 + min(lam, 1))``."""
        lam = self.ratio
        m = lam if C.to_float(lam) < 1 else 1
        return N * (1 + m)


def analyze_saddle(field: PlanarAnalyticField, tolerance: float = 1e-9,
                   q_max: int = 50) -> SaddleSpec:
    A = field.linear_part()
    exact = _exact_eigenvalues(A)
    if exact is not None:
        ev = list(exact)
    else:
        vals = np.linalg.eigvals(np.array([[float(v) for v in row] for row in A]))
        if np.max(np.abs(vals.imag)) > 1e-12 * max(1.0, np.max(np.abs(vals))):
            raise NotHyperbolic(f"complex eigenvalues {vals}")
        ev = [float(v) for v in vals.real]
    fl = [C.to_float(v) for v in ev]
    scale = max(abs(v) for v in fl)
    if scale == 0 or min(abs(v) for v in fl) <= 1e-12 * scale:
        raise NotHyperbolic(f"zero eigenvalue in {fl}")
    if fl[0] * fl[1] > 0:
        raise NotHyperbolic(f"eigenvalues {fl} have the same sign")
    lam1, lam2 = (ev[0], ev[1]) if fl[0] > 0 else (ev[1], ev[0])
    ratio = -lam2 / lam1 if is_exact(lam1) and is_exact(lam2) else -float(lam2) / float(lam1)
    r = C.to_float(ratio)
    if isinstance(ratio, (int, Fraction)) and Fraction(ratio).denominator <= q_max:
        fr = Fraction(ratio)
        raise ResonantWithinTolerance(r, fr.numerator, fr.denominator)
    for q in range(1, q_max + 1):
        p = round(r * q)
        if abs(r - p / q) < tolerance:
            g = math.gcd(p, q)
            raise ResonantWithinTolerance(r, p // g, q // g)
    (a, b), (c, d) = A
    diagonal = C.is_zero(b) and C.is_zero(c)
    return SaddleSpec(field, lam1, lam2, ratio, diagonal, tolerance, q_max)


@dataclass(frozen=True)
class QuadraticDomain:
    c: float
    C: float

    def __post_init__(self):
        if not (self.c > 0 and self.C > 0):
            raise ValueError("quadratic domain constants must be positive")

    def contains(self, r: float, phi: float) -> bool:
        return 0 < r < self.c * math.exp(-self.C * math.sqrt(abs(phi)))


def quadratic_domain_contains(W: QuadraticDomain, r: float, phi: float) -> bool:
    return W.contains(r, phi)


@dataclass(frozen=True)
class SectionPair:
    """Entry ``{y = y0, 0 < x < eps}`` and exit ``{x = x0, 0 < y < eps}``."""

    x0: float = 1.0
    y0: float = 1.0
    eps: float = 0.5

    def __post_init__(self):
        if not (self.x0 > 0 and self.y0 > 0 and self.eps > 0):
            raise ValueError("section data must be positive")

    def check_transverse(self, field: PlanarAnalyticField, mu=(), samples: int = 32,
                         floor: float = 1e-8) -> None:
        """Raise if the normal component vanishes somewhere on a section."""
        rhs = field.numeric(mu)
        for k in range(1, samples + 1):
            s = self.eps * k / (samples + 1)
            if abs(rhs(s, float(self.y0))[1]) < floor:
                raise DomainError(f"entry section not transverse at x = {s}")
            if abs(rhs(float(self.x0), s)[0]) < floor:
                raise DomainError(f"exit section not transverse at y = {s}")
