"""Polynomials in the parameters ``mu`` with exact or float coefficients."""

from __future__ import annotations

from .. import coeffs as C
from ..quadratic import is_exact


class MuPoly:
    """Immutable ``{exponent tuple: coefficient}`` polynomial in ``p`` parameters."""

    __slots__ = ("p", "terms")

    def __init__(self, terms=None, p: int = 0):
        out = {}
        for k, c in (terms or {}).items():
            k = tuple(int(e) for e in k)
            if len(k) != p:
                raise ValueError(f"monomial {k} does not have {p} exponents")
            if not C.is_zero(c):
                out[k] = out.get(k, 0) + c
        self.p = p
        self.terms = {k: c for k, c in out.items() if not C.is_zero(c)}

    @classmethod
    def const(cls, c, p: int = 0) -> "MuPoly":
        return cls({(0,) * p: c}, p)

    @classmethod
    def var(cls, i: int, p: int) -> "MuPoly":
        k = [0] * p
        k[i] = 1
        return cls({tuple(k): 1}, p)

    @classmethod
    def coerce(cls, x, p: int) -> "MuPoly":
        if isinstance(x, MuPoly):
            if x.p != p:
                raise ValueError(f"parameter count {x.p} != {p}")
            return x
        return cls.const(x, p)

    def _lift(self, other):
        if isinstance(other, MuPoly):
            if other.p != self.p:
                raise ValueError("parameter counts differ")
            return other
        return MuPoly.const(other, self.p)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return MuPoly(out, self.p)

    __radd__ = __add__

    def __neg__(self):
        return MuPoly({k: -c for k, c in self.terms.items()}, self.p)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, MuPoly):
            if C.is_zero(other):
                return MuPoly({}, self.p)
            return MuPoly({k: c * other for k, c in self.terms.items()}, self.p)
        other = self._lift(other)
        out: dict = {}
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                k = tuple(a + b for a, b in zip(ka, kb))
                out[k] = out.get(k, 0) + ca * cb
        return MuPoly(out, self.p)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * C.reciprocal(scalar)

    def __eq__(self, other):
        if isinstance(other, MuPoly):
            return self.p == other.p and self.terms == other.terms
        if C.is_zero(other):
            return not self.terms
        return self.terms == {(0,) * self.p: other}

    def __hash__(self):
        return hash((self.p, frozenset(self.terms.items())))

    def is_constant(self) -> bool:
        return all(not any(k) for k in self.terms)

    def constant(self):
        return self.terms.get((0,) * self.p, 0)

    def __call__(self, mu=()):
        mu = tuple(mu)
        if len(mu) != self.p:
            raise ValueError(f"expected {self.p} parameter values")
        total = 0
        for k, c in self.terms.items():
            t = c
            for m, e in zip(mu, k):
                if e:
                    t = t * m ** e
            total = total + t
        return total

    def magnitude(self) -> float:
        return max((abs(float(c)) for c in self.terms.values()), default=0.0)

    def __float__(self):
        if not self.is_constant():
            raise TypeError("parameter polynomial is not constant")
        return float(self.constant())

    def exact(self) -> bool:
        return all(is_exact(c) for c in self.terms.values())

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, c in sorted(self.terms.items()):
            mono = "*".join(f"mu{i + 1}^{e}" if e > 1 else f"mu{i + 1}"
                            for i, e in enumerate(k) if e)
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts)
