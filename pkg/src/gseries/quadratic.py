"""Exact arithmetic in real quadratic fields Q(sqrt(d)).

Elements are ``a + b*sqrt(d)`` with rational ``a``, ``b`` and a squarefree
``d > 1``.  Whenever ``b`` becomes zero the operations return a plain
:class:`fractions.Fraction`, so rational values never carry a radical tag.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational


def _squarefree_part(d: int) -> tuple[int, int]:
    """Return ``(s, k)`` with ``d = k**2 * s`` and ``s`` squarefree."""
    if d <= 0:
        raise ValueError(f"radicand must be positive, got {d}")
    k = 1
    s = d
    p = 2
    while p * p <= s:
        while s % (p * p) == 0:
            s //= p * p
            k *= p
        p += 1
    return s, k


class QuadIrrational:
    """``a + b*sqrt(d)`` with ``b != 0``; use :func:`qsqrt` to build one."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = int(d)

    @staticmethod
    def make(a, b, d: int):
        a, b = Fraction(a), Fraction(b)
        if b == 0 or d == 1:
            return a + b if d == 1 else a
        return QuadIrrational(a, b, d)

    def _coerce(self, other):
        if isinstance(other, QuadIrrational):
            if other.d != self.d:
                raise ValueError(
                    f"cannot mix sqrt({self.d}) and sqrt({other.d}) exactly")
            return other.a, other.b
        if isinstance(other, (int, Fraction)) or isinstance(other, Rational):
            return Fraction(other), Fraction(0)
        return None

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, float):
            return float(self) + other
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return QuadIrrational.make(self.a + c[0], self.b + c[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadIrrational(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, float):
            return float(self) - other
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return QuadIrrational.make(self.a - c[0], self.b - c[1], self.d)

    def __rsub__(self, other):
        if isinstance(other, float):
            return other - float(self)
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return QuadIrrational.make(c[0] - self.a, c[1] - self.b, self.d)

    def __mul__(self, other):
        if isinstance(other, float):
            return float(self) * other
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        a, b = c
        return QuadIrrational.make(self.a * a + self.b * b * self.d,
                                   self.a * b + self.b * a, self.d)

    __rmul__ = __mul__

    def conjugate(self):
        return QuadIrrational(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def reciprocal(self):
        n = self.norm()
        return QuadIrrational.make(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        if isinstance(other, float):
            return float(self) / other
        if isinstance(other, QuadIrrational):
            return self * other.reciprocal()
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return QuadIrrational.make(self.a / c[0], self.b / c[0], self.d)

    def __rtruediv__(self, other):
        if isinstance(other, float):
            return other / float(self)
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return self.reciprocal() * c[0]

    def __pow__(self, k):
        if not isinstance(k, int):
            if isinstance(k, Fraction) and k.denominator == 1:
                k = int(k)
            else:
                return float(self) ** float(k)
        if k < 0:
            return self.reciprocal() ** (-k)
        result = Fraction(1)
        base = self
        while k:
            if k & 1:
                result = base * result
            base = base * base
            k >>= 1
        return result

    # comparison -----------------------------------------------------------
    def sign(self) -> int:
        # sign of a + b*sqrt(d) decided without floating point
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == sb or sa == 0:
            return sb
        if sb == 0:
            return sa
        lhs = self.a * self.a
        rhs = self.b * self.b * self.d
        if lhs == rhs:
            return 0
        return sa if lhs > rhs else sb

    def _cmp(self, other) -> int:
        if isinstance(other, float):
            f = float(self)
            return (f > other) - (f < other)
        diff = self - other
        if isinstance(diff, QuadIrrational):
            return diff.sign()
        return (diff > 0) - (diff < 0)

    def __eq__(self, other):
        if isinstance(other, QuadIrrational):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        return False

    def __hash__(self):
        return hash(("Q", self.a, self.b, self.d))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __bool__(self):
        return True

    def __repr__(self):
        return f"QuadIrrational({self.a}, {self.b}, {self.d})"

    def __str__(self):
        return format_exact(self)


def qsqrt(d: int):
    """Exact square root of a positive integer (or Fraction)."""
    d = Fraction(d)
    # sqrt(p/q) = sqrt(p*q)/q
    num = d.numerator * d.denominator
    s, k = _squarefree_part(num)
    coeff = Fraction(k, d.denominator)
    if s == 1:
        return coeff
    return QuadIrrational(0, coeff, s)


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, QuadIrrational))


def format_exact(x) -> str:
    """Text form accepted by :func:`gseries.textio.parse_number`."""
    if isinstance(x, QuadIrrational):
        parts = []
        if x.a != 0:
            parts.append(str(x.a))
        b = x.b
        rad = f"sqrt({x.d})"
        if b == 1:
            term = rad
        elif b == -1:
            term = f"-{rad}"
        else:
            term = f"{b}*{rad}"
        if parts and not term.startswith("-"):
            parts.append("+" + term)
        else:
            parts.append(term)
        return "(" + "".join(parts) + ")"
    if isinstance(x, Fraction):
        return str(x)
    return repr(x)
