"""Exponents in a finitely generated additive monoid of nonnegative reals.

A :class:`GeneratorBasis` fixes positive generators ``1 = g0, g1, ...``.
Exponents are integer combinations of the generators with nonnegative
value.  Two comparison regimes exist:

* exact: every generator lies in one field ``Q(sqrt(d))`` (rationals
  included).  Values are compared exactly and coefficient vectors are
  canonicalised against the integer relations among the generators, so
  equal values always have identical coefficients.
* float: values are carried as ``mpmath`` numbers at a configurable
  precision (200 bits by default).  Two distinct coefficient vectors whose
  values agree to within ``2**-100`` raise :class:`AmbiguityError`.
"""

from __future__ import annotations

import enum
import functools
import itertools
import math
from fractions import Fraction
from functools import reduce

import mpmath

from .quadratic import QuadIrrational, is_exact, qsqrt

DEFAULT_PRECISION = 200
COLLISION_EXPONENT = 100


class SeriesError(Exception):
    """Base class for errors raised by this package."""


class DomainError(SeriesError, ArithmeticError):
    """An exponent or series operation left its domain."""


class AmbiguityError(SeriesError):
    """Two distinct exponents could not be ordered at working precision."""


class BasisMismatch(SeriesError, ValueError):
    """Operands live over incompatible generator bases."""


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


# ---------------------------------------------------------------------------
# real-number helpers shared with the series layer


def to_mpf(x, ctx=None):
    ctx = ctx or mpmath.mp
    if isinstance(x, QuadIrrational):
        return ctx.mpf(x.a.numerator) / x.a.denominator + \
            ctx.mpf(x.b.numerator) / x.b.denominator * ctx.sqrt(x.d)
    if isinstance(x, Fraction):
        return ctx.mpf(x.numerator) / x.denominator
    return ctx.mpf(x)


def real_cmp(a, b) -> int:
    """Compare two reals of mixed exact/float/infinite type."""
    if a == math.inf or b == math.inf:
        if a == b:
            return 0
        return 1 if a == math.inf else -1
    if is_exact(a) and is_exact(b):
        d = a - b
        if isinstance(d, QuadIrrational):
            return d.sign()
        return (d > 0) - (d < 0)
    if isinstance(a, (float, int, Fraction)) and isinstance(b, (float, int, Fraction)) \
            and not (isinstance(a, Fraction) and isinstance(b, Fraction)):
        fa, fb = float(a), float(b)
        return (fa > fb) - (fa < fb)
    with mpmath.workprec(DEFAULT_PRECISION):
        fa, fb = to_mpf(a), to_mpf(b)
        return (fa > fb) - (fa < fb)


def real_min(*xs):
    return reduce(lambda a, b: a if real_cmp(a, b) <= 0 else b, xs)


def real_max(*xs):
    return reduce(lambda a, b: a if real_cmp(a, b) >= 0 else b, xs)


def _field_of(g):
    if isinstance(g, QuadIrrational):
        return g.d
    if isinstance(g, (int, Fraction)):
        return 1
    return None


def _as_pair(g) -> tuple[Fraction, Fraction]:
    if isinstance(g, QuadIrrational):
        return g.a, g.b
    return Fraction(g), Fraction(0)


def _echelon(matrix: list[list[int]]):
    """Integer row echelon form ``H = U @ M`` with unimodular ``U``.

    Returns ``(U, H, pivots)`` where ``pivots`` lists the pivot column of
    each nonzero row of ``H`` (these rows come first).
    """
    k = len(matrix)
    cols = len(matrix[0]) if matrix else 0
    rows = [list(r) for r in matrix]
    U = [[int(i == j) for j in range(k)] for i in range(k)]
    pivots = []
    r = 0
    for col in range(cols):
        if r >= k:
            break
        while True:
            nz = [i for i in range(r, k) if rows[i][col] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(rows[i][col]))
            rows[r], rows[p] = rows[p], rows[r]
            U[r], U[p] = U[p], U[r]
            clean = True
            for i in range(r + 1, k):
                if rows[i][col]:
                    q = rows[i][col] // rows[r][col]
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[r])]
                    if rows[i][col]:
                        clean = False
            if clean:
                break
        if r < k and rows[r][col] != 0:
            if rows[r][col] < 0:
                rows[r] = [-a for a in rows[r]]
                U[r] = [-a for a in U[r]]
            pivots.append(col)
            r += 1
    return U, rows, pivots


class GeneratorBasis:
    """Ordered positive generators of an exponent monoid; ``generators[0] == 1``.

    ``names`` are used by the text form; the first is always ``"1"``.
    """

    def __init__(self, generators, names=None, precision: int = DEFAULT_PRECISION,
                 independence_assumed: bool = True):
        gens = list(generators)
        if not gens:
            gens = [1]
        if is_exact(gens[0]) and gens[0] != 1 or \
                (not is_exact(gens[0]) and float(gens[0]) != 1.0):
            gens = [1] + gens
        fields = {_field_of(g) for g in gens}
        fields.discard(1)
        self.precision = precision
        self.independence_assumed = independence_assumed
        self.exact = None not in fields and len(fields) <= 1
        self.radicand = next(iter(fields)) if (self.exact and fields) else 1
        self._ctx = mpmath.MPContext()
        self._ctx.prec = precision
        self.tolerance = self._ctx.mpf(2) ** (-COLLISION_EXPONENT)
        if self.exact:
            self.generators = tuple(
                g if isinstance(g, QuadIrrational) else Fraction(g) for g in gens)
        else:
            self.generators = tuple(self._mpf(g) for g in gens)
        self.values_mpf = tuple(self._mpf(g) for g in self.generators)
        for i, v in enumerate(self.values_mpf):
            if v <= 0:
                raise ValueError(f"generator {i} must be positive")
            for j in range(i):
                if self.exact and self.generators[i] == self.generators[j]:
                    raise ValueError("generators must be distinct")
                if not self.exact and abs(v - self.values_mpf[j]) < self.tolerance:
                    raise ValueError("generators must be distinct")
        if names is None:
            names = ["1"] + [f"g{i}" for i in range(1, len(gens))]
        else:
            names = list(names)
            if len(names) == len(gens) - 1:
                names = ["1"] + names
        if len(names) != len(gens) or names[0] != "1":
            raise ValueError("need one name per generator, the first being '1'")
        self.names = tuple(names)
        self._sum_cache: dict = {}
        if self.exact:
            self._setup_lattice()

    # ------------------------------------------------------------------
    def _mpf(self, x):
        if isinstance(x, str):
            return self._ctx.mpf(x)
        return to_mpf(x, self._ctx)

    def _setup_lattice(self):
        pairs = [_as_pair(g) for g in self.generators]
        den = 1
        for a, b in pairs:
            den = math.lcm(den, a.denominator, b.denominator)
        self._den = den
        matrix = [[int(a * den), int(b * den)] for a, b in pairs]
        self._U, self._H, self._pivots = _echelon(matrix)

    def __len__(self):
        return len(self.generators)

    def __eq__(self, other):
        if not isinstance(other, GeneratorBasis):
            return NotImplemented
        if self.exact != other.exact or len(self) != len(other):
            return False
        if self.exact:
            return self.generators == other.generators
        return all(abs(a - b) < self.tolerance
                   for a, b in zip(self.values_mpf, other.values_mpf))

    def __hash__(self):
        if self.exact:
            return hash(self.generators)
        return hash(len(self.generators))

    def __repr__(self):
        return "GeneratorBasis(" + ", ".join(
            f"{n}={g}" for n, g in zip(self.names, self.generators)) + ")"

    # ------------------------------------------------------------------
    def value_of(self, coeffs):
        if self.exact:
            total = Fraction(0)
            for c, g in zip(coeffs, self.generators):
                if c:
                    total = total + c * g
            return total
        return self._ctx.fsum(c * g for c, g in zip(coeffs, self.generators) if c)

    def canonical_coeffs(self, value) -> tuple[int, ...] | None:
        """Canonical integer coefficients for an exact value, or None."""
        if not self.exact:
            raise TypeError("canonical coefficients need an exact basis")
        if isinstance(value, QuadIrrational) and value.d != self.radicand:
            return None
        a, b = _as_pair(value)
        w = [a * self._den, b * self._den]
        if any(x.denominator != 1 for x in w):
            return None
        w = [int(x) for x in w]
        k = len(self.generators)
        out = [0] * k
        for row, col in zip(range(len(self._pivots)), self._pivots):
            h = self._H[row]
            if w[col] % h[col]:
                return None
            x = w[col] // h[col]
            w = [wi - x * hi for wi, hi in zip(w, h)]
            out = [o + x * u for o, u in zip(out, self._U[row])]
        if any(w):
            return None
        return tuple(out)

    def exponent(self, *coeffs) -> "MonoidExponent":
        if len(coeffs) == 1 and isinstance(coeffs[0], (tuple, list)):
            coeffs = tuple(coeffs[0])
        coeffs = tuple(int(c) for c in coeffs) + (0,) * (len(self) - len(coeffs))
        if len(coeffs) != len(self):
            raise ValueError("too many coefficients for basis")
        return MonoidExponent(self, coeffs)

    def zero(self) -> "MonoidExponent":
        return MonoidExponent(self, (0,) * len(self))

    def contains(self, value) -> bool:
        if self.exact:
            return is_exact(value) and self.canonical_coeffs(value) is not None
        return self._float_coeffs(value) is not None

    def from_value(self, value) -> "MonoidExponent":
        """Exponent with the given value; exact bases only need the value
        to lie in the generated group."""
        if self.exact:
            if not is_exact(value):
                raise DomainError(f"exact basis needs an exact value, got {value!r}")
            c = self.canonical_coeffs(value)
            if c is None:
                raise DomainError(f"{value} is not in the group generated by {self}")
            return MonoidExponent(self, c, _canonical=True)
        c = self._float_coeffs(value)
        if c is None:
            raise DomainError(f"{value} is not a generator multiple in {self}")
        return MonoidExponent(self, c)

    def _float_coeffs(self, value):
        v = self._mpf(value)
        if abs(v) < self.tolerance:
            return (0,) * len(self)
        for i, g in enumerate(self.values_mpf):
            q = v / g
            n = int(self._ctx.nint(q))
            if n and abs(q - n) * g < self.tolerance:
                out = [0] * len(self)
                out[i] = n
                return tuple(out)
        return None

    # ------------------------------------------------------------------
    def _with_added(self, extra, extra_names):
        gens = list(self.generators)
        names = list(self.names)
        for g, n in zip(extra, extra_names):
            if self.exact and is_exact(g) and \
                    GeneratorBasis(gens, names, self.precision).contains(g):
                continue
            if not self.exact or not is_exact(g):
                vg = self._mpf(g)
                if any(abs(vg - self._mpf(h)) < self.tolerance for h in gens):
                    continue
            while n in names:
                n = n + "'"
            gens.append(g)
            names.append(n)
        if len(gens) == len(self):
            return self
        return GeneratorBasis(gens, names, self.precision, self.independence_assumed)

    def extended_for_scale(self, rho) -> "GeneratorBasis":
        """A basis whose group contains ``rho * e`` for every exponent ``e``."""
        extra = []
        names = []
        for g, n in zip(self.generators, self.names):
            extra.append(_mul_real(rho, g, self))
            names.append(f"({_fmt_real(rho)})*{n}" if n != "1" else f"{_fmt_real(rho)}")
        return self._with_added(extra, [_sanitize(n) for n in names])

    def extended_by(self, values, names=None) -> "GeneratorBasis":
        values = list(values)
        names = names or [_sanitize(_fmt_real(v)) for v in values]
        return self._with_added(values, names)

    def merged(self, other: "GeneratorBasis") -> "GeneratorBasis":
        if self == other:
            return self
        if self.exact and other.exact and self.radicand != other.radicand \
                and self.radicand != 1 and other.radicand != 1:
            raise BasisMismatch(f"cannot merge {self} and {other}")
        if self.exact != other.exact:
            raise BasisMismatch(f"cannot merge exact and float bases: {self}, {other}")
        return self._with_added(other.generators[1:], other.names[1:])

    def convert(self, e: "MonoidExponent") -> "MonoidExponent":
        """Re-express an exponent of a sub-basis over this basis."""
        if e.basis is self:
            return e
        if self.exact:
            return self.from_value(e.value)
        out = [0] * len(self)
        for c, g in zip(e.coeffs, e.basis.values_mpf):
            if not c:
                continue
            j = self._generator_index(g)
            out[j] += c
        return MonoidExponent(self, tuple(out))

    def _generator_index(self, value) -> int:
        v = self._mpf(value)
        for j, g in enumerate(self.values_mpf):
            if abs(g - v) < self.tolerance:
                return j
        raise DomainError(f"{value} is not a generator of {self}")

    def scale(self, e: "MonoidExponent", rho) -> "MonoidExponent":
        """``rho * e`` expressed over this basis (see ``extended_for_scale``)."""
        if self.exact:
            return self.from_value(_mul_real(rho, e.value, self))
        out = [0] * len(self)
        for c, g in zip(e.coeffs, e.basis.values_mpf):
            if c:
                out[self._generator_index(self._mpf(rho) * g)] += c
        return MonoidExponent(self, tuple(out))


def _mul_real(a, b, basis):
    if is_exact(a) and is_exact(b):
        return a * b
    return basis._mpf(a) * basis._mpf(b)


def _fmt_real(x) -> str:
    if isinstance(x, QuadIrrational):
        return str(x)
    if isinstance(x, Fraction):
        return str(x)
    return mpmath.nstr(x, 12) if not isinstance(x, (int, float)) else repr(x)


def _sanitize(name: str) -> str:
    keep = "".join(ch if ch.isalnum() else "_" for ch in name).strip("_")
    keep = "_".join(p for p in keep.split("_") if p)
    if not keep or keep[0].isdigit():
        keep = "g_" + keep
    return keep


class MonoidExponent:
    """Immutable nonnegative element of the monoid generated by a basis."""

    __slots__ = ("basis", "coeffs", "value", "fvalue", "_hash")

    def __init__(self, basis: GeneratorBasis, coeffs, _canonical=False):
        coeffs = tuple(int(c) for c in coeffs)
        if len(coeffs) != len(basis):
            raise ValueError("coefficient vector length does not match basis")
        value = basis.value_of(coeffs)
        if basis.exact and not _canonical:
            coeffs = basis.canonical_coeffs(value)
        if basis.exact:
            negative = real_cmp(value, 0) < 0
        else:
            negative = value < -basis.tolerance
        if negative:
            raise DomainError(f"exponent value {value} is negative")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "fvalue", float(value))
        object.__setattr__(self, "_hash", hash(coeffs))

    def __setattr__(self, key, value):
        raise AttributeError("MonoidExponent is immutable")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if not isinstance(other, MonoidExponent):
            return NotImplemented
        return self.coeffs == other.coeffs and (
            self.basis is other.basis or self.basis == other.basis)

    def __add__(self, other):
        return exp_add(self, other)

    def __sub__(self, other):
        return exp_sub(self, other)

    def __lt__(self, other):
        return exp_compare(self, other) < 0

    def __le__(self, other):
        return exp_compare(self, other) <= 0

    def __gt__(self, other):
        return exp_compare(self, other) > 0

    def __ge__(self, other):
        return exp_compare(self, other) >= 0

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __float__(self):
        return float(self.value)

    def __repr__(self):
        return f"MonoidExponent({format_exponent(self)})"

    def __str__(self):
        return format_exponent(self)


def _check_basis(a: MonoidExponent, b: MonoidExponent):
    if a.basis is not b.basis and a.basis != b.basis:
        raise BasisMismatch(f"{a.basis} vs {b.basis}")


def exp_add(a: MonoidExponent, b: MonoidExponent) -> MonoidExponent:
    basis = a.basis
    if b.basis is not basis:
        _check_basis(a, b)
    key = (a.coeffs, b.coeffs)
    cache = basis._sum_cache
    hit = cache.get(key)
    if hit is None:
        # canonical coefficients depend linearly on the value, so sums stay canonical
        hit = MonoidExponent(basis, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)),
                             _canonical=basis.exact)
        if len(cache) < 500_000:
            cache[key] = hit
    return hit


def exp_sub(a: MonoidExponent, b: MonoidExponent) -> MonoidExponent:
    """``a - b``; raises :class:`DomainError` when the value is negative."""
    _check_basis(a, b)
    return MonoidExponent(a.basis, tuple(x - y for x, y in zip(a.coeffs, b.coeffs)),
                          _canonical=a.basis.exact)


def exp_compare(a: MonoidExponent, b: MonoidExponent) -> Ordering:
    _check_basis(a, b)
    if a.coeffs == b.coeffs:
        return Ordering.EQUAL
    basis = a.basis
    if basis.exact:
        c = real_cmp(a.value, b.value)
        # canonical coefficients make equal values impossible here
        return Ordering(c)
    diff = a.value - b.value
    if abs(diff) < basis.tolerance:
        raise AmbiguityError(
            f"exponents {a} and {b} differ by less than 2^-{COLLISION_EXPONENT}")
    return Ordering.GREATER if diff > 0 else Ordering.LESS


def _display_coeffs(e: MonoidExponent) -> tuple[int, ...]:
    """Sparsest representative of ``e`` using one or two generators if possible."""
    basis = e.basis
    if not basis.exact or not any(e.coeffs):
        return e.coeffs
    return _sparse_repr(basis, e.value) or e.coeffs


@functools.lru_cache(maxsize=4096)
def _sparse_repr(basis: "GeneratorBasis", value):
    k = len(basis)
    va, vb = _as_pair(value)
    pairs = [_as_pair(g) for g in basis.generators]
    single = None
    for i, (ga, gb) in enumerate(pairs):
        # value = t * g_i with integer t
        t = va / ga if ga else (vb / gb if gb else None)
        if t is not None and t.denominator == 1 and t * ga == va and t * gb == vb:
            if single is None or abs(t) < abs(single[1]):
                single = (i, t)
    if single is not None:
        out = [0] * k
        out[single[0]] = int(single[1])
        return tuple(out)
    best = None
    for i, j in itertools.combinations(range(k), 2):
        (a1, b1), (a2, b2) = pairs[i], pairs[j]
        det = a1 * b2 - a2 * b1
        if det == 0:
            continue
        s = (va * b2 - a2 * vb) / det
        t = (a1 * vb - va * b1) / det
        if s.denominator == 1 and t.denominator == 1:
            cand = [0] * k
            cand[i], cand[j] = int(s), int(t)
            score = abs(int(s)) + abs(int(t))
            if best is None or score < best[0]:
                best = (score, tuple(cand))
    return best[1] if best else None


def format_exponent(e: MonoidExponent) -> str:
    parts = []
    for c, name in zip(_display_coeffs(e), e.basis.names):
        if not c:
            continue
        if name == "1":
            term = str(abs(c))
        elif abs(c) == 1:
            term = name
        else:
            term = f"{abs(c)}*{name}"
        if not parts:
            parts.append(term if c > 0 else "-" + term)
        else:
            parts.append(("+ " if c > 0 else "- ") + term)
    return " ".join(parts) if parts else "0"


def parse_exponent(text: str, basis: GeneratorBasis) -> MonoidExponent:
    """Inverse of :func:`format_exponent`; accepts ``a*name`` terms joined by +/-."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty exponent")
    coeffs = [0] * len(basis)
    index = {n: i for i, n in enumerate(basis.names)}
    pos = 0
    sign = 1
    if s[0] in "+-":
        sign = -1 if s[0] == "-" else 1
        pos = 1
    term = ""
    terms = []
    for ch in s[pos:] + "+":
        if ch in "+-" and term:
            terms.append((sign, term))
            sign = -1 if ch == "-" else 1
            term = ""
        else:
            term += ch
    for sg, t in terms:
        if "*" in t:
            num, name = t.split("*", 1)
            k = int(num)
        elif t.isdigit():
            k, name = int(t), "1"
        else:
            k, name = 1, t
        if name not in index:
            raise ValueError(f"unknown generator {name!r} in exponent {text!r}")
        coeffs[index[name]] += sg * k
    return MonoidExponent(basis, coeffs)


def sqrt_basis(d: int = 2, name: str = "r") -> GeneratorBasis:
    """Convenience: the basis <1, sqrt(d)>."""
    return GeneratorBasis([1, qsqrt(d)], ["1", name])


def rational_basis() -> GeneratorBasis:
    return GeneratorBasis([1])
