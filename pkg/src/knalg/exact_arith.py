"""Exact scalars, polynomials and rational functions over Q with two nilpotent jet directions.

Scalars are either plain ``Fraction`` values or ``JetScalar`` values
``v + d1*e1 + d2*e2 + d12*e1*e2`` with ``e1**2 = e2**2 = 0``.  All generic code
works with both; jets only appear when marked points carry moduli directions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

__all__ = [
    "JetScalar",
    "Poly",
    "RationalFunction",
    "LaurentExpansion",
    "INF",
    "ZeroDenominator",
    "UndefinedOrder",
    "Scalar",
    "jet",
    "as_fraction",
    "value",
    "parts",
    "is_pure",
    "d1_part",
    "d2_part",
    "d12_part",
    "to_scalar",
    "rf_normalize",
    "laurent_expand",
    "order_at",
    "residue_at",
    "residue_at_infinity",
    "frac_str",
    "parse_frac",
    "scalar_to_json",
    "scalar_from_json",
]


class ZeroDenominator(ZeroDivisionError):
    pass


class UndefinedOrder(ValueError):
    pass


class _Infinity:
    """The point at infinity, used as an expansion center."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

_ZERO = Fraction(0)
_ONE = Fraction(1)


class JetScalar:
    """Rational number with first order variations along two independent directions."""

    __slots__ = ("v", "d1", "d2", "d12")

    def __init__(self, v=0, d1=0, d2=0, d12=0):
        self.v = v if type(v) is Fraction else Fraction(v)
        self.d1 = d1 if type(d1) is Fraction else Fraction(d1)
        self.d2 = d2 if type(d2) is Fraction else Fraction(d2)
        self.d12 = d12 if type(d12) is Fraction else Fraction(d12)

    @staticmethod
    def _lift(other) -> "JetScalar":
        if isinstance(other, JetScalar):
            return other
        return JetScalar(other)

    def __add__(self, other):
        if isinstance(other, JetScalar):
            return JetScalar(self.v + other.v, self.d1 + other.d1, self.d2 + other.d2, self.d12 + other.d12)
        if isinstance(other, (int, Fraction)):
            return JetScalar(self.v + other, self.d1, self.d2, self.d12)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return JetScalar(-self.v, -self.d1, -self.d2, -self.d12)

    def __sub__(self, other):
        if isinstance(other, JetScalar):
            return JetScalar(self.v - other.v, self.d1 - other.d1, self.d2 - other.d2, self.d12 - other.d12)
        if isinstance(other, (int, Fraction)):
            return JetScalar(self.v - other, self.d1, self.d2, self.d12)
        return NotImplemented

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, JetScalar):
            a, b = self, other
            return JetScalar(
                a.v * b.v,
                a.v * b.d1 + a.d1 * b.v,
                a.v * b.d2 + a.d2 * b.v,
                a.v * b.d12 + a.d1 * b.d2 + a.d2 * b.d1 + a.d12 * b.v,
            )
        if isinstance(other, (int, Fraction)):
            return JetScalar(self.v * other, self.d1 * other, self.d2 * other, self.d12 * other)
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> "JetScalar":
        if self.v == 0:
            raise ZeroDivisionError("jet with zero value part is not invertible")
        iv = 1 / self.v
        d1 = -self.d1 * iv * iv
        d2 = -self.d2 * iv * iv
        d12 = (2 * self.d1 * self.d2 * iv - self.d12) * iv * iv
        return JetScalar(iv, d1, d2, d12)

    def __truediv__(self, other):
        if isinstance(other, JetScalar):
            return self * other.inverse()
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return JetScalar(self.v / other, self.d1 / other, self.d2 / other, self.d12 / other)
        return NotImplemented

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return JetScalar(1)
        # (v + n)^k with n nilpotent of order 3
        v = self.v
        vk1 = v ** (k - 1) if k >= 1 else _ONE
        vk2 = v ** (k - 2) if k >= 2 else _ZERO
        return JetScalar(
            v ** k,
            k * vk1 * self.d1,
            k * vk1 * self.d2,
            k * vk1 * self.d12 + k * (k - 1) * vk2 * self.d1 * self.d2,
        )

    def __eq__(self, other):
        if isinstance(other, JetScalar):
            return self.v == other.v and self.d1 == other.d1 and self.d2 == other.d2 and self.d12 == other.d12
        if isinstance(other, (int, Fraction)):
            return self.v == other and not (self.d1 or self.d2 or self.d12)
        return NotImplemented

    def __hash__(self):
        if not (self.d1 or self.d2 or self.d12):
            return hash(self.v)
        return hash((self.v, self.d1, self.d2, self.d12))

    def __bool__(self):
        return bool(self.v or self.d1 or self.d2 or self.d12)

    def __repr__(self) -> str:
        bits = [str(self.v)]
        for name in ("d1", "d2", "d12"):
            x = getattr(self, name)
            if x:
                bits.append(f"{name}={x}")
        return "Jet(" + ", ".join(bits) + ")"

    def nilpotent(self) -> "JetScalar":
        return JetScalar(0, self.d1, self.d2, self.d12)


Scalar = Union[Fraction, JetScalar]


def jet(v=0, d1=0, d2=0, d12=0) -> JetScalar:
    return JetScalar(v, d1, d2, d12)


def to_scalar(x) -> Scalar:
    """Coerce ints, strings and Fractions to Fraction; jets pass through."""
    if isinstance(x, JetScalar):
        return x
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return parse_frac(x)
    return Fraction(x)


def value(x) -> Fraction:
    return x.v if isinstance(x, JetScalar) else Fraction(x)


def parts(x) -> tuple:
    if isinstance(x, JetScalar):
        return (x.v, x.d1, x.d2, x.d12)
    return (Fraction(x), _ZERO, _ZERO, _ZERO)


def d1_part(x) -> Fraction:
    return x.d1 if isinstance(x, JetScalar) else _ZERO


def d2_part(x) -> Fraction:
    return x.d2 if isinstance(x, JetScalar) else _ZERO


def d12_part(x) -> Fraction:
    return x.d12 if isinstance(x, JetScalar) else _ZERO


def is_pure(x) -> bool:
    return not isinstance(x, JetScalar) or not (x.d1 or x.d2 or x.d12)


def as_fraction(x) -> Fraction:
    """Return the rational value of a jet-free scalar."""
    if isinstance(x, JetScalar):
        if not is_pure(x):
            raise ValueError(f"scalar {x!r} carries jet parts")
        return x.v
    return Fraction(x)


def _simplify(x):
    """Collapse pure jets to Fractions so hot loops stay on the fast path."""
    if isinstance(x, JetScalar) and not (x.d1 or x.d2 or x.d12):
        return x.v
    return x


def _inv(x):
    if isinstance(x, JetScalar):
        return _simplify(x.inverse())
    if x == 0:
        raise ZeroDivisionError("division by zero")
    return 1 / Fraction(x)


# --------------------------------------------------------------------------
# polynomials


class Poly:
    """Dense univariate polynomial, coefficients stored from low to high degree."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        c = [_simplify(to_scalar(a)) for a in coeffs]
        while c and not c[-1]:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def _raw(cls, c: list) -> "Poly":
        while c and not c[-1]:
            c.pop()
        p = cls.__new__(cls)
        p.c = tuple(c)
        return p

    @classmethod
    def const(cls, a) -> "Poly":
        return cls((a,))

    @classmethod
    def linear(cls, root) -> "Poly":
        """The monic polynomial z - root."""
        return cls((-to_scalar(root), 1))

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def is_pure(self) -> bool:
        return all(type(a) is Fraction for a in self.c)

    def lead(self):
        return self.c[-1]

    def __eq__(self, other):
        return isinstance(other, Poly) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"Poly({list(self.c)})"

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, x in enumerate(b):
            out[i] = _simplify(out[i] + x)
        return Poly._raw(out)

    def __neg__(self) -> "Poly":
        return Poly._raw([-a for a in self.c])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        a, b = self.c, other.c
        if not a or not b:
            return Poly._raw([])
        out = [_ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if y:
                    out[i + j] = out[i + j] + x * y
        return Poly._raw([_simplify(t) for t in out])

    def scale(self, s) -> "Poly":
        if not s:
            return Poly._raw([])
        return Poly._raw([_simplify(a * s) for a in self.c])

    def shift_up(self, k: int) -> "Poly":
        """Multiply by z**k."""
        if not self.c:
            return self
        return Poly._raw([_ZERO] * k + list(self.c))

    def __pow__(self, k: int) -> "Poly":
        out = Poly.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def deriv(self) -> "Poly":
        return Poly._raw([_simplify(i * a) for i, a in enumerate(self.c) if i])

    def __call__(self, x):
        acc = _ZERO
        for a in reversed(self.c):
            acc = acc * x + a
        return _simplify(acc)

    def taylor_shift(self, x0) -> "Poly":
        """Coefficients of p(x0 + t) as a polynomial in t."""
        c = list(self.c)
        n = len(c)
        for i in range(n - 1):
            for j in range(n - 2, i - 1, -1):
                c[j] = c[j] + x0 * c[j + 1]
        return Poly._raw([_simplify(a) for a in c])

    def component(self, k: int) -> "Poly":
        """The k-th jet component (0 value, 1 d1, 2 d2, 3 d12) as a pure polynomial."""
        return Poly._raw([parts(a)[k] for a in self.c])

    def value_part(self) -> "Poly":
        return self.component(0)

    def nilpotent_part(self) -> "Poly":
        return self - self.value_part()

    def monic(self) -> "Poly":
        return self.scale(_inv(self.lead()))

    def divmod(self, other: "Poly") -> tuple:
        """Euclidean division; the divisor's leading coefficient must be invertible."""
        if other.is_zero():
            raise ZeroDenominator("polynomial division by zero")
        r = list(self.c)
        d = other.c
        inv_lead = _inv(d[-1])
        if len(r) < len(d):
            return Poly._raw([]), self
        q = [_ZERO] * (len(r) - len(d) + 1)
        for i in range(len(r) - len(d), -1, -1):
            coef = _simplify(r[i + len(d) - 1] * inv_lead)
            q[i] = coef
            if coef:
                for j, y in enumerate(d):
                    r[i + j] = _simplify(r[i + j] - coef * y)
        return Poly._raw(q), Poly._raw(r[: len(d) - 1])


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd of two jet-free polynomials."""
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    if a.is_zero():
        return a
    return a.monic()


def _root_multiplicity(p: Poly, c0: Fraction) -> int:
    k = 0
    lin = Poly.linear(c0)
    while not p.is_zero() and p(c0) == 0:
        p = p.divmod(lin)[0]
        k += 1
    return k


# --------------------------------------------------------------------------
# rational functions


class RationalFunction:
    """A quotient num/den in canonical form.

    The denominator is always jet-free and monic; any dependence on the jet
    directions is moved into the numerator.  Numerator components and
    denominator share no common factor over Q.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Poly | None = None, _canonical: bool = False):
        if den is None:
            den = Poly.const(1)
        if _canonical:
            self.num, self.den = num, den
        else:
            self.num, self.den = _canonicalize(num, den)
        self._hash = None

    @classmethod
    def const(cls, a) -> "RationalFunction":
        return cls(Poly.const(a), Poly.const(1), _canonical=True)

    @classmethod
    def z(cls) -> "RationalFunction":
        return cls(Poly((0, 1)), Poly.const(1), _canonical=True)

    @classmethod
    def zero(cls) -> "RationalFunction":
        return cls(Poly(()), Poly.const(1), _canonical=True)

    @classmethod
    def linear_power(cls, root, k: int) -> "RationalFunction":
        """(z - root)**k for any integer k, with a possibly jet-valued root."""
        root = _simplify(to_scalar(root))
        if k >= 0:
            return cls(Poly.linear(root) ** k, Poly.const(1), _canonical=True)
        r0 = value(root)
        delta = root - r0 if isinstance(root, JetScalar) else None
        lin = Poly.linear(r0)
        if delta is None or not delta:
            return cls(Poly.const(1), lin ** (-k), _canonical=True)
        # (z - r0 - delta)^k = sum_j binom(k, j) (z - r0)^(k-j) (-delta)^j, delta^3 = 0
        m = -k
        num = lin ** 2
        num = num + lin.scale(_simplify(JetScalar._lift(delta) * m))
        num = num + Poly.const(_simplify(JetScalar._lift(delta) ** 2 * Fraction(m * (m + 1), 2)))
        return cls(num, lin ** (m + 2))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_pure(self) -> bool:
        return self.num.is_pure()

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            if isinstance(other, (int, Fraction, JetScalar)):
                other = RationalFunction.const(other)
            else:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __repr__(self):
        return f"RationalFunction({list(self.num.c)} / {list(self.den.c)})"

    def __add__(self, other):
        other = _coerce_rf(other)
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        g = poly_gcd(self.den, other.den)
        a = other.den.divmod(g)[0]
        b = self.den.divmod(g)[0]
        return RationalFunction(self.num * a + other.num * b, self.den * a)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        return self + (-_coerce_rf(other))

    def __rsub__(self, other):
        return _coerce_rf(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, JetScalar)):
            return self.scale(other)
        if self.is_zero() or other.is_zero():
            return RationalFunction.zero()
        g1 = poly_gcd(self.num.value_part(), other.den) if self.num.is_pure() else Poly.const(1)
        g2 = poly_gcd(other.num.value_part(), self.den) if other.num.is_pure() else Poly.const(1)
        n1 = self.num.divmod(g1)[0] if g1.degree > 0 else self.num
        d2 = other.den.divmod(g1)[0] if g1.degree > 0 else other.den
        n2 = other.num.divmod(g2)[0] if g2.degree > 0 else other.num
        d1 = self.den.divmod(g2)[0] if g2.degree > 0 else self.den
        return RationalFunction(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def scale(self, s) -> "RationalFunction":
        s = _simplify(to_scalar(s))
        if not s:
            return RationalFunction.zero()
        if is_pure(s):
            return RationalFunction(self.num.scale(s), self.den, _canonical=True)
        return RationalFunction(self.num.scale(s), self.den)

    def reciprocal(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroDenominator("reciprocal of the zero function")
        n0 = self.num.value_part()
        if n0.is_zero():
            raise ZeroDenominator("numerator has vanishing value part")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, JetScalar)):
            return self.scale(_inv(to_scalar(other)))
        return self * other.reciprocal()

    def __pow__(self, k: int):
        if k < 0:
            return self.reciprocal() ** (-k)
        return RationalFunction(self.num ** k, self.den ** k)

    def deriv(self) -> "RationalFunction":
        n, d = self.num, self.den
        if d.degree == 0:
            return RationalFunction(n.deriv(), d, _canonical=True)
        return RationalFunction(n.deriv() * d - n * d.deriv(), d * d)

    def component(self, k: int) -> "RationalFunction":
        """Jet component k as a jet-free rational function."""
        return RationalFunction(self.num.component(k), self.den)

    def value_part(self) -> "RationalFunction":
        return self.component(0)

    def d1(self) -> "RationalFunction":
        return self.component(1)

    def d2(self) -> "RationalFunction":
        return self.component(2)

    def __call__(self, x):
        dv = self.den(x)
        return _simplify(self.num(x) * _inv(dv))


def _coerce_rf(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    return RationalFunction.const(to_scalar(x))


def _canonicalize(num: Poly, den: Poly) -> tuple:
    if den.is_zero() or den.value_part().is_zero():
        raise ZeroDenominator("denominator is zero")
    if not den.is_pure():
        # 1/(D0 + E) = (D0^2 - D0 E + E^2) / D0^3 with E nilpotent
        d0 = den.value_part()
        e = den - d0
        num = num * (d0 * d0 - d0 * e + e * e)
        den = d0 * d0 * d0
    if num.is_zero():
        return Poly(()), Poly.const(1)
    g = den
    for k in range(4):
        comp = num.component(k)
        if not comp.is_zero():
            g = poly_gcd(g, comp)
            if g.degree == 0:
                break
    if g.degree > 0:
        num = num.divmod(g)[0]
        den = den.divmod(g)[0]
    lead = den.lead()
    if lead != 1:
        inv = 1 / lead
        num = num.scale(inv)
        den = den.scale(inv)
    return num, den


def rf_normalize(f: RationalFunction | tuple) -> RationalFunction:
    """Bring a function or a (numerator, denominator) pair to canonical form."""
    if isinstance(f, RationalFunction):
        return RationalFunction(f.num, f.den)
    num, den = f
    if not isinstance(num, Poly):
        num = Poly(num)
    if not isinstance(den, Poly):
        den = Poly(den)
    return RationalFunction(num, den)


# --------------------------------------------------------------------------
# Laurent expansions


@dataclass(frozen=True)
class LaurentExpansion:
    center: object
    leading_order: int
    coefficients: tuple

    def coefficient(self, k: int):
        i = k - self.leading_order
        if 0 <= i < len(self.coefficients):
            return self.coefficients[i]
        if i < 0:
            return _ZERO
        raise IndexError(f"exponent {k} beyond expansion depth")


def _series_div(a: list, b: list, n: int) -> list:
    """First n coefficients of the power series a/b; b[0] must be invertible."""
    inv0 = _inv(b[0])
    out = []
    for k in range(n):
        acc = a[k] if k < len(a) else _ZERO
        for j in range(1, min(k, len(b) - 1) + 1):
            if b[j]:
                acc = acc - b[j] * out[k - j]
        out.append(_simplify(acc * inv0))
    return out


def _coeffs_at_point(f: RationalFunction, c0: Fraction, upto: int) -> tuple:
    """Coefficients of f at the rational point c0 for exponents start..upto."""
    mult = _root_multiplicity(f.den, c0)
    den_t = f.den.taylor_shift(c0).c[mult:]
    num_t = f.num.taylor_shift(c0).c
    n = upto + mult + 1
    if n <= 0:
        return -mult, []
    return -mult, _series_div(list(num_t), list(den_t), n)


def _coeffs_at_infinity(f: RationalFunction, upto: int) -> tuple:
    """Coefficients in w = 1/z at infinity for exponents start..upto."""
    dn, dd = f.num.degree, f.den.degree
    start = dd - dn
    num_w = list(reversed(f.num.c))
    den_w = list(reversed(f.den.c))
    n = upto - start + 1
    if n <= 0:
        return start, []
    return start, _series_div(num_w, den_w, n)


def _coeffs_at_jet(f: RationalFunction, center: JetScalar, upto: int) -> tuple:
    """Expansion at a moving point c0 + delta via f(c0+delta+t) = g + delta g' + delta^2/2 g''."""
    c0 = center.v
    delta = center.nilpotent()
    start, g = _coeffs_at_point(f, c0, upto + 2)
    # g'[k] = (k+1) g[k+1]; indices relative to exponent
    def gcoef(seq, s, k):
        i = k - s
        return seq[i] if 0 <= i < len(seq) else _ZERO

    g1 = [(k + 1) * gcoef(g, start, k + 1) for k in range(start - 1, upto + 2)]
    g2 = [(k + 1) * gcoef(g1, start - 1, k + 1) for k in range(start - 2, upto + 1)]
    d2half = _simplify(delta * delta * Fraction(1, 2))
    out = []
    new_start = start - 2
    for k in range(new_start, upto + 1):
        acc = gcoef(g, start, k)
        t1 = gcoef(g1, start - 1, k)
        if t1:
            acc = acc + delta * t1
        t2 = gcoef(g2, start - 2, k)
        if t2 and d2half:
            acc = acc + d2half * t2
        out.append(_simplify(acc))
    return new_start, out


def _raw_coeffs(f: RationalFunction, center, upto: int) -> tuple:
    if center is INF:
        return _coeffs_at_infinity(f, upto)
    center = _simplify(to_scalar(center))
    if isinstance(center, JetScalar):
        return _coeffs_at_jet(f, center, upto)
    return _coeffs_at_point(f, center, upto)


def _leading(f: RationalFunction, center) -> tuple:
    """Leading order and the raw coefficient data reaching at least that order."""
    if f.is_zero():
        raise UndefinedOrder("order of the zero function is undefined")
    if center is INF:
        top = max(i for i, a in enumerate(f.num.c) if a)
        return f.den.degree - top
    bound = f.num.degree + 3
    start, cs = _raw_coeffs(f, center, bound)
    for i, a in enumerate(cs):
        if a:
            return start + i
    raise UndefinedOrder("could not locate a nonzero coefficient")


def order_at(f: RationalFunction, center) -> int:
    """Leading order of f at a finite center or at INF (in w = 1/z)."""
    return _leading(f, center)


def laurent_expand(f: RationalFunction, center, depth: int) -> LaurentExpansion:
    """Expansion of f at center (or in w = 1/z at INF) with `depth` coefficients."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    lead = _leading(f, center)
    start, cs = _raw_coeffs(f, center, lead + depth - 1)
    off = lead - start
    return LaurentExpansion(center, lead, tuple(cs[off : off + depth]))


def residue_at(f: RationalFunction, center) -> Scalar:
    """Coefficient of (z - center)^-1.

    For a moving center the residue equals that of every jet component at the
    base point, since derivatives of Laurent series carry no residue.
    """
    if f.is_zero():
        return _ZERO
    c0 = value(to_scalar(center))
    if _root_multiplicity(f.den, c0) == 0:
        return _ZERO
    start, cs = _coeffs_at_point(f, c0, -1)
    i = -1 - start
    return cs[i] if 0 <= i < len(cs) else _ZERO


def residue_at_infinity(f: RationalFunction) -> Scalar:
    """Residue of the one-form f(z) dz at infinity."""
    if f.is_zero():
        return _ZERO
    start, cs = _coeffs_at_infinity(f, 1)
    i = 1 - start
    a1 = cs[i] if 0 <= i < len(cs) else _ZERO
    return _simplify(-a1)


# --------------------------------------------------------------------------
# serialization


def frac_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_frac(s: str) -> Fraction:
    return Fraction(s.strip())


def scalar_to_json(x):
    """Rationals as "p/q"; jets as a dict of their nonzero parts."""
    if is_pure(x):
        return frac_str(value(x))
    out = {}
    for name, part in zip(("v", "d1", "d2", "d12"), parts(x)):
        if part:
            out[name] = frac_str(part)
    return out


def scalar_from_json(obj) -> Scalar:
    if isinstance(obj, str):
        return parse_frac(obj)
    return _simplify(JetScalar(*(parse_frac(obj.get(k, "0")) for k in ("v", "d1", "d2", "d12"))))


def poly_from_roots(roots: Sequence) -> Poly:
    out = Poly.const(1)
    for r in roots:
        out = out * Poly.linear(r)
    return out
