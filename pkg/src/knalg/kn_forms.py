"""Weight-lambda meromorphic forms on the sphere with marked in-points and out-point at infinity."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .exact_arith import (
    INF,
    JetScalar,
    Poly,
    RationalFunction,
    Scalar,
    order_at,
    residue_at,
    residue_at_infinity,
    to_scalar,
    _raw_coeffs,
    value,
    _simplify,
)

__all__ = [
    "MarkedConfig",
    "KNForm",
    "WeightMismatch",
    "WindowTooSmall",
    "basis_form",
    "basis_form_by_solve",
    "kn_pairing",
    "lie_derivative",
    "expand_in_basis",
    "expansion_window",
    "order_at_infinity",
    "form_orders",
    "A",
    "e",
    "omega",
    "Omega",
    "jet_derivative",
    "drop_direction",
]


class WeightMismatch(ValueError):
    pass


class WindowTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class MarkedConfig:
    """Distinct in-points z_1..z_N on the sphere; the out-point is infinity."""

    points: tuple

    def __post_init__(self):
        pts = tuple(_simplify(to_scalar(p)) for p in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise ValueError("need at least one marked point")
        vals = [value(p) for p in pts]
        if len(set(vals)) != len(vals):
            raise ValueError("marked points must be pairwise distinct")

    @classmethod
    def of(cls, points: Iterable) -> "MarkedConfig":
        return cls(tuple(points))

    @property
    def N(self) -> int:
        return len(self.points)

    def point(self, p: int) -> Scalar:
        return self.points[p - 1]

    def base(self) -> "MarkedConfig":
        """The configuration with all jet parts dropped."""
        return MarkedConfig(tuple(value(p) for p in self.points))

    def with_jets(self, directions: dict) -> "MarkedConfig":
        """Attach jet directions: {point index: 1 or 2} marks which epsilon moves that point."""
        pts = []
        for i, p in enumerate(self.points, start=1):
            d = directions.get(i)
            if d == 1:
                pts.append(JetScalar(value(p), 1, 0, 0))
            elif d == 2:
                pts.append(JetScalar(value(p), 0, 1, 0))
            elif d == 12:
                pts.append(JetScalar(value(p), 1, 1, 0))
            else:
                pts.append(value(p))
        return MarkedConfig(tuple(pts))

    def permuted(self, perm: Sequence[int]) -> "MarkedConfig":
        return MarkedConfig(tuple(self.points[i] for i in perm))


def _binom(k: int, l: int) -> Fraction:
    """Generalized binomial coefficient C(k, l) for integer k and l >= 0."""
    out = Fraction(1)
    for i in range(l):
        out = out * (k - i) / (i + 1)
    return out


@lru_cache(maxsize=200000)
def _power_series(a, k: int, L: int) -> tuple:
    """Coefficients of (a + t)^k up to t^L."""
    if L < 0:
        return ()
    out = []
    if k >= 0:
        for l in range(min(k, L) + 1):
            out.append(_simplify(_binom(k, l) * a ** (k - l)) if k - l else _binom(k, l))
        return tuple(out) + (Fraction(0),) * (L - min(k, L))
    inv = 1 / a
    p = inv ** (-k)
    for l in range(L + 1):
        out.append(_simplify(_binom(k, l) * p))
        p = p * inv
    return tuple(out)


def _mul_trunc(a: list, b: tuple, L: int) -> list:
    out = [Fraction(0)] * (L + 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j in range(min(len(b), L + 1 - i)):
            y = b[j]
            if y:
                out[i + j] = out[i + j] + x * y
    return [_simplify(t) for t in out]


class FSum:
    """Finite sum of terms c * prod_i (z - z_i)^k_i over fixed marked points.

    Terms are keyed by the exponent vector.  The representation is not unique;
    use to_rf() for equality and zero tests.
    """

    __slots__ = ("points", "terms")

    def __init__(self, points: tuple, terms: dict):
        self.points = points
        self.terms = {k: v for k, v in terms.items() if v}

    @classmethod
    def monomial(cls, points: tuple, exps: tuple, c=1) -> "FSum":
        return cls(points, {tuple(exps): _simplify(to_scalar(c))})

    @classmethod
    def const(cls, points: tuple, c) -> "FSum":
        return cls.monomial(points, (0,) * len(points), c)

    def _check(self, other: "FSum") -> None:
        if other.points != self.points:
            raise ValueError("sums over different marked points")

    def __add__(self, other):
        if isinstance(other, RationalFunction):
            return self.to_rf() + other
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = _simplify(out[k] + v) if k in out else v
        return FSum(self.points, out)

    def __neg__(self):
        return FSum(self.points, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "FSum":
        s = _simplify(to_scalar(s))
        if not s:
            return FSum(self.points, {})
        return FSum(self.points, {k: _simplify(v * s) for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, RationalFunction):
            return self.to_rf() * other
        if isinstance(other, (int, Fraction, JetScalar)):
            return self.scale(other)
        self._check(other)
        out: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                t = v1 * v2
                out[k] = out[k] + t if k in out else t
        return FSum(self.points, {k: _simplify(v) for k, v in out.items()})

    def deriv(self) -> "FSum":
        out: dict = {}
        for k, v in self.terms.items():
            for i, ki in enumerate(k):
                if ki:
                    kk = k[:i] + (ki - 1,) + k[i + 1 :]
                    t = v * ki
                    out[kk] = out[kk] + t if kk in out else t
        return FSum(self.points, {k: _simplify(v) for k, v in out.items()})

    def is_zero(self) -> bool:
        return not self.terms or self.to_rf().is_zero()

    def to_rf(self) -> RationalFunction:
        if not self.terms:
            return RationalFunction.zero()
        lows = [min(0, min(k[i] for k in self.terms)) for i in range(len(self.points))]
        den = RationalFunction.const(1)
        for z, m in zip(self.points, lows):
            if m:
                den = den * RationalFunction.linear_power(z, m)
        num = Poly(())
        for k, v in self.terms.items():
            t = Poly.const(v)
            for z, ki, m in zip(self.points, k, lows):
                if ki - m:
                    t = t * Poly.linear(z) ** (ki - m)
            num = num + t
        return RationalFunction(num) * den

    def min_exponent(self, j: int) -> int:
        return min(k[j] for k in self.terms)

    def max_total(self) -> int:
        return max(sum(k) for k in self.terms)

    def local_series(self, j: int, upto: int) -> tuple:
        """Expansion in t = z - z_j (exact, also for moving points): (start, coeffs to t^upto)."""
        if not self.terms:
            return 0, []
        start = self.min_exponent(j)
        L = upto - start
        if L < 0:
            return start, []
        acc = [Fraction(0)] * (L + 1)
        zj = self.points[j]
        for k, v in self.terms.items():
            shift = k[j] - start
            if shift > L:
                continue
            ser = [v]
            for i, ki in enumerate(k):
                if i == j or not ki:
                    continue
                ser = _mul_trunc(ser, _power_series(zj - self.points[i], ki, L - shift), L - shift)
            for a, x in enumerate(ser):
                if x:
                    acc[a + shift] = acc[a + shift] + x
        return start, [_simplify(x) for x in acc]

    def residue(self, j: int):
        start, cs = self.local_series(j, -1)
        i = -1 - start
        return cs[i] if 0 <= i < len(cs) else Fraction(0)


def as_rf(u) -> RationalFunction:
    return u.to_rf() if isinstance(u, FSum) else u


def local_series(u, cfg: "MarkedConfig", j: int, upto: int) -> tuple:
    """Expansion of a coefficient function in z - z_j, j counted from 0."""
    if isinstance(u, FSum):
        return u.local_series(j, upto)
    return _raw_coeffs(u, cfg.points[j], upto)


@dataclass(frozen=True, eq=False)
class KNForm:
    """u(z) (dz)^weight in the global coordinate; u is a RationalFunction or an FSum."""

    weight: int
    coeff: object

    def __add__(self, other: "KNForm") -> "KNForm":
        _same_weight(self, other)
        return KNForm(self.weight, _add(self.coeff, other.coeff))

    def __sub__(self, other: "KNForm") -> "KNForm":
        _same_weight(self, other)
        return KNForm(self.weight, _add(self.coeff, -other.coeff))

    def __neg__(self) -> "KNForm":
        return KNForm(self.weight, -self.coeff)

    def scale(self, s) -> "KNForm":
        return KNForm(self.weight, self.coeff.scale(s))

    def tensor(self, other: "KNForm") -> "KNForm":
        return KNForm(self.weight + other.weight, _mul(self.coeff, other.coeff))

    def is_zero(self) -> bool:
        return self.coeff.is_zero()

    def rf(self) -> RationalFunction:
        return as_rf(self.coeff)

    def equals(self, other: "KNForm") -> bool:
        return self.weight == other.weight and (self - other).is_zero()

    @classmethod
    def zero(cls, weight: int) -> "KNForm":
        return cls(weight, RationalFunction.zero())

    @classmethod
    def constant(cls, a, weight: int = 0) -> "KNForm":
        return cls(weight, RationalFunction.const(a))


def _add(u, v):
    if isinstance(u, FSum) and isinstance(v, FSum):
        return u + v
    return as_rf(u) + as_rf(v)


def _mul(u, v):
    if isinstance(u, FSum) and isinstance(v, FSum):
        return u * v
    return as_rf(u) * as_rf(v)


def _deriv(u):
    return u.deriv()


def _same_weight(f: KNForm, g: KNForm) -> None:
    if f.weight != g.weight:
        raise WeightMismatch(f"weights {f.weight} and {g.weight} differ")


@lru_cache(maxsize=None)
def basis_form(cfg: MarkedConfig, lam: int, n: int, p: int) -> KNForm:
    """The basis element f^lam_{n,p}, normalized to z_p^(n-lam)(1 + O(z_p)) at P_p."""
    if not 1 <= p <= cfg.N:
        raise ValueError(f"point index {p} out of range")
    zp = cfg.point(p)
    e_other = n + 1 - lam
    exps = tuple(n - lam if i == p else e_other for i in range(1, cfg.N + 1))
    c = Fraction(1)
    if e_other:
        for i, zi in enumerate(cfg.points, start=1):
            if i != p:
                c = c * (zp - zi) ** (-e_other)
    return KNForm(lam, FSum.monomial(cfg.points, exps, c))


def _drop(x, d: int):
    """x with epsilon_d set to zero."""
    if not isinstance(x, JetScalar):
        return x
    return _simplify(JetScalar(x.v, 0 if d == 1 else x.d1, 0 if d == 2 else x.d2, 0))


def _slope(x, d: int):
    """Derivative of x along epsilon_d, keeping the other direction."""
    if not isinstance(x, JetScalar):
        return Fraction(0)
    if d == 1:
        return _simplify(JetScalar(x.d1, 0, x.d12, 0))
    return _simplify(JetScalar(x.d2, x.d12, 0, 0))


def drop_direction(cfg: MarkedConfig, d: int) -> MarkedConfig:
    return MarkedConfig(tuple(_drop(z, d) for z in cfg.points))


def jet_derivative(f: KNForm, cfg: MarkedConfig, d: int) -> tuple:
    """Derivative of f along epsilon_d, as a form over the configuration without that direction.

    Returns (derivative, reduced configuration).  f must be given as an FSum
    over `cfg`; both the coefficients and the moving points are differentiated.
    """
    u = f.coeff
    if not isinstance(u, FSum) or u.points != cfg.points:
        raise TypeError("jet_derivative needs an FSum over the given configuration")
    red = drop_direction(cfg, d)
    slopes = [_slope(z, d) for z in cfg.points]
    out = FSum(red.points, {})
    for k, c in u.terms.items():
        dc = _slope(c, d)
        if dc:
            out = out + FSum.monomial(red.points, k, dc)
        c0 = _drop(c, d)
        for i, ki in enumerate(k):
            if ki and slopes[i]:
                kk = k[:i] + (ki - 1,) + k[i + 1:]
                out = out + FSum.monomial(red.points, kk, _simplify(-ki * c0 * _drop(slopes[i], d)))
    return KNForm(f.weight, out), red


def A(cfg: MarkedConfig, n: int, p: int) -> KNForm:
    return basis_form(cfg, 0, n, p)


def e(cfg: MarkedConfig, n: int, p: int) -> KNForm:
    return basis_form(cfg, -1, n, p)


def omega(cfg: MarkedConfig, n: int, p: int) -> KNForm:
    """Dual one-form to A_{n,p}."""
    return basis_form(cfg, 1, -n, p)


def Omega(cfg: MarkedConfig, n: int, p: int) -> KNForm:
    """Dual quadratic differential to e_{n,p}."""
    return basis_form(cfg, 2, -n, p)


def constant_one(cfg: MarkedConfig) -> KNForm:
    return KNForm(0, FSum.const(cfg.points, 1))


def order_at_infinity(f: KNForm) -> int:
    """Order at infinity in w = 1/z after the change (dz)^lam = (-1)^lam w^(-2 lam) (dw)^lam."""
    return order_at(f.rf(), INF) - 2 * f.weight


def form_orders(f: KNForm, cfg: MarkedConfig) -> dict:
    """Orders at every in-point (keyed 1..N) and at infinity (key 'inf')."""
    u = f.rf()
    out = {i: order_at(u, z) for i, z in enumerate(cfg.points, start=1)}
    out["inf"] = order_at_infinity(f)
    return out


def _residue_sum(u, cfg: MarkedConfig):
    total = Fraction(0)
    if isinstance(u, FSum):
        for j in range(cfg.N):
            total = total + u.residue(j)
    else:
        for z in cfg.points:
            total = total + residue_at(u, z)
    return _simplify(total)


def residue_sum(u, cfg: MarkedConfig):
    """Sum of the residues of u(z) dz over the in-points."""
    return _residue_sum(u, cfg)


def kn_pairing(f: KNForm, g: KNForm, cfg: MarkedConfig) -> Scalar:
    """Sum over the in-points of the residues of the one-form f g."""
    if f.weight + g.weight != 1:
        raise WeightMismatch(f"pairing needs weights summing to 1, got {f.weight} and {g.weight}")
    return _residue_sum(_mul(f.coeff, g.coeff), cfg)


def pairing_at_infinity(f: KNForm, g: KNForm) -> Scalar:
    """Minus the residue at infinity; equals kn_pairing by the residue theorem."""
    if f.weight + g.weight != 1:
        raise WeightMismatch("pairing needs weights summing to 1")
    return _simplify(-residue_at_infinity(as_rf(_mul(f.coeff, g.coeff))))


def lie_derivative(v: KNForm, f: KNForm) -> KNForm:
    """Action of the vector field v on a weight-lambda form."""
    if v.weight != -1:
        raise WeightMismatch("first argument must be a vector field")
    lam = f.weight
    a, b = v.coeff, f.coeff
    out = _mul(a, b.deriv())
    if lam:
        out = _add(out, _mul(b, a.deriv()).scale(lam))
    return KNForm(lam, out)


def expansion_window(f: KNForm, cfg: MarkedConfig) -> tuple:
    """Degree range guaranteed to contain every basis component of f.

    Same-degree combinations have orders at infinity in disjoint ranges, so the
    top degree is bounded through the order at infinity.  The bottom degree
    comes from the smallest order at the in-points.  For factored sums both
    bounds are read from exponents; otherwise a moving pole is allowed two
    extra orders in its jet components.
    """
    lam = f.weight
    u = f.coeff
    if isinstance(u, FSum):
        o_inf = -u.max_total()
        bottom = min(u.min_exponent(j) for j in range(cfg.N)) + lam
    else:
        o_inf = order_at(u, INF)
        bottom = min(order_at(u, value(z)) for z in cfg.points) + lam
        if any(isinstance(z, JetScalar) for z in cfg.points) or not u.is_pure():
            bottom -= 2
    o_inf -= 2 * lam
    top = (-o_inf - 2 * lam) // cfg.N + lam
    return bottom, top


def _expand(f: KNForm, cfg: MarkedConfig, lo: int, hi: int) -> dict:
    """Pairing against the dual basis, using one local expansion of f per point."""
    lam = f.weight
    out = {}
    u = f.coeff
    series = []
    for j in range(cfg.N):
        # dual orders at P_j are >= -hi + lam - 1, so f is needed up to hi - lam
        series.append(local_series(u, cfg, j, hi - lam))
    for k in range(lo, hi + 1):
        for s in range(1, cfg.N + 1):
            dual = basis_form(cfg, 1 - lam, -k, s).coeff
            c = Fraction(0)
            for j in range(cfg.N):
                fs, fc = series[j]
                if not fc:
                    continue
                ds, dc = dual.local_series(j, -1 - fs)
                for a, x in enumerate(fc):
                    b = -1 - (fs + a) - ds
                    if b < 0:
                        break
                    if b < len(dc) and x and dc[b]:
                        c = c + x * dc[b]
            c = _simplify(c)
            if c:
                out[(k, s)] = c
    return out


def expand_fast(f: KNForm, cfg: MarkedConfig) -> dict:
    """Basis coefficients over the guaranteed window, without the residual check."""
    if not isinstance(f.coeff, FSum) and f.coeff.is_zero():
        return {}
    if isinstance(f.coeff, FSum) and not f.coeff.terms:
        return {}
    lo, hi = expansion_window(f, cfg)
    return _expand(f, cfg, lo, hi)


def expand_in_basis(f: KNForm, cfg: MarkedConfig, window: tuple | None = None) -> dict:
    """Coefficients {(k, s): c} with f = sum c f^lam_{k,s}, checked by exact subtraction."""
    if f.is_zero():
        return {}
    lo, hi = window if window is not None else expansion_window(f, cfg)
    out = _expand(f, cfg, lo, hi)
    residual = f.rf() - combine(cfg, f.weight, out).rf()
    if not residual.is_zero():
        raise WindowTooSmall(f"window {lo}..{hi} does not capture the expansion")
    return out


def combine(cfg: MarkedConfig, lam: int, coeffs: dict) -> KNForm:
    """Inverse of expand_in_basis."""
    out = FSum(cfg.points, {})
    for (k, s), c in coeffs.items():
        out = out + basis_form(cfg, lam, k, s).coeff.scale(c)
    return KNForm(lam, out)


def basis_form_by_solve(cfg: MarkedConfig, lam: int, n: int, p: int) -> KNForm:
    """Independent construction by linear algebra, used as a cross-check.

    Writes the form as P(z) / prod (z - z_i)^{k_i} with the pole orders forced by
    the prescriptions, imposes the zero orders at the in-points and the pole
    bound at infinity as linear conditions on the coefficients of P, and fixes
    the scale by the leading coefficient at P_p.  Only jet-free configurations.
    """
    from .linalg import nullspace

    pts = [value(z) for z in cfg.points]
    N = len(pts)
    want = [(n + 1 - lam) - (1 if i == p else 0) for i in range(1, N + 1)]
    inf_order = -N * (n + 1 - lam) - (2 * lam - 1)
    # coefficient u(z) = P(z) / D(z); ord_inf(u) = inf_order + 2 lam
    pole = [max(0, -w) for w in want]
    den = Poly.const(1)
    for z, k in zip(pts, pole):
        den = den * Poly.linear(z) ** k
    u_inf = inf_order + 2 * lam
    deg_p = den.degree - u_inf
    if deg_p < 0:
        raise ValueError("no form with these orders")
    rows = []
    for z, w, k in zip(pts, want, pole):
        need = w + k  # P must vanish to this order at z
        shifted_basis = [Poly([0] * j + [1]).taylor_shift(z) for j in range(deg_p + 1)]
        for t in range(need):
            rows.append([b.c[t] if t < len(b.c) else Fraction(0) for b in shifted_basis])
    ker = nullspace(rows, deg_p + 1) if rows else [
        [Fraction(1) if i == j else Fraction(0) for i in range(deg_p + 1)] for j in range(deg_p + 1)
    ]
    if len(ker) != 1:
        raise ValueError(f"solution space has dimension {len(ker)}")
    num = Poly(ker[0])
    f = RationalFunction(num, den)
    lead = _leading_coefficient(f, pts[p - 1])
    return KNForm(lam, f.scale(1 / lead))


def _leading_coefficient(f: RationalFunction, z) -> Scalar:
    from .exact_arith import laurent_expand

    return laurent_expand(f, z, 1).coefficients[0]
