"""Function, vector field, current and differential operator algebras over the KN bases."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .exact_arith import _simplify
from .kn_forms import (
    KNForm,
    MarkedConfig,
    WeightMismatch,
    basis_form,
    combine,
    constant_one,
    expand_fast,
    expand_in_basis,
    lie_derivative,
    order_at_infinity,
)
from .linalg import nullspace

__all__ = [
    "DimensionMismatch",
    "Matrix",
    "CurrentElement",
    "DiffOpElement",
    "multiply_functions",
    "bracket_vector_fields",
    "bracket_currents",
    "bracket_diffop",
    "structure_constants",
    "subalgebra_member",
    "product_expansion",
    "bracket_expansion",
    "action_expansion",
    "strip_constants",
    "strip_constants_KL",
    "one_as_sum",
    "act_on_current",
    "StructureTable",
    "regular_function_basis",
    "gl_basis",
]


class DimensionMismatch(ValueError):
    pass


# --------------------------------------------------------------------------
# small exact matrices


class Matrix:
    """Square matrix over exact scalars, stored as a tuple of rows."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable]):
        self.rows = tuple(tuple(_simplify(Fraction(x) if isinstance(x, int) else x) for x in r) for r in rows)

    @classmethod
    def zero(cls, n: int) -> "Matrix":
        return cls([[0] * n for _ in range(n)])

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def unit(cls, n: int, i: int, j: int) -> "Matrix":
        """Elementary matrix E_ij, indices counted from 1."""
        return cls([[1 if (a == i - 1 and b == j - 1) else 0 for b in range(n)] for a in range(n)])

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __add__(self, other: "Matrix") -> "Matrix":
        _same_dim(self, other)
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        _same_dim(self, other)
        return Matrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> "Matrix":
        return Matrix([[-a for a in r] for r in self.rows])

    def scale(self, s) -> "Matrix":
        return Matrix([[a * s for a in r] for r in self.rows])

    def __matmul__(self, other: "Matrix") -> "Matrix":
        _same_dim(self, other)
        n = self.n
        cols = list(zip(*other.rows))
        return Matrix([[sum((r[k] * c[k] for k in range(n)), Fraction(0)) for c in cols] for r in self.rows])

    def bracket(self, other: "Matrix") -> "Matrix":
        return self @ other - other @ self

    def trace(self):
        return _simplify(sum((self.rows[i][i] for i in range(self.n)), Fraction(0)))

    def is_zero(self) -> bool:
        return not any(a for r in self.rows for a in r)

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"Matrix({[list(r) for r in self.rows]})"

    def entries(self):
        for i, r in enumerate(self.rows):
            for j, a in enumerate(r):
                if a:
                    yield i, j, a


def _same_dim(a: Matrix, b: Matrix) -> None:
    if a.n != b.n:
        raise DimensionMismatch(f"matrix sizes {a.n} and {b.n} differ")


def gl_basis(n: int) -> list:
    """Elementary matrices E_ij in row-major order."""
    return [Matrix.unit(n, i, j) for i in range(1, n + 1) for j in range(1, n + 1)]


# --------------------------------------------------------------------------
# cached structure data


@lru_cache(maxsize=None)
def product_expansion(cfg: MarkedConfig, a: tuple, b: tuple) -> dict:
    """A_a * A_b over the function basis."""
    f = basis_form(cfg, 0, *a).tensor(basis_form(cfg, 0, *b))
    return expand_fast(f, cfg)


@lru_cache(maxsize=None)
def bracket_expansion(cfg: MarkedConfig, a: tuple, b: tuple) -> dict:
    """[e_a, e_b] over the vector field basis."""
    return expand_fast(lie_derivative(basis_form(cfg, -1, *a), basis_form(cfg, -1, *b)), cfg)


@lru_cache(maxsize=None)
def action_expansion(cfg: MarkedConfig, a: tuple, b: tuple, lam: int = 0) -> dict:
    """e_a . f^lam_b over the weight-lam basis."""
    return expand_fast(lie_derivative(basis_form(cfg, -1, *a), basis_form(cfg, lam, *b)), cfg)


def strip_constants(d: dict) -> dict:
    return {k: v for k, v in d.items() if v}


# --------------------------------------------------------------------------
# functions and vector fields


def multiply_functions(f: KNForm, g: KNForm) -> KNForm:
    if f.weight != 0 or g.weight != 0:
        raise WeightMismatch("function product needs weight 0 forms")
    return f.tensor(g)


def bracket_vector_fields(u: KNForm, v: KNForm) -> KNForm:
    """[u, v] = (u v' - v u') d/dz."""
    if u.weight != -1 or v.weight != -1:
        raise WeightMismatch("vector field bracket needs weight -1 forms")
    return lie_derivative(u, v)


# --------------------------------------------------------------------------
# currents


@dataclass(frozen=True)
class CurrentElement:
    """Sum over basis functions of x_{n,p} (x) A_{n,p}, one matrix per basis index."""

    cfg: MarkedConfig
    gl_rank: int
    terms: tuple = ()  # sorted ((n, p), Matrix) pairs with nonzero matrices

    @classmethod
    def from_dict(cls, cfg: MarkedConfig, gl_rank: int, d: dict) -> "CurrentElement":
        items = tuple(sorted((k, m) for k, m in d.items() if not m.is_zero()))
        return cls(cfg, gl_rank, items)

    @classmethod
    def basis(cls, cfg: MarkedConfig, x: Matrix, n: int, p: int) -> "CurrentElement":
        return cls.from_dict(cfg, x.n, {(n, p): x})

    @classmethod
    def of(cls, cfg: MarkedConfig, x: Matrix, f: KNForm) -> "CurrentElement":
        """x (x) f for an arbitrary function f."""
        coeffs = expand_in_basis(f, cfg)
        return cls.from_dict(cfg, x.n, {k: x.scale(c) for k, c in coeffs.items()})

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __add__(self, other: "CurrentElement") -> "CurrentElement":
        if other.gl_rank != self.gl_rank:
            raise DimensionMismatch("currents over different gl ranks")
        d = self.as_dict()
        for k, m in other.terms:
            d[k] = d[k] + m if k in d else m
        return CurrentElement.from_dict(self.cfg, self.gl_rank, d)

    def scale(self, s) -> "CurrentElement":
        return CurrentElement.from_dict(self.cfg, self.gl_rank, {k: m.scale(s) for k, m in self.terms})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self) -> bool:
        return not self.terms

    def function_parts(self) -> dict:
        """{(i, j): coefficient dict over the A basis} for the matrix entries."""
        out: dict = {}
        for k, m in self.terms:
            for i, j, a in m.entries():
                out.setdefault((i, j), {})[k] = a
        return out


def bracket_currents(X: CurrentElement, Y: CurrentElement) -> CurrentElement:
    """Bilinear extension of [x (x) A, y (x) B] = [x, y] (x) AB."""
    if X.gl_rank != Y.gl_rank:
        raise DimensionMismatch("currents over different gl ranks")
    out: dict = {}
    for a, x in X.terms:
        for b, y in Y.terms:
            xy = x.bracket(y)
            if xy.is_zero():
                continue
            for k, c in product_expansion(X.cfg, a, b).items():
                t = xy.scale(c)
                out[k] = out[k] + t if k in out else t
    return CurrentElement.from_dict(X.cfg, X.gl_rank, out)


def act_on_current(v: KNForm, X: CurrentElement) -> CurrentElement:
    """[v, x (x) A] = x (x) (v.A)."""
    coeffs = _vector_coeffs(v, X.cfg)
    out: dict = {}
    for a, cv in coeffs.items():
        for b, x in X.terms:
            for k, c in action_expansion(X.cfg, a, b).items():
                t = x.scale(cv * c)
                out[k] = out[k] + t if k in out else t
    return CurrentElement.from_dict(X.cfg, X.gl_rank, out)


def _vector_coeffs(v: KNForm, cfg: MarkedConfig) -> dict:
    if v.weight != -1:
        raise WeightMismatch("expected a vector field")
    return expand_fast(v, cfg)


@dataclass(frozen=True)
class DiffOpElement:
    """Element of the differential operator algebra: a current plus a vector field."""

    current: CurrentElement
    vector: KNForm

    def __add__(self, other: "DiffOpElement") -> "DiffOpElement":
        return DiffOpElement(self.current + other.current, self.vector + other.vector)

    def scale(self, s) -> "DiffOpElement":
        return DiffOpElement(self.current.scale(s), self.vector.scale(s))

    def __sub__(self, other):
        return self + other.scale(-1)

    def is_zero(self) -> bool:
        return self.current.is_zero() and self.vector.is_zero()


def bracket_diffop(D1: DiffOpElement, D2: DiffOpElement) -> DiffOpElement:
    """[(X, u), (Y, v)] = ([X, Y] + u.Y - v.X, [u, v])."""
    cur = bracket_currents(D1.current, D2.current)
    cur = cur + act_on_current(D1.vector, D2.current) - act_on_current(D2.vector, D1.current)
    return DiffOpElement(cur, bracket_vector_fields(D1.vector, D2.vector))


# --------------------------------------------------------------------------
# structure constants and gradings


@dataclass
class StructureTable:
    algebra: str
    entries: dict = field(default_factory=dict)  # (left, right) -> {out: coeff}
    R: int = 0
    S: int = 0


def structure_constants(cfg: MarkedConfig, algebra: str, window: tuple, gl_rank: int = 1) -> StructureTable:
    """Exact structure constants for degrees in window=(lo, hi).

    algebra is "function", "vector" or "current".  R and S are the realized
    almost-grading bounds: products of degrees n, m land in [n+m-R, n+m+S].
    """
    lo, hi = window
    idx = [(n, p) for n in range(lo, hi + 1) for p in range(1, cfg.N + 1)]
    table = StructureTable(algebra)
    R = S = None
    for a in idx:
        for b in idx:
            if algebra == "function":
                out = product_expansion(cfg, a, b)
            elif algebra == "vector":
                out = bracket_expansion(cfg, a, b)
            elif algebra == "current":
                out = product_expansion(cfg, a, b)
            else:
                raise ValueError(f"unknown algebra {algebra!r}")
            if algebra == "current":
                basis = gl_basis(gl_rank)
                for i, x in enumerate(basis):
                    for j, y in enumerate(basis):
                        xy = x.bracket(y)
                        res = {}
                        for k, c in out.items():
                            for (r, s_, t) in xy.entries():
                                key = (r * gl_rank + s_, k)
                                res[key] = res.get(key, 0) + t * c
                        res = {k: v for k, v in res.items() if v}
                        if res:
                            table.entries[((i, a), (j, b))] = res
            elif out:
                table.entries[(a, b)] = out
            if out:
                ks = [k[0] for k in out]
                r_here = a[0] + b[0] - min(ks)
                s_here = max(ks) - a[0] - b[0]
                R = r_here if R is None else max(R, r_here)
                S = s_here if S is None else max(S, s_here)
    table.R = max(R or 0, 0)
    table.S = max(S or 0, 0)
    return table


def strip_constants_KL(cfg: MarkedConfig, scan: int = 8) -> tuple:
    """Critical strip widths (K, L) found by scanning orders at infinity.

    K is the least K >= 0 such that every A_{n,p} with n <= -K-1 vanishes at
    infinity.  L is the least L >= 1 such that every e_{n,p} with n <= -L-1
    vanishes there to order two; e_{-1,p} always stays in the strip.
    """
    K = 0
    for n in range(-1, -scan - 1, -1):
        if any(order_at_infinity(basis_form(cfg, 0, n, p)) < 1 for p in range(1, cfg.N + 1)):
            K = -n
    L = 1
    for n in range(-2, -scan - 1, -1):
        if any(order_at_infinity(basis_form(cfg, -1, n, p)) < 2 for p in range(1, cfg.N + 1)):
            L = -n
    return K, L


def _degrees(elem, cfg: MarkedConfig) -> list:
    if isinstance(elem, CurrentElement):
        return [k[0] for k, _ in elem.terms]
    if isinstance(elem, DiffOpElement):
        return _degrees(elem.current, cfg) + _degrees(elem.vector, cfg)
    return [k[0] for k in expand_fast(elem, cfg)]


def _order_inf(elem, cfg: MarkedConfig) -> int | None:
    """Order at infinity (vector fields: weight corrected); None for zero."""
    if isinstance(elem, CurrentElement):
        orders = [order_at_infinity(combine(cfg, 0, d)) for d in elem.function_parts().values() if d]
        orders = [o for o in orders]
        return min(orders) if orders else None
    if elem.is_zero():
        return None
    return order_at_infinity(elem)


def subalgebra_member(elem, tag, cfg: MarkedConfig) -> bool:
    """Membership in a triangular piece or a regular subalgebra.

    tag is one of "plus", "zero_strip", "minus", "plus_star", "minus_star" or
    ("regular", p).
    """
    is_vec = isinstance(elem, KNForm) and elem.weight == -1
    if isinstance(tag, tuple) and tag[0] == "regular":
        o = _order_inf(elem, cfg)
        if o is None:
            return True
        need = tag[1] + 1 if is_vec else tag[1]
        return o >= need
    if tag == "minus_star":
        o = _order_inf(elem, cfg)
        return o is None or o >= 0
    degs = _degrees(elem, cfg)
    K, L = strip_constants_KL(cfg)
    width = L if is_vec else K
    if tag == "plus":
        return all(d >= 1 for d in degs)
    if tag == "plus_star":
        return all(d >= (-1 if is_vec else 0) for d in degs)
    if tag == "zero_strip":
        return all(-width <= d <= 0 for d in degs)
    if tag == "minus":
        return all(d <= -width - 1 for d in degs)
    raise ValueError(f"unknown tag {tag!r}")


@lru_cache(maxsize=None)
def regular_function_basis(cfg: MarkedConfig, lo: int, hi: int) -> tuple:
    """Basis of the functions in span{A_{n,p} : lo <= n <= hi} vanishing at infinity.

    Computed as the kernel of the coefficients of w^j, j <= 0, of the
    expansion at infinity; returned as tuples of ((n, p), coeff) pairs.
    """
    from .exact_arith import _coeffs_at_infinity

    idx = [(n, p) for n in range(lo, hi + 1) for p in range(1, cfg.N + 1)]
    if not idx:
        return ()
    data = []
    low = 0
    for k in idx:
        rf = basis_form(cfg.base(), 0, *k).rf()
        start, cs = _coeffs_at_infinity(rf, 0)
        data.append((start, cs))
        low = min(low, start)
    rows = []
    for j in range(low, 1):
        row = []
        for start, cs in data:
            i = j - start
            row.append(cs[i] if 0 <= i < len(cs) else Fraction(0))
        rows.append(row)
    ker = nullspace(rows, len(idx))
    out = []
    for vec in ker:
        out.append(tuple((k, c) for k, c in zip(idx, vec) if c))
    return tuple(out)


def one_as_sum(cfg: MarkedConfig) -> dict:
    """Coefficients of the constant function 1 = sum_p A_{0,p}."""
    return expand_in_basis(constant_one(cfg), cfg)
