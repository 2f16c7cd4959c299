"""Semi-infinite wedge representation for the trivial line bundle and gl(n).

Single-particle states psi_M = A_{n,p} (x) v_i carry the linear index
M = n*N*g + (p-1)*g + (i-1) with g the gl rank.  The charge-m vacuum occupies
every M >= m*N*g.  A monomial is stored as the finite deviation from that vacuum:
holes H (unoccupied indices >= m*N*g) and particles P (occupied indices below it).

Operators are applied exactly to finite vectors.  The diagonal part of the
Leibniz action is replaced by the regularization scalar
    sum over occupied M of KN degree <= 0 of a_MM
  - sum over unoccupied M of KN degree > 0 of a_MM.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .exact_arith import Scalar, _simplify, frac_str
from .kn_algebras import (
    CurrentElement,
    DimensionMismatch,
    action_expansion,
    bracket_currents,
    act_on_current,
    product_expansion,
    _vector_coeffs,
)
from .kn_forms import KNForm, MarkedConfig, WeightMismatch, _slope, basis_form, expand_fast, jet_derivative
from .linalg import vec_add, vec_clean, vec_scale

__all__ = [
    "WedgeMonomial",
    "WedgeVector",
    "Truncation",
    "TruncationOverflow",
    "NotScalar",
    "OperatorWindow",
    "FermionModule",
    "partitions",
]


class TruncationOverflow(ValueError):
    """A result left the declared degree window."""


class NotScalar(ArithmeticError):
    """An operator expected to be a multiple of the identity is not."""


@dataclass(frozen=True, order=True)
class WedgeMonomial:
    charge: int
    holes: tuple = ()
    particles: tuple = ()

    def __post_init__(self):
        if len(self.holes) != len(self.particles):
            raise ValueError("holes and particles must pair up")

    @property
    def degree(self) -> int:
        return sum(self.particles) - sum(self.holes)

    def as_json(self) -> dict:
        return {"charge": self.charge, "holes": list(self.holes), "particles": list(self.particles)}

    @classmethod
    def from_json(cls, d: dict) -> "WedgeMonomial":
        return cls(int(d["charge"]), tuple(sorted(d["holes"])), tuple(sorted(d["particles"])))


class WedgeVector(dict):
    """Sparse combination {WedgeMonomial: scalar} with no zero entries."""

    def __init__(self, data=None):
        super().__init__()
        if data:
            for k, v in dict(data).items():
                v = _simplify(v)
                if v:
                    self[k] = v

    def __add__(self, other: "WedgeVector") -> "WedgeVector":
        return WedgeVector(vec_add(self, other))

    def __sub__(self, other: "WedgeVector") -> "WedgeVector":
        return WedgeVector(vec_add(self, other, -1))

    def scale(self, s) -> "WedgeVector":
        return WedgeVector(vec_scale(self, s))

    def degrees(self) -> set:
        return {m.degree for m in self}

    def charges(self) -> set:
        return {m.charge for m in self}


@dataclass(frozen=True)
class Truncation:
    """Window of degrees >= d_min; results may reach exact_margin further down."""

    d_min: int = -6
    exact_margin: int = 0

    def __post_init__(self):
        if self.d_min > 0 or self.exact_margin < 0:
            raise ValueError("need d_min <= 0 and exact_margin >= 0")

    @property
    def floor(self) -> int:
        return self.d_min - self.exact_margin

    def check(self, v: dict) -> None:
        for m in v:
            if m.degree < self.floor:
                raise TruncationOverflow(f"degree {m.degree} below window floor {self.floor}")


def partitions(n: int, largest: int | None = None) -> Iterator[tuple]:
    """Partitions of n as nonincreasing tuples."""
    if n == 0:
        yield ()
        return
    largest = n if largest is None else largest
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


@dataclass
class OperatorWindow:
    """Matrix of an operator on the window basis; columns are inputs."""

    rows: list
    cols: list
    entries: dict  # (row index, col index) -> scalar

    def as_json(self) -> dict:
        return {
            "rows": [m.as_json() for m in self.rows],
            "cols": [m.as_json() for m in self.cols],
            "entries": [[r, c, frac_str(x)] for (r, c), x in sorted(self.entries.items())],
        }


# --------------------------------------------------------------------------


class FermionModule:
    """Wedge module over a marked configuration for the defining rep of gl(gl_rank)."""

    def __init__(self, cfg: MarkedConfig, gl_rank: int = 1):
        self.cfg = cfg
        self.g = gl_rank
        self.Ng = cfg.N * gl_rank
        self._columns: dict = {}
        self._basis_cache: dict = {}

    # index map -----------------------------------------------------------

    def index(self, n: int, p: int, i: int) -> int:
        return n * self.Ng + (p - 1) * self.g + (i - 1)

    def unindex(self, M: int) -> tuple:
        n, r = divmod(M, self.Ng)
        p, i = divmod(r, self.g)
        return n, p + 1, i + 1

    def vacuum(self, charge: int = 0) -> WedgeMonomial:
        return WedgeMonomial(charge)

    def vacuum_vector(self, charge: int = 0) -> WedgeVector:
        return WedgeVector({self.vacuum(charge): Fraction(1)})

    # enumeration -----------------------------------------------------------

    def from_partition(self, charge: int, lam: tuple) -> WedgeMonomial:
        B = charge * self.Ng
        occ = [B + k - part for k, part in enumerate(lam)]
        ell = len(lam)
        particles = tuple(sorted(x for x in occ if x < B))
        occ_set = set(occ)
        holes = tuple(x for x in range(B, B + ell) if x not in occ_set)
        return WedgeMonomial(charge, holes, particles)

    def monomials_of_degree(self, charge: int, d: int) -> list:
        if d > 0:
            return []
        return sorted(self.from_partition(charge, lam) for lam in partitions(-d))

    def window_basis(self, charge: int, trunc: Truncation) -> list:
        """Monomials of degree in [d_min, 0], ordered by degree descending."""
        out = []
        for d in range(0, trunc.d_min - 1, -1):
            out.extend(self.monomials_of_degree(charge, d))
        return out

    # single-particle operators --------------------------------------------

    def _column(self, key: tuple, M: int) -> dict:
        """{M': a_{M'M}} for a basis operator key."""
        ck = (key, M)
        col = self._columns.get(ck)
        if col is not None:
            return col
        n, p, l = self.unindex(M)
        col = {}
        if key[0] == "cur":
            _, i, j, k, q = key
            if l == j:
                for (n2, p2), c in product_expansion(self.cfg, (k, q), (n, p)).items():
                    if n2 < n + k:
                        raise AssertionError("product below the almost-graded lower bound")
                    col[self.index(n2, p2, i)] = c
        elif key[0] == "der":
            # d psi_M along epsilon_d: the wedge factor moves with the points
            df, red = jet_derivative(basis_form(self.cfg, 0, n, p), self.cfg, key[1])
            for (n2, p2), c in expand_fast(df, red).items():
                if n2 < n - 1:
                    raise AssertionError("point derivative below the almost-graded lower bound")
                col[self.index(n2, p2, l)] = c
        else:
            _, k, q = key
            for (n2, p2), c in action_expansion(self.cfg, (k, q), (n, p)).items():
                if n2 < n + k:
                    raise AssertionError("action below the almost-graded lower bound")
                col[self.index(n2, p2, l)] = c
        self._columns[ck] = col
        return col

    @staticmethod
    def _key_degree(key: tuple) -> int:
        if key[0] == "der":
            return -1
        return key[3] if key[0] == "cur" else key[1]

    # wedge action --------------------------------------------------------

    def _occupied_between(self, mono: WedgeMonomial, lo: int, hi: int) -> int:
        """Number of occupied indices strictly between lo and hi."""
        B = mono.charge * self.Ng
        P, H = mono.particles, mono.holes
        cnt = bisect_left(P, hi) - bisect_right(P, lo)
        a, b = max(lo + 1, B), hi - 1
        if b >= a:
            cnt += (b - a + 1) - (bisect_right(H, b) - bisect_left(H, a))
        return cnt

    def _replace(self, mono: WedgeMonomial, M: int, M2: int) -> WedgeMonomial:
        B = mono.charge * self.Ng
        H, P = set(mono.holes), set(mono.particles)
        if M >= B:
            H.add(M)
        else:
            P.discard(M)
        if M2 >= B:
            H.discard(M2)
        else:
            P.add(M2)
        return WedgeMonomial(mono.charge, tuple(sorted(H)), tuple(sorted(P)))

    def _is_occupied(self, mono: WedgeMonomial, M: int) -> bool:
        B = mono.charge * self.Ng
        if M >= B:
            i = bisect_left(mono.holes, M)
            return not (i < len(mono.holes) and mono.holes[i] == M)
        i = bisect_left(mono.particles, M)
        return i < len(mono.particles) and mono.particles[i] == M

    def regularization(self, key: tuple, mono: WedgeMonomial) -> Scalar:
        Ng = self.Ng
        B = mono.charge * Ng
        total = Fraction(0)
        occ_low = list(mono.particles) + [M for M in range(B, Ng) if M not in set(mono.holes)]
        for M in occ_low:
            total += self._column(key, M).get(M, 0)
        unocc_high = [h for h in mono.holes if h >= Ng] + [M for M in range(Ng, B) if M not in set(mono.particles)]
        for M in unocc_high:
            total -= self._column(key, M).get(M, 0)
        return _simplify(total)

    def apply_basis(self, key: tuple, mono: WedgeMonomial) -> dict:
        """Regularized Leibniz action of a basis operator on one monomial."""
        ck = (key, mono)
        hit = self._basis_cache.get(ck)
        if hit is not None:
            return hit
        Ng = self.Ng
        B = mono.charge * Ng
        k = self._key_degree(key)
        max_unocc = mono.holes[-1] if mono.holes else B - 1
        # sources whose images can reach an unoccupied index
        top_src = (max_unocc // Ng - k + 1) * Ng - 1
        sources = list(mono.particles) + [M for M in range(B, top_src + 1) if M not in set(mono.holes)]
        out: dict = {}
        for M in sources:
            for M2, c in self._column(key, M).items():
                if M2 == M or self._is_occupied(mono, M2):
                    continue
                lo, hi = min(M, M2), max(M, M2)
                sign = -1 if self._occupied_between(mono, lo, hi) % 2 else 1
                new = self._replace(mono, M, M2)
                out[new] = _simplify(out.get(new, 0) + sign * c)
        lam = self.regularization(key, mono)
        if lam:
            out[mono] = _simplify(out.get(mono, 0) + lam)
        out = vec_clean(out)
        self._basis_cache[ck] = out
        return out

    def _apply_keys(self, terms: list, v: dict) -> WedgeVector:
        out: dict = {}
        for key, c in terms:
            for mono, a in v.items():
                for m2, b in self.apply_basis(key, mono).items():
                    out[m2] = out.get(m2, 0) + c * a * b
        return WedgeVector(out)

    def current_terms(self, X: CurrentElement) -> list:
        if X.gl_rank != self.g:
            raise DimensionMismatch(f"current over gl({X.gl_rank}) on a gl({self.g}) module")
        terms = []
        for (k, q), x in X.terms:
            for i, j, a in x.entries():
                terms.append((("cur", i + 1, j + 1, k, q), a))
        return terms

    def vector_terms(self, e: KNForm) -> list:
        if e.weight != -1:
            raise WeightMismatch("expected a vector field")
        return [(("vec", k, q), c) for (k, q), c in _vector_coeffs(e, self.cfg).items()]

    def apply_current(self, X: CurrentElement, v: dict, trunc: Truncation | None = None) -> WedgeVector:
        out = self._apply_keys(self.current_terms(X), v)
        if trunc is not None:
            trunc.check(out)
        return out

    def apply_vector_field(self, e: KNForm, v: dict, trunc: Truncation | None = None) -> WedgeVector:
        out = self._apply_keys(self.vector_terms(e), v)
        if trunc is not None:
            trunc.check(out)
        return out

    def derivation_terms(self, direction: int) -> list:
        """Basis operators of the point derivative along epsilon_direction.

        The lift of psi -> d psi is shifted by the identity current on
        1/(z - z_p) times the velocity of P_p.  That current is regular, and the
        shift makes d u(A) = u(dA) hold exactly rather than up to a constant.
        """
        terms = [(("der", direction), Fraction(1))]
        for p, z in enumerate(self.cfg.points, start=1):
            v = _slope(z, direction)
            if v:
                terms += [(("cur", i, i, -1, p), v) for i in range(1, self.g + 1)]
        return terms

    def apply_point_derivative(self, direction: int, v: dict) -> WedgeVector:
        """Derivative of a vector whose wedge factors move with the points."""
        return self._apply_keys(self.derivation_terms(direction), v)

    def apply(self, X, v: dict, trunc: Truncation | None = None) -> WedgeVector:
        if isinstance(X, CurrentElement):
            return self.apply_current(X, v, trunc)
        return self.apply_vector_field(X, v, trunc)

    def single_particle(self, X, M: int) -> dict:
        """Expansion of X psi_M over the psi basis (no regularization)."""
        terms = self.current_terms(X) if isinstance(X, CurrentElement) else self.vector_terms(X)
        out: dict = {}
        for key, c in terms:
            for M2, a in self._column(key, M).items():
                out[M2] = _simplify(out.get(M2, 0) + c * a)
        return vec_clean(out)

    # windows ---------------------------------------------------------------

    def operator_window(self, X, charge: int, trunc: Truncation) -> OperatorWindow:
        cols = self.window_basis(charge, trunc)
        images = [self.apply(X, {m: Fraction(1)}) for m in cols]
        rows = sorted({m for im in images for m in im}, key=lambda m: (-m.degree, m))
        pos = {m: i for i, m in enumerate(rows)}
        entries = {(pos[m], j): c for j, im in enumerate(images) for m, c in im.items()}
        return OperatorWindow(rows, cols, entries)

    def projective_defect(self, X, Y, charge: int, trunc: Truncation) -> Scalar:
        """pi([X,Y]) - [pi(X), pi(Y)], checked to be a scalar on the window."""
        XY = algebra_bracket(X, Y)
        value_ = None
        for mono in self.window_basis(charge, trunc):
            v = {mono: Fraction(1)}
            lhs = self.apply(XY, v) if XY is not None else WedgeVector()
            rhs = self.apply(X, self.apply(Y, v)) - self.apply(Y, self.apply(X, v))
            d = lhs - rhs
            value_ = _scalar_of(d, mono, value_)
        return value_ if value_ is not None else Fraction(0)


def _scalar_of(d: dict, mono, current):
    c = d.get(mono, Fraction(0))
    if any(m != mono for m in d):
        raise NotScalar(f"off-diagonal defect on {mono}")
    if current is not None and c != current:
        raise NotScalar(f"defect {c} on {mono} differs from {current}")
    return c


def algebra_bracket(X, Y):
    """Bracket in the differential operator algebra for currents and vector fields."""
    xc, yc = isinstance(X, CurrentElement), isinstance(Y, CurrentElement)
    if xc and yc:
        return bracket_currents(X, Y)
    if not xc and not yc:
        from .kn_forms import lie_derivative

        return lie_derivative(X, Y)
    if not xc:
        return act_on_current(X, Y)
    return act_on_current(Y, X).scale(-1)
