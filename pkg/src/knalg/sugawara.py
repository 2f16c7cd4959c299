"""Sugawara operators for gl(n) = s(n) + sl(n) acting on the wedge module.

Normal ordering: :x(n,p) y(m,s): is x(n,p) y(m,s) when n <= m, otherwise
y(m,s) x(n,p), so the factor of larger degree always acts first.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil

from .cocycles_central import cocycle_function
from .exact_arith import Scalar, _simplify
from .fermion_rep import FermionModule, NotScalar, Truncation, WedgeVector, _scalar_of, algebra_bracket
from .kn_algebras import CurrentElement, Matrix, _vector_coeffs
from .kn_forms import KNForm, MarkedConfig, basis_form, lie_derivative, omega, residue_sum
from .linalg import solve_linear, vec_add, vec_clean

__all__ = [
    "CriticalLevel",
    "Inconsistent",
    "Summand",
    "ReductiveSplit",
    "sugawara_coeff",
    "window_bound",
    "detect_level",
    "SugawaraOperator",
    "casimir_kappa",
]


class CriticalLevel(ZeroDivisionError):
    """c + kappa = 0 for some summand."""


class Inconsistent(ValueError):
    """Level probes disagree."""


@dataclass
class Summand:
    name: str
    basis: list
    dual: list
    alpha: object  # callable (Matrix, Matrix) -> scalar
    kappa: Fraction
    level: Fraction | None = None


def _tr_form(x: Matrix, y: Matrix):
    return (x @ y).trace()


def _sl_basis(n: int) -> list:
    out = [Matrix.unit(n, i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    out += [Matrix.unit(n, i, i) - Matrix.unit(n, i + 1, i + 1) for i in range(1, n)]
    return out


def _dual_basis(basis: list, alpha) -> list:
    """u^i with alpha(u_i, u^j) = delta_ij."""
    k = len(basis)
    gram = [[alpha(basis[i], basis[j]) for j in range(k)] for i in range(k)]
    dual = []
    for j in range(k):
        rhs = [Fraction(int(i == j)) for i in range(k)]
        # alpha(u_i, sum_l c_l u_l) = delta_ij
        sol = solve_linear(gram, rhs)
        if sol is None:
            raise ValueError("bilinear form is degenerate on the summand")
        m = Matrix.zero(basis[0].n)
        for c, b in zip(sol, basis):
            m = m + b.scale(c)
        dual.append(m)
    return dual


def casimir_kappa(basis: list, dual: list) -> Fraction:
    """Half the eigenvalue of sum ad(u_i) ad(u^i) on the summand itself."""
    if not basis:
        return Fraction(0)
    eig = None
    for y in basis:
        img = Matrix.zero(y.n)
        for u, w in zip(basis, dual):
            img = img + u.bracket(w.bracket(y))
        # img must be a multiple of y
        ratio = None
        for (i, j, a) in y.entries():
            ratio = img[i, j] / a
            break
        if img != y.scale(ratio):
            raise NotScalar("Casimir does not act by a scalar on the adjoint")
        if eig is not None and ratio != eig:
            raise NotScalar("Casimir eigenvalue differs across the summand")
        eig = ratio
    return Fraction(eig) / 2


class ReductiveSplit:
    """gl(n) as scalar matrices plus traceless ones, with dual bases and kappa."""

    def __init__(self, gl_rank: int):
        n = gl_rank
        self.gl_rank = n
        ident = Matrix.identity(n)

        def alpha_s(x, y):
            return _simplify(x.trace() * y.trace() / Fraction(n))

        s_basis = [ident]
        s_dual = [ident.scale(Fraction(1, n))]
        self.summands = [Summand("s", s_basis, s_dual, alpha_s, casimir_kappa(s_basis, s_dual))]
        if n > 1:
            sl = _sl_basis(n)
            sl_dual = _dual_basis(sl, _tr_form)
            self.summands.append(Summand("sl", sl, sl_dual, _tr_form, casimir_kappa(sl, sl_dual)))

    def kappas(self) -> dict:
        return {s.name: s.kappa for s in self.summands}

    def levels(self) -> dict:
        return {s.name: s.level for s in self.summands}


# --------------------------------------------------------------------------
# coefficients


@lru_cache(maxsize=None)
def sugawara_coeff(cfg: MarkedConfig, k: int, r: int, n: int, p: int, m: int, s: int) -> Scalar:
    """Sum of residues of omega^{n,p} omega^{m,s} e_{k,r}."""
    u = omega(cfg, n, p).tensor(omega(cfg, m, s)).tensor(basis_form(cfg, -1, k, r))
    return _simplify(residue_sum(u.coeff, cfg))


@lru_cache(maxsize=None)
def window_bound(cfg: MarkedConfig, scan: int = 6) -> tuple:
    """(lower, upper) offsets of n+m-k over which the coefficients are nonzero."""
    lo = hi = None
    N = cfg.N
    for k in (-1, 0, 1):
        for n in range(-scan, scan + 1):
            for m in range(-scan, scan + 1):
                for p in range(1, N + 1):
                    for s in range(1, N + 1):
                        for r in range(1, N + 1):
                            if sugawara_coeff(cfg, k, r, n, p, m, s):
                                t = n + m - k
                                lo = t if lo is None else min(lo, t)
                                hi = t if hi is None else max(hi, t)
    return lo, hi


# --------------------------------------------------------------------------
# level detection


def detect_level(fm: FermionModule, split: ReductiveSplit, charge: int = 0, trunc: Truncation | None = None,
                 orientation: int = 1, seed: int = 0, checks: int = 10) -> dict:
    """Measure c per summand from [pi X, pi Y] - pi[X, Y] = c alpha(x, y) gamma(A, B).

    The level is stored on each summand and also returned.
    """
    trunc = trunc or Truncation(-4)
    cfg = fm.cfg
    rng = random.Random(seed)
    out = {}
    for summ in split.summands:
        def measure(x, y, a, b):
            X = CurrentElement.basis(cfg, x, *a)
            Y = CurrentElement.basis(cfg, y, *b)
            defect = fm.projective_defect(X, Y, charge, trunc)
            gamma = orientation * cocycle_function(basis_form(cfg, 0, *a), basis_form(cfg, 0, *b), cfg)
            return -defect, _simplify(summ.alpha(x, y) * gamma)

        lhs, pred = measure(summ.basis[0], summ.dual[0], (1, 1), (-1, 1))
        if not pred:
            raise Inconsistent("probe pair has vanishing cocycle")
        c = _simplify(lhs / pred)
        for _ in range(checks):
            i, j = rng.randrange(len(summ.basis)), rng.randrange(len(summ.basis))
            a = (rng.randint(-2, 2), rng.randint(1, cfg.N))
            b = (rng.randint(-2, 2), rng.randint(1, cfg.N))
            lhs, pred = measure(summ.basis[i], summ.dual[j], a, b)
            if lhs != c * pred:
                raise Inconsistent(f"summand {summ.name}: probe {a},{b} gives {lhs} against {c}*{pred}")
        summ.level = c
        out[summ.name] = c
    return out


# --------------------------------------------------------------------------
# operators


class SugawaraOperator:
    """T[e] on a wedge module, assembled from rescaled modes.

    `orientation` must match the one used for level detection.  The prefactor
    is -1/(2(c' + kappa)) with c' = -orientation * c, i.e. the level read in the
    orientation where the classical fermion has level +1.
    """

    def __init__(self, fm: FermionModule, split: ReductiveSplit, orientation: int = 1,
                 summands: list | None = None, extra_window: int = 0):
        self.fm = fm
        self.split = split
        self.cfg = fm.cfg
        self.orientation = orientation
        names = summands or [s.name for s in split.summands]
        self.active = [s for s in split.summands if s.name in names]
        for s in self.active:
            if s.level is None:
                raise ValueError(f"level of summand {s.name} not detected")
            if -orientation * s.level + s.kappa == 0:
                raise CriticalLevel(f"critical level on summand {s.name}")
        lo, hi = window_bound(self.cfg)
        self.t_lo = (lo if lo is not None else 0) - extra_window
        self.t_hi = (hi if hi is not None else 0) + extra_window
        self._mode_cache: dict = {}

    def prefactor(self, s: Summand) -> Fraction:
        return Fraction(-1, 2) / (-self.orientation * s.level + s.kappa)

    def _q_max(self, d: int) -> int:
        Ng = self.fm.Ng
        return (-d + Ng - 1) // Ng

    def _u(self, x: Matrix, idx: tuple, v: dict) -> dict:
        return self.fm.apply_current(CurrentElement.basis(self.cfg, x, *idx), v)

    def mode_on_monomial(self, k: int, r: int, mono) -> dict:
        key = (k, r, mono)
        hit = self._mode_cache.get(key)
        if hit is not None:
            return hit
        N = self.cfg.N
        qmax = self._q_max(mono.degree)
        v = {mono: Fraction(1)}
        # group the double sum by the inner (first acting) factor: for each inner
        # current, the outer factors combine into one operator applied once
        outer: dict = {}
        for summ in self.active:
            pref = self.prefactor(summ)
            for t in range(k + self.t_lo, k + self.t_hi + 1):
                for q in range(ceil(t / 2), qmax + 1):
                    left = t - q
                    for p in range(1, N + 1):
                        for s in range(1, N + 1):
                            # left index on the outside, q acts first
                            l1 = sugawara_coeff(self.cfg, k, r, left, p, q, s)
                            if l1:
                                for x, y in zip(summ.basis, summ.dual):
                                    outer.setdefault((y, q, s), []).append((x, (left, p), pref * l1))
                            if left != q:
                                l2 = sugawara_coeff(self.cfg, k, r, q, p, left, s)
                                if l2:
                                    for x, y in zip(summ.basis, summ.dual):
                                        outer.setdefault((x, q, p), []).append((y, (left, s), pref * l2))
        out: dict = {}
        for (y, q, s), parts in outer.items():
            inner = self._u(y, (q, s), v)
            if not inner:
                continue
            keys: dict = {}
            for x, (n, p), c in parts:
                for i, j, a in x.entries():
                    kk = ("cur", i + 1, j + 1, n, p)
                    keys[kk] = keys.get(kk, 0) + c * a
            for kk, c in keys.items():
                if not c:
                    continue
                for m1, a in inner.items():
                    ca = c * a
                    for m2, b in self.fm.apply_basis(kk, m1).items():
                        out[m2] = out.get(m2, 0) + ca * b
        out = vec_clean(out)
        self._mode_cache[key] = out
        return out

    def mode(self, k: int, r: int, v: dict) -> WedgeVector:
        out: dict = {}
        for mono, a in v.items():
            out = vec_add(out, self.mode_on_monomial(k, r, mono), a)
        return WedgeVector(out)

    def of_field(self, e: KNForm, v: dict) -> WedgeVector:
        """T[e] v with e expanded over the vector field basis."""
        out: dict = {}
        for (k, r), c in _vector_coeffs(e, self.cfg).items():
            out = vec_add(out, self.mode(k, r, v), c)
        return WedgeVector(out)

    def mode_window(self, k: int, r: int, charge: int, trunc: Truncation):
        from .fermion_rep import OperatorWindow

        cols = self.fm.window_basis(charge, trunc)
        images = [self.mode(k, r, {m: Fraction(1)}) for m in cols]
        rows = sorted({m for im in images for m in im}, key=lambda m: (-m.degree, m))
        pos = {m: i for i, m in enumerate(rows)}
        entries = {(pos[m], j): c for j, im in enumerate(images) for m, c in im.items()}
        return OperatorWindow(rows, cols, entries)

    # checks ------------------------------------------------------------------

    def fundamental_defect(self, e: KNForm, x: Matrix, A_idx: tuple, charge: int, trunc: Truncation) -> dict:
        """[T[e], x(A)] - x(e.A) on each window monomial; returns the first nonzero defect or {}."""
        X = CurrentElement.basis(self.cfg, x, *A_idx)
        eA = algebra_bracket(e, X)
        for mono in self.fm.window_basis(charge, trunc):
            v = {mono: Fraction(1)}
            lhs = WedgeVector(self.of_field(e, self.fm.apply_current(X, v))) - WedgeVector(
                self.fm.apply_current(X, self.of_field(e, v))
            )
            d = lhs - self.fm.apply_current(eA, v)
            if d:
                return {"monomial": mono, "defect": d}
        return {}

    def projective_defect(self, e: KNForm, f: KNForm, charge: int, trunc: Truncation) -> Scalar:
        """T([e,f]) - [T[e], T[f]], checked to be a scalar on the window."""
        ef = lie_derivative(e, f)
        val = None
        for mono in self.fm.window_basis(charge, trunc):
            v = {mono: Fraction(1)}
            lhs = self.of_field(ef, v)
            rhs = self.of_field(e, self.of_field(f, v)) - self.of_field(f, self.of_field(e, v))
            val = _scalar_of(lhs - rhs, mono, val)
        return val if val is not None else Fraction(0)
