"""Geometric two-cocycles, locality scans and central extensions.

Every cycle integral is evaluated as the sum of residues over the in-points.
`orientation=-1` negates all of them at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .exact_arith import Scalar, _simplify
from .kn_algebras import (
    CurrentElement,
    DimensionMismatch,
    Matrix,
    bracket_currents,
    bracket_expansion,
    action_expansion,
)
from .kn_forms import KNForm, MarkedConfig, WeightMismatch, basis_form, residue_sum
from .linalg import solve_linear

__all__ = [
    "BilinearFormGL",
    "AffineElement",
    "cocycle_function",
    "cocycle_vector",
    "cocycle_mixing",
    "cocycle_current",
    "affine_bracket",
    "check_local",
    "LocalityReport",
    "basis_evaluator",
    "coboundary_for_projective_change",
    "coboundary_for_affine_change",
]


def _check(f: KNForm, w: int, what: str) -> None:
    if f.weight != w:
        raise WeightMismatch(f"{what} must have weight {w}, got {f.weight}")


def cocycle_function(A: KNForm, B: KNForm, cfg: MarkedConfig, orientation: int = 1) -> Scalar:
    """Sum of residues of A dB."""
    _check(A, 0, "A")
    _check(B, 0, "B")
    u = A.tensor(KNForm(0, B.coeff.deriv())).coeff
    return _simplify(orientation * residue_sum(u, cfg))


def cocycle_vector(e: KNForm, f: KNForm, cfg: MarkedConfig, R: KNForm | None = None, orientation: int = 1) -> Scalar:
    """(1/12) sum res( (e'''f - e f''')/2 - R (e'f - e f') )."""
    _check(e, -1, "e")
    _check(f, -1, "f")
    a, b = e.coeff, f.coeff
    a1, b1 = a.deriv(), b.deriv()
    a3, b3 = a1.deriv().deriv(), b1.deriv().deriv()
    u = (KNForm(0, a3).tensor(KNForm(0, b)) - KNForm(0, a).tensor(KNForm(0, b3))).scale(Fraction(1, 2))
    if R is not None and not R.is_zero():
        _check(R, 2, "R")
        w = KNForm(0, a1).tensor(KNForm(0, b)) - KNForm(0, a).tensor(KNForm(0, b1))
        u = u - KNForm(0, R.coeff).tensor(w)
    return _simplify(orientation * Fraction(1, 12) * residue_sum(u.coeff, cfg))


def cocycle_mixing(e: KNForm, A: KNForm, cfg: MarkedConfig, T: KNForm | None = None, orientation: int = 1) -> Scalar:
    """Sum of residues of e A'' + T e A'."""
    _check(e, -1, "e")
    _check(A, 0, "A")
    a1 = A.coeff.deriv()
    u = KNForm(0, e.coeff).tensor(KNForm(0, a1.deriv()))
    if T is not None and not T.is_zero():
        _check(T, 1, "T")
        u = u + KNForm(0, T.coeff).tensor(KNForm(0, e.coeff)).tensor(KNForm(0, a1))
    return _simplify(orientation * residue_sum(u.coeff, cfg))


@dataclass(frozen=True)
class BilinearFormGL:
    """alpha(x, y) = r1 tr(xy) + r2 tr(x) tr(y)."""

    r1: Fraction = Fraction(1)
    r2: Fraction = Fraction(0)

    def __call__(self, x: Matrix, y: Matrix):
        if x.n != y.n:
            raise DimensionMismatch("matrices of different size")
        return _simplify(self.r1 * (x @ y).trace() + self.r2 * x.trace() * y.trace())


_FUNCTION_CACHE: dict = {}


def _gamma_basis(cfg: MarkedConfig, a: tuple, b: tuple) -> Scalar:
    key = (cfg, a, b)
    if key not in _FUNCTION_CACHE:
        _FUNCTION_CACHE[key] = cocycle_function(basis_form(cfg, 0, *a), basis_form(cfg, 0, *b), cfg)
    return _FUNCTION_CACHE[key]


def cocycle_current(X: CurrentElement, Y: CurrentElement, alpha: BilinearFormGL, orientation: int = 1) -> Scalar:
    """alpha(x, y) times the function cocycle, extended bilinearly."""
    if X.gl_rank != Y.gl_rank:
        raise DimensionMismatch("currents over different gl ranks")
    total = Fraction(0)
    for a, x in X.terms:
        for b, y in Y.terms:
            s = alpha(x, y)
            if s:
                total = total + s * _gamma_basis(X.cfg, a, b)
    return _simplify(orientation * total)


@dataclass(frozen=True)
class AffineElement:
    current: CurrentElement
    central: Scalar = Fraction(0)

    def __add__(self, other: "AffineElement") -> "AffineElement":
        return AffineElement(self.current + other.current, _simplify(self.central + other.central))

    def scale(self, s) -> "AffineElement":
        return AffineElement(self.current.scale(s), _simplify(self.central * s))

    def __sub__(self, other):
        return self + other.scale(-1)

    def is_zero(self) -> bool:
        return self.current.is_zero() and not self.central


def affine_bracket(X: AffineElement, Y: AffineElement, alpha: BilinearFormGL, orientation: int = 1) -> AffineElement:
    """Bracket of the central extension: t is central."""
    cur = bracket_currents(X.current, Y.current)
    return AffineElement(cur, cocycle_current(X.current, Y.current, alpha, orientation))


# --------------------------------------------------------------------------
# locality


@dataclass
class LocalityReport:
    upper: int | None
    lower: int | None
    is_local: bool
    nonzero: int

    def as_dict(self) -> dict:
        return {"upper": self.upper, "lower": self.lower, "is_local": self.is_local, "nonzero": self.nonzero}


def basis_evaluator(kind: str, cfg: MarkedConfig, orientation: int = 1, R: KNForm | None = None,
                    T: KNForm | None = None, gl_rank: int = 1, alpha: BilinearFormGL | None = None) -> Callable:
    """A function (left index, right index) -> cocycle value on basis elements.

    For "current" the identity matrix is used on both sides.
    """
    if kind == "function":
        return lambda a, b: cocycle_function(basis_form(cfg, 0, *a), basis_form(cfg, 0, *b), cfg, orientation)
    if kind == "vector":
        return lambda a, b: cocycle_vector(basis_form(cfg, -1, *a), basis_form(cfg, -1, *b), cfg, R, orientation)
    if kind == "mixing":
        return lambda a, b: cocycle_mixing(basis_form(cfg, -1, *a), basis_form(cfg, 0, *b), cfg, T, orientation)
    if kind == "current":
        alpha = alpha or BilinearFormGL()
        x = Matrix.identity(gl_rank)
        return lambda a, b: cocycle_current(
            CurrentElement.basis(cfg, x, *a), CurrentElement.basis(cfg, x, *b), alpha, orientation
        )
    raise ValueError(f"unknown cocycle type {kind!r}")


def check_local(evaluator: Callable, cfg: MarkedConfig, window: tuple) -> LocalityReport:
    """Scan all basis pairs with degrees in window and report the band of nonzero degree sums.

    A cocycle counts as local on the window when its band stays away from the
    window's extreme degree sums.
    """
    lo, hi = window
    upper = lower = None
    count = 0
    for n in range(lo, hi + 1):
        for m in range(lo, hi + 1):
            for p in range(1, cfg.N + 1):
                for r in range(1, cfg.N + 1):
                    if evaluator((n, p), (m, r)):
                        count += 1
                        s = n + m
                        upper = s if upper is None else max(upper, s)
                        lower = s if lower is None else min(lower, s)
    is_local = upper is None or (upper < 2 * hi and lower > 2 * lo)
    return LocalityReport(upper, lower, is_local, count)


# --------------------------------------------------------------------------
# coboundaries


def coboundary_for_projective_change(cfg: MarkedConfig, Q: KNForm, window: tuple) -> dict | None:
    """Find phi with gamma_R - gamma_{R+Q} = phi([e, f]) on basis pairs of the window.

    Returns {basis index: phi value} or None if no such linear form exists.
    """
    lo, hi = window
    idx = [(n, p) for n in range(lo, hi + 1) for p in range(1, cfg.N + 1)]
    cols = {}
    eqs = []
    for a in idx:
        for b in idx:
            diff = cocycle_vector(basis_form(cfg, -1, *a), basis_form(cfg, -1, *b), cfg) - cocycle_vector(
                basis_form(cfg, -1, *a), basis_form(cfg, -1, *b), cfg, Q
            )
            br = bracket_expansion(cfg, a, b)
            for k in br:
                cols.setdefault(k, len(cols))
            eqs.append((br, diff))
    return _solve_phi(eqs, cols)


def coboundary_for_affine_change(cfg: MarkedConfig, S1: KNForm, window: tuple) -> dict | None:
    """Find phi on functions with gamma_T - gamma_{T+S1} = phi(e.A) on basis pairs."""
    lo, hi = window
    idx = [(n, p) for n in range(lo, hi + 1) for p in range(1, cfg.N + 1)]
    cols: dict = {}
    eqs = []
    for a in idx:
        for b in idx:
            e_, A_ = basis_form(cfg, -1, *a), basis_form(cfg, 0, *b)
            diff = cocycle_mixing(e_, A_, cfg) - cocycle_mixing(e_, A_, cfg, S1)
            act = action_expansion(cfg, a, b)
            for k in act:
                cols.setdefault(k, len(cols))
            eqs.append((act, diff))
    return _solve_phi(eqs, cols)


def _solve_phi(eqs: list, cols: dict) -> dict | None:
    if not cols:
        return {} if all(not d for _, d in eqs) else None
    rows = []
    rhs = []
    for br, diff in eqs:
        row = [Fraction(0)] * len(cols)
        for k, c in br.items():
            row[cols[k]] = c
        rows.append(row)
        rhs.append(diff)
    sol = solve_linear(rows, rhs)
    if sol is None:
        return None
    inv = {v: k for k, v in cols.items()}
    return {inv[i]: x for i, x in enumerate(sol) if x}
