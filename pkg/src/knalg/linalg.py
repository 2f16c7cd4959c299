"""Exact Gaussian elimination over Q and over the jet ring.

Jet-valued entries form a local ring, so pivots are only taken on entries whose
value part is nonzero.  Sparse vectors are plain dicts {column: scalar}.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Hashable, Sequence

from .exact_arith import _inv, _simplify, value

__all__ = ["nullspace", "solve_linear", "rank", "Echelon", "RankDefect", "vec_add", "vec_scale", "vec_clean"]


class RankDefect(ArithmeticError):
    """A column carries only nilpotent entries: the span changes dimension along the jets."""


def vec_add(a: dict, b: dict, s=1) -> dict:
    """Return a + s*b without mutating the inputs."""
    out = dict(a)
    for k, x in b.items():
        y = out.get(k)
        t = _simplify(x * s if y is None else y + x * s)
        if t:
            out[k] = t
        elif y is not None:
            del out[k]
    return out


def vec_scale(a: dict, s) -> dict:
    if not s:
        return {}
    return {k: _simplify(x * s) for k, x in a.items()}


def vec_clean(a: dict) -> dict:
    return {k: _simplify(x) for k, x in a.items() if x}


def _rref(rows: list, ncols: int) -> tuple:
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if value(m[i][c]) != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = _inv(m[r][c])
        m[r] = [_simplify(x * inv) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [_simplify(x - f * y) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    if not rows:
        return 0
    ncols = len(rows[0]) if ncols is None else ncols
    return len(_rref(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list:
    """Basis of {x : rows x = 0} over Q."""
    red, pivots = _rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            x[pc] = _simplify(-row[f])
        basis.append(x)
    return basis


def solve_linear(rows: Sequence[Sequence], rhs: Sequence) -> list | None:
    """One exact solution of rows x = rhs, or None if inconsistent."""
    if not rows:
        return [] if not any(rhs) else None
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = _rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, pc in zip(red, pivots):
        x[pc] = row[ncols]
    return x


class Echelon:
    """Incrementally maintained reduced row echelon form of sparse vectors.

    `priority` orders columns: lower values are preferred as pivots.  Rows are
    kept fully reduced, so reducing a vector needs a single pass.
    """

    def __init__(self, priority: Callable[[Hashable], object] = lambda c: c):
        self.priority = priority
        self.rows: dict = {}

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, v: dict) -> dict:
        out = dict(v)
        for c in [c for c in out if c in self.rows]:
            f = out.get(c)
            if f:
                out = vec_add(out, self.rows[c], -f)
        return out

    def add(self, v: dict, strict: bool = True) -> bool:
        """Insert v; returns True if it enlarged the span."""
        r = vec_clean(self.reduce(v))
        if not r:
            return False
        cands = [c for c, x in r.items() if value(x) != 0]
        if not cands:
            if strict:
                raise RankDefect("vector reduces to a purely nilpotent remainder")
            return False
        best = min(r, key=self.priority)
        piv = min(cands, key=self.priority)
        if strict and self.priority(best) < self.priority(piv):
            raise RankDefect("nilpotent entry ahead of the first invertible pivot")
        row = vec_scale(r, _inv(r[piv]))
        for c, other in list(self.rows.items()):
            f = other.get(piv)
            if f:
                self.rows[c] = vec_add(other, row, -f)
        self.rows[piv] = row
        return True

    def contains(self, v: dict) -> bool:
        return not vec_clean(self.reduce(v))

    def pivots(self) -> list:
        return sorted(self.rows, key=self.priority)
