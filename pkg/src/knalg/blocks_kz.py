"""Conformal blocks of the wedge module and the connection over moving points.

Moduli derivatives are exact: a point carries a jet direction (epsilon_1 or
epsilon_2), every basis object is built over the jet configuration, and the
derivative is read off the epsilon part.  Wedge factors psi = A_{n,p} (x) v move
with the points, so the derivative of a section picks up the point derivation D
of the fermion module and the connection is d + Gamma with
Gamma = P (D + T(e_X)) iota on the block basis.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .exact_arith import (
    RationalFunction,
    _coeffs_at_infinity,
    _inv,
    _simplify,
    d1_part,
    parts,
    value,
)
from .fermion_rep import FermionModule, NotScalar, _scalar_of, Truncation, WedgeMonomial
from .kn_algebras import CurrentElement, Matrix, gl_basis
from .kn_forms import (
    KNForm,
    MarkedConfig,
    WindowTooSmall,
    as_rf,
    basis_form,
    combine,
    jet_derivative,
    lie_derivative,
    order_at_infinity,
)
from .linalg import RankDefect, nullspace, solve_linear, vec_add, vec_clean
from .sugawara import ReductiveSplit, SugawaraOperator, detect_level

__all__ = [
    "regular_basis",
    "derivative",
    "CoinvariantSpace",
    "regular_span",
    "conformal_blocks",
    "PullBack",
    "pullback",
    "BlockBundle",
    "derivative_identities",
    "rational_reconstruct",
    "kz_emit",
]


# --------------------------------------------------------------------------
# regular subalgebras


def regular_basis(cfg: MarkedConfig, lam: int, lo: int, hi: int, order: int) -> list:
    """Basis of span{f^lam_{n,p} : lo <= n <= hi} with order >= `order` at infinity.

    Orders are weight corrected.  Computed on the base configuration as the
    kernel of the low coefficients at infinity; entries are {(n, p): c}.
    """
    base = cfg.base()
    idx = [(n, p) for n in range(lo, hi + 1) for p in range(1, base.N + 1)]
    if not idx:
        return []
    # order of the rational coefficient must be >= order + 2 lam
    need = order + 2 * lam
    data = []
    low = need
    for k in idx:
        start, cs = _coeffs_at_infinity(basis_form(base, lam, *k).rf(), need - 1)
        data.append((start, cs))
        low = min(low, start)
    rows = []
    for j in range(low, need):
        rows.append([cs[j - s] if 0 <= j - s < len(cs) else Fraction(0) for s, cs in data])
    ker = nullspace(rows, len(idx)) if rows else [[Fraction(int(i == j)) for i in range(len(idx))] for j in range(len(idx))]
    return [{k: c for k, c in zip(idx, vec) if c} for vec in ker]


def derivative(f: KNForm, cfg: MarkedConfig, direction: int = 1) -> KNForm:
    """Value of the derivative of a jet form along epsilon_direction."""
    return _value_form(jet_derivative(f, cfg, direction)[0])


def _value_form(f: KNForm) -> KNForm:
    return KNForm(f.weight, as_rf(f.coeff).component(0))


# --------------------------------------------------------------------------
# coinvariants


def _prio(m: WedgeMonomial) -> tuple:
    return (m.degree, m)


class _LeadingEchelon:
    """Forward echelon with pivots at leading entries, columns ordered by degree ascending."""

    def __init__(self):
        self.rows: dict = {}
        self.deferred: list = []

    def reduce(self, v: dict) -> dict:
        w = dict(v)
        heap = [_prio(c) for c in w if c in self.rows]
        heapq.heapify(heap)
        seen = set()
        while heap:
            _, c = heapq.heappop(heap)
            if c in seen:
                continue
            seen.add(c)
            f = w.get(c)
            if not f:
                continue
            for c2, a in self.rows[c].items():
                t = _simplify(w.get(c2, 0) - f * a)
                if t:
                    w[c2] = t
                else:
                    w.pop(c2, None)
                if c2 in self.rows and c2 not in seen:
                    heapq.heappush(heap, _prio(c2))
        return w

    def add(self, v: dict) -> bool:
        r = self.reduce(v)
        if not r:
            return False
        c = min(r, key=_prio)
        if value(r[c]) == 0:
            self.deferred.append(r)
            return False
        inv = _inv(r[c])
        self.rows[c] = {k: _simplify(x * inv) for k, x in r.items()}
        return True

    def settle(self) -> list:
        """Retry deferred vectors; return those that still have a nilpotent leading entry."""
        progress = True
        while progress and self.deferred:
            progress = False
            pending, self.deferred = self.deferred, []
            for r in pending:
                if self.add(r):
                    progress = True
        left = [self.reduce(r) for r in self.deferred]
        self.deferred = []
        return [r for r in left if r]


@dataclass
class CoinvariantSpace:
    """Quotient of the degree window [depth, 0] by the regular current span.

    `basis` lists the monomials whose classes form the block basis (the section
    iota); `project` expresses any vector in that basis.
    """

    fm: FermionModule
    charge: int
    depth: int
    gen_depth: int
    basis: list
    echelon: _LeadingEchelon
    stabilized: bool | None = None
    dropped: int = 0

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def project(self, w: dict) -> list:
        """Coordinates of the class of w in the block basis."""
        r = self.echelon.reduce(w)
        pos = {m: i for i, m in enumerate(self.basis)}
        out = [Fraction(0)] * len(self.basis)
        for m, c in r.items():
            if m not in pos:
                raise WindowTooSmall(f"remainder on {m} (degree {m.degree}) outside the block basis")
            out[pos[m]] = c
        return out

    def in_span(self, w: dict) -> bool:
        return not any(self.project(w))

    def as_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "stabilized": self.stabilized,
            "basis": [m.as_json() for m in self.basis],
        }


def _regular_generators(fm: FermionModule, charge: int, gen_depth: int, n_lo: int) -> Iterable[dict]:
    g = fm.g
    cfg = fm.cfg
    xs = gl_basis(g)
    vs = fm.window_basis(charge, Truncation(gen_depth))
    for n in range(-1, n_lo - 1, -1):
        for p in range(1, cfg.N + 1):
            for x in xs:
                X = CurrentElement.basis(cfg, x, n, p)
                for v in vs:
                    w = fm.apply_current(X, {v: Fraction(1)})
                    if w:
                        yield w


def _n_lo(fm: FermionModule, depth: int, gen_depth: int) -> int:
    # u(A_{n,p}) lowers the index degree by at least (-n - 1) N g - (N g - 1);
    # only images reaching degree >= depth from degree >= gen_depth matter.
    Ng = fm.Ng
    return -((0 - depth) // Ng + 3)


def regular_span(fm: FermionModule, charge: int, trunc: Truncation, gen_depth: int | None = None) -> list:
    """u(A) v for A in the regular function window, u in a gl basis, v in the window."""
    gen_depth = trunc.d_min if gen_depth is None else gen_depth
    return list(_regular_generators(fm, charge, gen_depth, _n_lo(fm, trunc.d_min, gen_depth)))


def _build_space(fm: FermionModule, charge: int, depth: int, gen_depth: int) -> CoinvariantSpace:
    ech = _LeadingEchelon()
    for w in _regular_generators(fm, charge, gen_depth, _n_lo(fm, depth, gen_depth)):
        ech.add(w)
    left = ech.settle()
    dropped = 0
    for r in left:
        lead = min(r, key=_prio)
        if lead.degree >= depth:
            raise RankDefect(f"nilpotent leading entry at {lead} inside the window")
        dropped += 1
    window = fm.window_basis(charge, Truncation(depth))
    basis = sorted((m for m in window if m not in ech.rows), key=lambda m: (-m.degree, m))
    return CoinvariantSpace(fm, charge, depth, gen_depth, basis, ech, None, dropped)


def conformal_blocks(fm: FermionModule, charge: int = 0, depth: int = -6, extra: int | None = None,
                     check: bool = True) -> CoinvariantSpace:
    """Blocks on the window [depth, 0]; generators come from degrees >= depth - extra.

    With `check`, the generator depth is pushed two steps further and the
    basis must not change for `stabilized` to be True.
    """
    extra = fm.Ng if extra is None else extra
    space = _build_space(fm, charge, depth, depth - extra)
    if check:
        deeper = _build_space(fm, charge, depth, depth - extra - 2)
        space.stabilized = deeper.basis == space.basis
    return space


# --------------------------------------------------------------------------
# pull-backs and the connection


@dataclass
class PullBack:
    point: int
    e_X: KNForm
    correction: dict = field(default_factory=dict)


def pullback(cfg: MarkedConfig, p: int, correction: dict | None = None) -> PullBack:
    """e_{-1,p}, optionally plus a regular vector field given by basis coefficients."""
    if not 1 <= p <= cfg.N:
        raise ValueError(f"point index {p} out of range")
    e_X = basis_form(cfg, -1, -1, p)
    correction = dict(correction or {})
    if correction:
        e_X = e_X + combine(cfg, -1, correction)
    return PullBack(p, e_X, correction)


def _mat_component(M: list, k: int) -> list:
    return [[parts(x)[k] for x in row] for row in M]


def _mat_mul(A: list, B: list) -> list:
    n, m, l = len(A), len(B), len(B[0]) if B else 0
    return [[_simplify(sum((A[i][k] * B[k][j] for k in range(m)), Fraction(0))) for j in range(l)] for i in range(n)]


def _mat_sub(A: list, B: list) -> list:
    return [[_simplify(a - b) for a, b in zip(r, s)] for r, s in zip(A, B)]


def _mat_add(A: list, B: list) -> list:
    return [[_simplify(a + b) for a, b in zip(r, s)] for r, s in zip(A, B)]


def scalar_of_matrix(M: list):
    """c if M = c id, else raise NotScalar."""
    n = len(M)
    if n == 0:
        return Fraction(0)
    c = M[0][0]
    for i in range(n):
        for j in range(n):
            if M[i][j] != (c if i == j else 0):
                raise NotScalar("matrix is not a multiple of the identity")
    return c


class BlockBundle:
    """Everything needed for the connection at one configuration.

    `jets` attaches epsilon directions to points ({point: 1 or 2}); levels are
    detected on the base configuration.
    """

    def __init__(self, points, gl_rank: int = 1, charge: int = 0, depth: int = -6, jets: dict | None = None,
                 orientation: int = 1, extra: int | None = None, check: bool = True):
        base = MarkedConfig.of(points).base() if not isinstance(points, MarkedConfig) else points.base()
        self.base = base
        self.cfg = base.with_jets(jets or {})
        self.jets = dict(jets or {})
        self.gl_rank = gl_rank
        self.charge = charge
        self.depth = depth
        self.orientation = orientation
        self.split = ReductiveSplit(gl_rank)
        base_fm = FermionModule(base, gl_rank)
        detect_level(base_fm, self.split, charge, Truncation(-3), orientation)
        self.fm = FermionModule(self.cfg, gl_rank) if self.jets else base_fm
        self.base_fm = base_fm
        self.sug = SugawaraOperator(self.fm, self.split, orientation)
        self.space = conformal_blocks(self.fm, charge, depth, extra, check)

    @property
    def dimension(self) -> int:
        return self.space.dimension

    def direction_of(self, p: int) -> int:
        d = self.jets.get(p)
        if d not in (1, 2):
            raise ValueError(f"point {p} carries no jet direction")
        return d

    def gamma(self, pb: PullBack) -> list:
        """Jet-valued matrix of P (D_X + T(e_X)) iota on the block basis.

        D_X differentiates the wedge factors, which move with the points.
        """
        d = self.direction_of(pb.point)
        cols = []
        for m in self.space.basis:
            v = {m: Fraction(1)}
            w = vec_add(self.sug.of_field(pb.e_X, v), self.fm.apply_point_derivative(d, v))
            cols.append(self.space.project(w))
        n = len(cols)
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    def connection(self, p: int, correction: dict | None = None) -> list:
        return self.gamma(pullback(self.cfg, p, correction))

    def curvature(self, p: int, q: int):
        """Scalar of [nabla_p, nabla_q] on blocks; p and q carry epsilon_1 and epsilon_2."""
        if p == q:
            return Fraction(0)
        dp, dq = self.direction_of(p), self.direction_of(q)
        Gp, Gq = self.connection(p), self.connection(q)
        vp, vq = _mat_component(Gp, 0), _mat_component(Gq, 0)
        F = _mat_sub(_mat_component(Gq, dp), _mat_component(Gp, dq))
        F = _mat_add(F, _mat_sub(_mat_mul(vp, vq), _mat_mul(vq, vp)))
        return scalar_of_matrix(F)

    # operator identities on the module --------------------------------------

    def _value_vec(self, w: dict) -> dict:
        return vec_clean({k: value(c) for k, c in w.items()})

    def _moving_commutator(self, d: int, op, v: dict) -> dict:
        """[D, op] v at the base, where op acts on base vectors."""
        D = lambda w: self._value_vec(self.fm.apply_point_derivative(d, w))
        return vec_add(D(op(v)), op(D(v)), -1)

    def correspondence_defect(self, p: int, A_coeffs: dict, x: Matrix) -> dict:
        """[nabla_X, u(A)] - u(A^X) on the window, with A^X = d_X A + e_X.A.

        A is given by base-basis coefficients and rebuilt over the jet
        configuration.  The difference must be a central scalar and A^X must
        vanish at infinity for A in the regular subalgebra.
        """
        d = self.direction_of(p)
        cfg = self.cfg
        A = combine(cfg, 0, A_coeffs)
        e_X = pullback(cfg, p).e_X
        A_X = derivative(A, cfg, d) + lie_derivative(_value_form(e_X), _value_form(A))
        Xj = CurrentElement.of(cfg, x, A)
        Xv = CurrentElement.of(self.base, x, _value_form(A))
        AXc = CurrentElement.of(self.base, x, A_X)
        sug_base = SugawaraOperator(self.base_fm, self.split, self.orientation)
        eXv = _value_form(e_X)
        u = lambda w: self.base_fm.apply_current(Xv, w)
        scalar = None
        for m in self.base_fm.window_basis(self.charge, Truncation(self.depth)):
            v = {m: Fraction(1)}
            du = {k: parts(c)[d] for k, c in self.fm.apply_current(Xj, v).items() if parts(c)[d]}
            du = vec_add(du, self._moving_commutator(d, u, v))
            comm = vec_add(sug_base.of_field(eXv, u(v)), u(sug_base.of_field(eXv, v)), -1)
            diff = vec_clean(vec_add(vec_add(du, comm), self.base_fm.apply_current(AXc, v), -1))
            try:
                scalar = _scalar_of(diff, m, scalar)
            except NotScalar:
                return {"ok": False, "monomial": m.as_json(), "regular": None, "scalar": None}
        regular = _order_ok(A_X, 1)
        return {"ok": regular, "regular": regular, "scalar": scalar if scalar is not None else Fraction(0)}


# --------------------------------------------------------------------------
# derivative identities


def _order_ok(f: KNForm, order: int) -> bool:
    return f.is_zero() or order_at_infinity(f) >= order


def derivative_identities(points, p: int, samples: int = 20, seed: int = 0, q: int | None = None,
                          gl_rank: int = 1, charge: int = 0, depth: int = -4, window: tuple = (-4, -1),
                          with_operators: bool = True) -> dict:
    """Check the jet identities for direction p (and q for the commutator identity).

    Returns a report {name: {"checked": k, "failures": [...]}}.
    """
    rng = random.Random(seed)
    base = MarkedConfig.of(points).base() if not isinstance(points, MarkedConfig) else points.base()
    N = base.N
    jets = {p: 1}
    if q is not None and q != p:
        jets[q] = 2
    cfg = base.with_jets(jets)
    e_X = pullback(cfg, p).e_X
    eXv = _value_form(e_X)
    report: dict = {}

    def rec(name, ok, info):
        r = report.setdefault(name, {"checked": 0, "failures": []})
        r["checked"] += 1
        if not ok:
            r["failures"].append(info)

    reg_f = regular_basis(base, 0, window[0], window[1], 1)
    reg_v = regular_basis(base, -1, window[0], window[1], 2)

    def rand_combo(basis):
        out: dict = {}
        for b in basis:
            c = Fraction(rng.randint(-3, 3))
            for k, a in b.items():
                out[k] = out.get(k, 0) + c * a
        return {k: v for k, v in out.items() if v}

    for s in range(samples):
        # functions: A^X = d_X A + e_X.A vanishes at infinity
        coeffs = rand_combo(reg_f)
        A = combine(cfg, 0, coeffs)
        AX = derivative(A, cfg, 1) + lie_derivative(eXv, _value_form(A))
        rec("function_regular", _order_ok(AX, 1), {"A": _key_json(coeffs)})
        # vector fields: e^X = d_X e + [e_X, e] vanishes to order two
        coeffs = rand_combo(reg_v)
        ev = combine(cfg, -1, coeffs)
        eX = derivative(ev, cfg, 1) + lie_derivative(eXv, _value_form(ev))
        rec("vector_regular", _order_ok(eX, 2), {"e": _key_json(coeffs)})
        if q is not None and q != p and s == 0:
            e_Y = pullback(cfg, q).e_X
            comb = lie_derivative(eXv, _value_form(e_Y)) + derivative(e_Y, cfg, 1) - derivative(e_X, cfg, 2)
            rec("pullback_bracket", _order_ok(comb, 2), {"p": p, "q": q})

    if with_operators:
        bb = BlockBundle(base, gl_rank, charge, depth, {p: 1}, check=False)
        xs = gl_basis(gl_rank)
        for s in range(samples):
            n = rng.randint(-3, 2)
            r = rng.randint(1, N)
            x = rng.choice(xs)
            ok = _normal_lemma(bb, x, basis_form(bb.cfg, 0, n, r)) == 0
            rec("current_derivative", ok, {"n": n, "p": r})
            k = rng.randint(-2, 2)
            r = rng.randint(1, N)
            ok = _norm1(bb, basis_form(bb.cfg, -1, k, r)) is not None
            rec("sugawara_derivative_scalar", ok, {"k": k, "p": r})
    return report


def _key_json(d: dict) -> list:
    from .exact_arith import frac_str

    return [[n, p, frac_str(c)] for (n, p), c in sorted(d.items())]


def _normal_lemma(bb: BlockBundle, x: Matrix, A: KNForm):
    """d_X u(A) - u(d_X A) on the window, with the wedge factors moving.

    Returns the central scalar it reduces to, or None if it is not central.
    """
    Xj = CurrentElement.of(bb.cfg, x, A)
    Xv = CurrentElement.of(bb.base, x, _value_form(A))
    dA = CurrentElement.of(bb.base, x, derivative(A, bb.cfg, 1))
    u = lambda w: bb.base_fm.apply_current(Xv, w)
    c = None
    for m in bb.base_fm.window_basis(bb.charge, Truncation(bb.depth)):
        v = {m: Fraction(1)}
        du = {k: d1_part(a) for k, a in bb.fm.apply_current(Xj, v).items() if d1_part(a)}
        du = vec_add(du, bb._moving_commutator(1, u, v))
        try:
            c = _scalar_of(vec_clean(vec_add(du, bb.base_fm.apply_current(dA, v), -1)), m, c)
        except NotScalar:
            return None
    return c if c is not None else Fraction(0)


def _norm1(bb: BlockBundle, e: KNForm):
    """d_X T(e) - T(d_X e) on the window; its central scalar or None."""
    sug_base = SugawaraOperator(bb.base_fm, bb.split, bb.orientation)
    de = derivative(e, bb.cfg, 1)
    ev = _value_form(e)
    T = lambda w: sug_base.of_field(ev, w)
    c = None
    for m in bb.base_fm.window_basis(bb.charge, Truncation(bb.depth)):
        v = {m: Fraction(1)}
        dT = {k: d1_part(a) for k, a in bb.sug.of_field(e, v).items() if d1_part(a)}
        dT = vec_add(dT, bb._moving_commutator(1, T, v))
        try:
            c = _scalar_of(vec_clean(vec_add(dT, sug_base.of_field(de, v), -1)), m, c)
        except NotScalar:
            return None
    return c if c is not None else Fraction(0)


# --------------------------------------------------------------------------
# KZ emission


def rational_reconstruct(samples: list, max_degree: int = 12):
    """Exact P/Q through the (t, value) samples, verified on the unused samples.

    Tries total degrees in increasing order; returns a RationalFunction or None.
    """
    from .exact_arith import Poly

    for tot in range(0, max_degree + 1):
        for dq in range(0, tot + 1):
            dp = tot - dq
            nunk = dp + 1 + dq  # Q monic of degree dq
            if nunk + 1 > len(samples):
                continue
            fit, check = samples[:nunk], samples[nunk:]
            rows, rhs = [], []
            for t, y in fit:
                row = [t ** i for i in range(dp + 1)] + [-y * t ** j for j in range(dq)]
                rows.append(row)
                rhs.append(y * t ** dq)
            sol = solve_linear(rows, rhs)
            if sol is None:
                continue
            P = Poly(tuple(sol[: dp + 1]))
            Q = Poly(tuple(sol[dp + 1:]) + (Fraction(1),))
            if any(Q(t) == 0 for t, _ in samples):
                continue
            if all(P(t) / Q(t) == y for t, y in check):
                return RationalFunction(P, Q)
    return None


def _pole_order(f: RationalFunction, a) -> int:
    from .exact_arith import order_at

    if f.num.degree < 0 or not any(f.num.c):
        return 0
    return max(0, -order_at(f, a))


def _connection_values(base: MarkedConfig, gl_rank: int, charge: int, depth: int, orientation: int,
                       check: bool) -> tuple:
    """(block space, {p: value matrix of Gamma_p}) at a base configuration."""
    N = base.N
    groups = [{1: 1, 2: 2}] if N == 2 else [{p: 1} for p in range(1, N + 1)]
    mats: dict = {}
    space = None
    for jets in groups:
        bb = BlockBundle(base, gl_rank, charge, depth, jets, orientation, check=check)
        if space is None:
            space = bb.space
        for p in jets:
            mats[p] = _mat_component(bb.connection(p), 0)
    return space, mats


def kz_emit(points, gl_rank: int = 1, charge: int = 0, depth: int = -4, orientation: int = 1,
            moving: int | None = None, samples: int = 8, seed: int = 0) -> dict:
    """First-order system d_p Psi = -M_p Psi on block coordinates.

    M_p is the value of Gamma_p at the given points.  For the pole diagnostics
    one point (`moving`, default the last) is made a variable t; the entries of
    M_p are reconstructed exactly as rational functions of t and their poles at
    t = z_p are required to be simple.
    """
    base = MarkedConfig.of(points).base() if not isinstance(points, MarkedConfig) else points.base()
    N = base.N
    space, mats = _connection_values(base, gl_rank, charge, depth, orientation, True)
    out: dict = {"dimension": space.dimension, "stabilized": space.stabilized, "basis": [m.as_json() for m in space.basis],
                 "systems": []}
    moving = N if moving is None else moving
    rng = random.Random(seed)
    sampled: dict = {}
    if N >= 2:
        ts: list = []
        zr = base.point(moving)
        others = [base.point(i) for i in range(1, N + 1) if i != moving]
        while len(ts) < samples:
            t = zr + Fraction(rng.randint(-40, 40), rng.randint(7, 29))
            if t in others or t in ts:
                continue
            ts.append(t)
        for t in ts:
            pts = list(base.points)
            pts[moving - 1] = t
            sp, mt = _connection_values(MarkedConfig.of(pts), gl_rank, charge, depth, orientation, False)
            if sp.basis != space.basis:
                continue
            for p in range(1, N + 1):
                sampled.setdefault(p, []).append((t, mt[p]))
    d = space.dimension
    for p in range(1, N + 1):
        entry = {"direction": p, "matrix": mats[p], "poles": []}
        if p in sampled and p != moving:
            data = sampled[p]
            funcs = [[rational_reconstruct([(t, M[i][j]) for t, M in data]) for j in range(d)] for i in range(d)]
            zp = base.point(p)
            simple = all(f is not None and _pole_order(f, zp) <= 1 for row in funcs for f in row)
            residue = []
            for row in funcs:
                rr = []
                for f in row:
                    if f is None:
                        rr.append(None)
                        continue
                    # (z_p - t) f(t) at t = z_p
                    g = f * RationalFunction.linear_power(zp, 1).scale(-1)
                    rr.append(g(zp) if _pole_order(g, zp) == 0 else None)
                residue.append(rr)
            entry["poles"].append({"pair": [p, moving], "simple": simple, "residue_matrix": residue,
                                   "reconstructed": all(f is not None for row in funcs for f in row)})
        if d == 1:
            entry["log_derivative"] = _simplify(-mats[p][0][0])
        out["systems"].append(entry)
    return out
