"""The twelve acceptance checks, as plain functions returning CheckResult.

Default arguments are the full acceptance parameters.  `quick_suite` scales
them down to one configuration for the command line.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .blocks_kz import BlockBundle, derivative_identities, regular_basis
from .cocycles_central import (
    BilinearFormGL,
    basis_evaluator,
    check_local,
    cocycle_current,
    cocycle_function,
    cocycle_mixing,
    cocycle_vector,
)
from .exact_arith import RationalFunction, frac_str
from .fermion_rep import FermionModule, NotScalar, Truncation
from .kn_algebras import CurrentElement, Matrix, act_on_current, bracket_currents, bracket_expansion, gl_basis
from .kn_forms import MarkedConfig, basis_form, kn_pairing, lie_derivative
from .sugawara import ReductiveSplit, SugawaraOperator, detect_level

__all__ = ["CheckResult", "random_config", "CRITERIA", "full_suite", "quick_suite"]


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.criterion:2d} {self.name} ({self.seconds:.1f}s)"

    def as_json(self) -> dict:
        return {"criterion": self.criterion, "name": self.name, "passed": self.passed,
                "detail": self.detail, "seconds": round(self.seconds, 3)}


def random_config(rng: random.Random, N: int) -> MarkedConfig:
    pts: set = set()
    while len(pts) < N:
        pts.add(Fraction(rng.randint(-9, 9), rng.randint(1, 5)))
    return MarkedConfig.of(sorted(pts))


def _timed(criterion: int, name: str):
    def wrap(fn):
        def run(*args, **kwargs) -> CheckResult:
            t0 = time.perf_counter()
            passed, detail = fn(*args, **kwargs)
            return CheckResult(criterion, name, bool(passed), detail, time.perf_counter() - t0)

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return wrap


def _rand_index(rng, lo, hi, N):
    return rng.randint(lo, hi), rng.randint(1, N)


# --------------------------------------------------------------------------
# 1-4: forms, algebras, cocycles


@_timed(1, "duality")
def duality(Ns=(1, 2, 3), weights=(-1, 0, 1, 2), degrees=(-5, 5), configs=5, seed=0):
    """<f^lam_{n,p}, f^{1-lam}_{m,r}> = delta on random rational configurations."""
    rng = random.Random(seed)
    lo, hi = degrees
    checked = 0
    for N in Ns:
        for _ in range(configs):
            cfg = random_config(rng, N)
            for lam in weights:
                for n in range(lo, hi + 1):
                    for p in range(1, N + 1):
                        f = basis_form(cfg, lam, n, p)
                        for m in range(lo, hi + 1):
                            for r in range(1, N + 1):
                                v = kn_pairing(f, basis_form(cfg, 1 - lam, m, r), cfg)
                                checked += 1
                                if v != (1 if (m == -n and p == r) else 0):
                                    return False, {"points": [frac_str(z) for z in cfg.points],
                                                   "lambda": lam, "left": [n, p], "right": [m, r],
                                                   "value": frac_str(v)}
    return True, {"pairings": checked}


@_timed(2, "classical reduction")
def classical_reduction(bound=8, orientation=1):
    """N = 1 at z = 0: monomial bases, Witt brackets, Virasoro and function cocycles."""
    cfg = MarkedConfig.of([0])
    for n in range(-bound, bound + 1):
        want = RationalFunction.linear_power(0, n)
        if basis_form(cfg, 0, n, 1).rf() != want:
            return False, {"basis": n}
    for n in range(-bound, bound + 1):
        for m in range(-bound, bound + 1):
            br = bracket_expansion(cfg, (n, 1), (m, 1))
            want = {(n + m, 1): Fraction(m - n)} if m != n else {}
            if br != want:
                return False, {"bracket": [n, m]}
            ev, fv = basis_form(cfg, -1, n, 1), basis_form(cfg, -1, m, 1)
            if cocycle_vector(ev, fv, cfg, orientation=orientation) != orientation * (
                    Fraction(n ** 3 - n, 12) if n + m == 0 else 0):
                return False, {"vector cocycle": [n, m]}
            a, b = basis_form(cfg, 0, n, 1), basis_form(cfg, 0, m, 1)
            if cocycle_function(a, b, cfg, orientation) != orientation * (m if n + m == 0 else 0):
                return False, {"function cocycle": [n, m]}
    return True, {"range": bound, "orientation": orientation}


@_timed(3, "locality")
def locality(configs=((0,), (0, 1), (0, 1, 3)), window=(-6, 6)):
    """All four cocycles vanish above degree sum 0 and reach it."""
    out = {}
    ok = True
    for pts in configs:
        cfg = MarkedConfig.of(pts)
        for kind in ("function", "vector", "mixing", "current"):
            rep = check_local(basis_evaluator(kind, cfg), cfg, window)
            out[f"N={cfg.N} {kind}"] = rep.as_dict()
            ok = ok and rep.is_local and rep.upper == 0
    return ok, out


def _f(cfg, a):
    return basis_form(cfg, 0, *a)


def _v(cfg, a):
    return basis_form(cfg, -1, *a)


@_timed(4, "cocycle identity and L-invariance")
def cocycle_identities(configs=((0,), (0, 1)), triples=100, degrees=(-4, 4), seed=0):
    """Cocycle condition for vector, mixing and current cocycles; L-invariance for functions and currents."""
    rng = random.Random(seed)
    lo, hi = degrees
    alpha = BilinearFormGL()
    counts: dict = {}
    for pts in configs:
        cfg = MarkedConfig.of(pts)
        N = cfg.N
        for _ in range(triples):
            a, b, c = (_rand_index(rng, lo, hi, N) for _ in range(3))
            e, f, g = _v(cfg, a), _v(cfg, b), _v(cfg, c)
            s = (cocycle_vector(lie_derivative(e, f), g, cfg) + cocycle_vector(lie_derivative(f, g), e, cfg)
                 + cocycle_vector(lie_derivative(g, e), f, cfg))
            if s:
                return False, {"vector": [a, b, c], "points": list(map(frac_str, cfg.points))}
            A = _f(cfg, c)
            s = (cocycle_mixing(lie_derivative(e, f), A, cfg) - cocycle_mixing(e, lie_derivative(f, A), cfg)
                 + cocycle_mixing(f, lie_derivative(e, A), cfg))
            if s:
                return False, {"mixing": [a, b, c]}
            B = _f(cfg, b)
            if cocycle_function(lie_derivative(e, A), B, cfg) + cocycle_function(A, lie_derivative(e, B), cfg):
                return False, {"function L-invariance": [a, b, c]}
            if cocycle_function(A, B, cfg) + cocycle_function(B, A, cfg):
                return False, {"function antisymmetry": [b, c]}
            x, y, z = (rng.choice(gl_basis(2)) for _ in range(3))
            X, Y, Z = (CurrentElement.basis(cfg, m, *i) for m, i in ((x, a), (y, b), (z, c)))
            s = (cocycle_current(bracket_currents(X, Y), Z, alpha) + cocycle_current(bracket_currents(Y, Z), X, alpha)
                 + cocycle_current(bracket_currents(Z, X), Y, alpha))
            if s:
                return False, {"current": [a, b, c]}
            if cocycle_current(act_on_current(e, Y), Z, alpha) + cocycle_current(Y, act_on_current(e, Z), alpha):
                return False, {"current L-invariance": [a, b, c]}
            counts[cfg.N] = counts.get(cfg.N, 0) + 1
    return True, {"triples per configuration": counts}


# --------------------------------------------------------------------------
# 5-8: wedge module and Sugawara


def partition_count(n: int) -> int:
    """p(n) by Euler's pentagonal recurrence."""
    p = [1] + [0] * n
    for m in range(1, n + 1):
        k, s = 1, 0
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > m:
                break
            sign = 1 if k % 2 else -1
            s += sign * p[m - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= m:
                s += sign * p[m - g2]
            k += 1
        p[m] = s
    return p[n]


def _random_operator(rng, cfg, gl_rank, lo=-3, hi=3):
    idx = _rand_index(rng, lo, hi, cfg.N)
    if rng.random() < 0.5:
        return CurrentElement.basis(cfg, rng.choice(gl_basis(gl_rank)), *idx)
    return _v(cfg, idx)


@_timed(5, "fermion module")
def fermion_module(slices=10, applications=200, points=(0, 1), gl_rank=2, depth=-4, seed=0):
    """Degrees <= 0, gl(1) N = 1 slice counts, charge conservation."""
    fm1 = FermionModule(MarkedConfig.of([0]), 1)
    for d in range(0, -slices - 1, -1):
        mons = fm1.monomials_of_degree(0, d)
        if len(mons) != partition_count(-d) or len(set(mons)) != len(mons):
            return False, {"slice": d, "count": len(mons)}
    rng = random.Random(seed)
    cfg = MarkedConfig.of(points)
    fm = FermionModule(cfg, gl_rank)
    for _ in range(applications):
        charge = rng.randint(-2, 2)
        window = fm.window_basis(charge, Truncation(depth))
        mono = rng.choice(window)
        X = _random_operator(rng, cfg, gl_rank)
        out = fm.apply(X, {mono: Fraction(1)})
        if any(m.degree > 0 for m in out) or any(m.degree > 0 for m in window):
            return False, {"positive degree": mono.as_json()}
        if out.charges() - {charge}:
            return False, {"charge": mono.as_json()}
    return True, {"slices": slices, "applications": applications}


@_timed(6, "projective closure")
def projective_closure(ranks=(1, 2), configs=((0,), (0, 1)), depth=-6, pairs=50, fit_checks=30, seed=0):
    """Scalar defects on random pairs; current defect = r1 tr(xy) gamma + r2 tr x tr y gamma."""
    rng = random.Random(seed)
    fits = {}
    for g in ranks:
        for pts in configs:
            cfg = MarkedConfig.of(pts)
            fm = FermionModule(cfg, g)
            trunc = Truncation(depth)
            for _ in range(pairs):
                X, Y = _random_operator(rng, cfg, g, -2, 2), _random_operator(rng, cfg, g, -2, 2)
                try:
                    fm.projective_defect(X, Y, 0, trunc)
                except NotScalar as exc:
                    return False, {"gl": g, "N": cfg.N, "error": str(exc)}
            ok, fit = _fit_current_defect(fm, rng, fit_checks, Truncation(-3))
            fits[f"gl({g}) N={cfg.N}"] = fit
            if not ok:
                return False, fits
    return True, fits


def _fit_current_defect(fm: FermionModule, rng, checks: int, trunc: Truncation):
    cfg, g = fm.cfg, fm.g

    def defect(x, a, y, b):
        X, Y = CurrentElement.basis(cfg, x, *a), CurrentElement.basis(cfg, y, *b)
        return fm.projective_defect(X, Y, 0, trunc)

    one, minus = (1, 1), (-1, 1)
    gam = cocycle_function(_f(cfg, one), _f(cfg, minus), cfg)
    if g == 1:
        e = Matrix.identity(1)
        r = defect(e, one, e, minus) / gam
        r1, r2 = r, Fraction(0)  # only r1 + r2 is visible for gl(1)
    else:
        r1 = defect(Matrix.unit(g, 1, 2), one, Matrix.unit(g, 2, 1), minus) / gam
        r2 = defect(Matrix.unit(g, 1, 1), one, Matrix.unit(g, 2, 2), minus) / gam
    for _ in range(checks):
        x, y = rng.choice(gl_basis(g)), rng.choice(gl_basis(g))
        a, b = _rand_index(rng, -2, 2, cfg.N), _rand_index(rng, -2, 2, cfg.N)
        pred = (r1 * (x @ y).trace() + r2 * x.trace() * y.trace()) * cocycle_function(_f(cfg, a), _f(cfg, b), cfg)
        if defect(x, a, y, b) != pred:
            return False, {"r1": frac_str(r1), "r2": frac_str(r2), "failed": [a, b]}
    return True, {"r1": frac_str(r1), "r2": frac_str(r2), "checked": checks}


def _sugawara(cfg: MarkedConfig, g: int, orientation: int = 1):
    fm = FermionModule(cfg, g)
    split = ReductiveSplit(g)
    detect_level(fm, split, 0, Truncation(-3), orientation)
    return fm, split, SugawaraOperator(fm, split, orientation)


@_timed(7, "fundamental relation")
def fundamental_relation(points=(0, 1), gl_rank=2, bound=3, depth=-6, jobs=1):
    """[T(e), u(x A)] = u(x e.A) on the window for every basis triple."""
    cfg = MarkedConfig.of(points)
    fm, split, sug = _sugawara(cfg, gl_rank)
    trunc = Truncation(depth)
    N = cfg.N
    count = 0
    for k in range(-bound, bound + 1):
        for r in range(1, N + 1):
            e = _v(cfg, (k, r))
            for x in gl_basis(gl_rank):
                for n in range(-bound, bound + 1):
                    for p in range(1, N + 1):
                        d = sug.fundamental_defect(e, x, (n, p), 0, trunc)
                        count += 1
                        if d:
                            return False, {"e": [k, r], "A": [n, p], "monomial": d["monomial"].as_json()}
    return True, {"triples": count, "levels": {k: frac_str(v) for k, v in split.levels().items()}}


@_timed(8, "Sugawara projective representation")
def sugawara_projective(points=(0, 1), gl_rank=1, depth=-4, pairs=20, window=(-2, 2), seed=0):
    """[T(e), T(f)] - T([e, f]) is scalar; its cocycle is local with upper bound 0."""
    cfg = MarkedConfig.of(points)
    fm, split, sug = _sugawara(cfg, gl_rank)
    trunc = Truncation(depth)
    rng = random.Random(seed)
    for _ in range(pairs):
        a, b = _rand_index(rng, -2, 2, cfg.N), _rand_index(rng, -2, 2, cfg.N)
        try:
            sug.projective_defect(_v(cfg, a), _v(cfg, b), 0, trunc)
        except NotScalar as exc:
            return False, {"pair": [a, b], "error": str(exc)}
    cache: dict = {}

    def ev(a, b):
        if (a, b) not in cache:
            cache[(a, b)] = sug.projective_defect(_v(cfg, a), _v(cfg, b), 0, trunc)
        return cache[(a, b)]

    rep = check_local(ev, cfg, window)
    return rep.is_local and rep.upper == 0, {"locality": rep.as_dict(), "pairs": pairs}


# --------------------------------------------------------------------------
# 9-12: connection and blocks


@_timed(9, "connection well-definedness")
def connection_well_defined(points=(0, 1), ranks=(1, 2), depth=-6, corrections=5, seed=0):
    """[nabla_X, u(A)] = u(A^X) with A^X regular; block operator ignores regular corrections."""
    rng = random.Random(seed)
    base = MarkedConfig.of(points)
    detail = {}
    for g in ranks:
        bb = BlockBundle(base, g, 0, depth, {1: 1}, check=False)
        reg = regular_basis(base, 0, -4, -1, 1)
        for A in reg:
            for x in gl_basis(g):
                rep = bb.correspondence_defect(1, A, x)
                if not rep["ok"] or rep["scalar"] != 0:
                    return False, {"gl": g, "A": [[n, p, frac_str(c)] for (n, p), c in sorted(A.items())],
                                   "report": {k: str(v) for k, v in rep.items()}}
        ref = bb.connection(1)
        reg_v = regular_basis(base, -1, -3, -1, 2)
        for _ in range(corrections):
            corr: dict = {}
            for b in reg_v:
                c = Fraction(rng.randint(-3, 3))
                for k, a in b.items():
                    corr[k] = corr.get(k, 0) + c * a
            corr = {k: v for k, v in corr.items() if v}
            if bb.connection(1, corr) != ref:
                return False, {"gl": g, "correction": [[n, p, frac_str(c)] for (n, p), c in sorted(corr.items())]}
        detail[f"gl({g})"] = {"regular functions": len(reg), "corrections": corrections, "dimension": bb.dimension}
    return True, detail


@_timed(10, "flatness")
def flatness(points=(0, 1), ranks=(1, 2), depth=-6):
    """[nabla_p, nabla_q] is a scalar on blocks, antisymmetric in (p, q)."""
    out = {}
    for g in ranks:
        bb = BlockBundle(points, g, 0, depth, {1: 1, 2: 2}, check=False)
        try:
            l12, l21 = bb.curvature(1, 2), bb.curvature(2, 1)
        except NotScalar as exc:
            return False, {"gl": g, "error": str(exc)}
        out[f"gl({g})"] = {"lambda(1,2)": frac_str(l12), "lambda(2,1)": frac_str(l21), "dimension": bb.dimension}
        if l12 != -l21:
            return False, out
    return True, out


@_timed(11, "jet-derivative identities")
def jet_identities(points=(0, 1), gl_rank=1, samples=20, seed=0, depth=-4):
    """Moving-frame derivative identities, each on seeded samples."""
    rep = derivative_identities(points, 1, samples, seed, 2 if len(points) > 1 else None, gl_rank, 0, depth)
    summary = {k: {"checked": v["checked"], "failures": len(v["failures"])} for k, v in rep.items()}
    ok = all(not v["failures"] for v in rep.values())
    return ok, summary


@_timed(12, "truncation stability")
def truncation_stability(points=(0, 1), ranks=(1, 2), depth=-6, step=2):
    """Blocks and connection matrices agree at depth and depth - step.

    `embedded` additionally records whether the shallower basis and matrices
    reappear unchanged inside the deeper ones, which is what survives when a
    new charge sector enters the window.
    """
    out = {}
    N = len(points)
    jets = {1: 1, 2: 2} if N >= 2 else {1: 1}
    ok = True
    for g in ranks:
        res = []
        for d in (depth, depth - step):
            bb = BlockBundle(points, g, 0, d, jets, check=True)
            mats = [bb.connection(p) for p in jets]
            res.append((bb.space.basis, mats, bb.space.stabilized))
        (b1, m1, s1), (b2, m2, s2) = res
        same = b1 == b2 and m1 == m2
        pos = [b2.index(m) if m in b2 else None for m in b1]
        embedded = None not in pos and all(
            M1[i][j] == M2[pos[i]][pos[j]] for M1, M2 in zip(m1, m2) for i in range(len(b1)) for j in range(len(b1)))
        out[f"gl({g})"] = {"dimension": len(b1), "deeper dimension": len(b2), "stabilized": bool(s1),
                           "unchanged": same, "embedded": embedded}
        ok = ok and same and bool(s1)
    return ok, out


CRITERIA = [duality, classical_reduction, locality, cocycle_identities, fermion_module, projective_closure,
            fundamental_relation, sugawara_projective, connection_well_defined, flatness, jet_identities,
            truncation_stability]


def full_suite() -> list:
    return [(fn, {}) for fn in CRITERIA]


def quick_suite(points, gl_rank: int = 1, depth: int = -6, seed: int = 0) -> list:
    """The same checks at reduced size on one configuration."""
    pts = tuple(points)
    N = len(pts)
    d4 = max(depth, -4)
    two = pts if N >= 2 else (pts[0], pts[0] + 1)
    return [
        (duality, dict(Ns=(N,), configs=2, degrees=(-3, 3), seed=seed)),
        (classical_reduction, {}),
        (locality, dict(configs=(pts,), window=(-4, 4))),
        (cocycle_identities, dict(configs=(pts,), triples=20, seed=seed)),
        (fermion_module, dict(applications=50, points=pts, gl_rank=gl_rank, seed=seed)),
        (projective_closure, dict(ranks=(gl_rank,), configs=(pts,), depth=d4, pairs=10, fit_checks=10, seed=seed)),
        (fundamental_relation, dict(points=pts, gl_rank=gl_rank, bound=1, depth=d4)),
        (sugawara_projective, dict(points=pts, gl_rank=gl_rank, depth=-3, pairs=5, window=(-2, 2), seed=seed)),
        (connection_well_defined, dict(points=pts, ranks=(gl_rank,), depth=d4, corrections=2, seed=seed)),
        (flatness, dict(points=two, ranks=(gl_rank,), depth=-4)),
        (jet_identities, dict(points=pts, gl_rank=gl_rank, samples=5, seed=seed, depth=-3)),
        (truncation_stability, dict(points=pts, ranks=(gl_rank,), depth=depth)),
    ]
