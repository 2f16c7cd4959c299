"""kncli: command-line front end.

Every subcommand prints one JSON document with sorted keys and rationals as
"p/q" strings.  Exit codes: 0 success, 1 usage error, 2 a property check failed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .exact_arith import JetScalar, RationalFunction, frac_str, parse_frac, scalar_to_json
from .fermion_rep import FermionModule, NotScalar, Truncation, WedgeMonomial
from .kn_forms import MarkedConfig, basis_form, form_orders, kn_pairing

SUBCOMMANDS = ("basis", "pairing", "structure", "cocycle", "check-local", "wedge", "sugawara",
               "check-fundamental", "blocks", "kz", "curvature", "verify-all")

DEFAULTS = {"points": ["0"], "gl_rank": 1, "charge": 0, "depth": -6, "orientation": 1, "seed": 0}


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    def __init__(self, report):
        super().__init__("property check failed")
        self.report = report


# --------------------------------------------------------------------------
# serialization


def to_jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return frac_str(x)
    if isinstance(x, JetScalar):
        return scalar_to_json(x)
    if isinstance(x, WedgeMonomial):
        return x.as_json()
    if isinstance(x, RationalFunction):
        return to_jsonable(rf_json(x))
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, float):
        return x
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True)


def poly_text(coeffs, var: str = "z") -> str:
    terms = []
    for k, c in enumerate(coeffs):
        c = Fraction(c)
        if not c:
            continue
        mag = abs(c)
        if k == 0:
            body = frac_str(mag) if mag.denominator != 1 else str(mag.numerator)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            coef = "" if mag == 1 else (str(mag.numerator) if mag.denominator == 1 else f"({mag})") + "*"
            body = coef + mono
        terms.append((c < 0, body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] else "") + terms[0][1]
    for neg, body in terms[1:]:
        out += (" - " if neg else " + ") + body
    return out


def rf_json(f: RationalFunction) -> dict:
    num = [Fraction(c) for c in f.num.c]
    den = [Fraction(c) for c in f.den.c]
    text = poly_text(num)
    if den != [Fraction(1)]:
        text = f"({text}) / ({poly_text(den)})"
    return {"numerator": num, "denominator": den, "text": text}


# --------------------------------------------------------------------------
# configuration


def parse_points(s) -> list:
    items = s if isinstance(s, list) else str(s).split(",")
    try:
        pts = [parse_frac(str(x)) for x in items if str(x).strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad point list {s!r}: {exc}")
    if not pts:
        raise UsageError("need at least one point")
    if len(set(pts)) != len(pts):
        raise UsageError("points must be distinct")
    return pts


def run_config(args) -> dict:
    """Config file first, then explicit flags on top."""
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}")
        unknown = set(data) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(data)
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    cfg["points"] = parse_points(cfg["points"])
    for key in ("gl_rank", "charge", "depth", "orientation", "seed"):
        try:
            cfg[key] = int(cfg[key])
        except (TypeError, ValueError):
            raise UsageError(f"{key} must be an integer")
    if cfg["gl_rank"] < 1:
        raise UsageError("gl-rank must be >= 1")
    if cfg["depth"] > 0:
        raise UsageError("depth must be <= 0")
    if cfg["orientation"] not in (1, -1):
        raise UsageError("orientation must be 1 or -1")
    return cfg


def _window(s: str) -> tuple:
    try:
        lo, hi = (int(x) for x in s.split(","))
    except ValueError:
        raise UsageError(f"window must be 'lo,hi', got {s!r}")
    if lo > hi:
        raise UsageError("window needs lo <= hi")
    return lo, hi


def _point_index(cfg: MarkedConfig, p: int) -> int:
    if not 1 <= p <= cfg.N:
        raise UsageError(f"point index {p} out of range 1..{cfg.N}")
    return p


# --------------------------------------------------------------------------
# subcommands


def cmd_basis(args, rc):
    cfg = MarkedConfig.of(rc["points"])
    f = basis_form(cfg, args.lam, args.n, _point_index(cfg, args.p))
    orders = form_orders(f, cfg)
    return {"lambda": args.lam, "n": args.n, "p": args.p, "points": rc["points"], "coefficient": f.rf(),
            "orders": {str(k): v for k, v in orders.items()}}


def cmd_pairing(args, rc):
    cfg = MarkedConfig.of(rc["points"])
    f = basis_form(cfg, args.lam, args.n, _point_index(cfg, args.p))
    g = basis_form(cfg, 1 - args.lam, args.m, _point_index(cfg, args.r))
    return {"lambda": args.lam, "left": [args.n, args.p], "right": [args.m, args.r], "value": kn_pairing(f, g, cfg)}


def cmd_structure(args, rc):
    from .kn_algebras import action_expansion, bracket_expansion, product_expansion

    cfg = MarkedConfig.of(rc["points"])
    lo, hi = _window(args.window)
    fn = {"function": product_expansion, "vector": bracket_expansion, "action": action_expansion}.get(args.type)
    if fn is None:
        raise UsageError("structure --type must be function, vector or action")
    rows = []
    for n in range(lo, hi + 1):
        for p in range(1, cfg.N + 1):
            for m in range(lo, hi + 1):
                for s in range(1, cfg.N + 1):
                    out = fn(cfg, (n, p), (m, s))
                    if out:
                        rows.append({"left": [n, p], "right": [m, s],
                                     "terms": [[k, t, c] for (k, t), c in sorted(out.items())]})
    return {"type": args.type, "window": [lo, hi], "entries": rows}


def cmd_cocycle(args, rc):
    from .cocycles_central import basis_evaluator

    cfg = MarkedConfig.of(rc["points"])
    if args.type not in ("function", "vector", "mixing", "current"):
        raise UsageError("cocycle --type must be function, vector, mixing or current")
    ev = basis_evaluator(args.type, cfg, rc["orientation"], gl_rank=rc["gl_rank"])
    a, b = (args.n, _point_index(cfg, args.p)), (args.m, _point_index(cfg, args.r))
    return {"type": args.type, "left": list(a), "right": list(b), "orientation": rc["orientation"], "value": ev(a, b)}


def cmd_check_local(args, rc):
    from .cocycles_central import basis_evaluator, check_local

    cfg = MarkedConfig.of(rc["points"])
    if args.type not in ("function", "vector", "mixing", "current"):
        raise UsageError("check-local --type must be function, vector, mixing or current")
    rep = check_local(basis_evaluator(args.type, cfg, rc["orientation"], gl_rank=rc["gl_rank"]), cfg,
                      _window(args.window))
    out = dict(rep.as_dict(), type=args.type, window=list(_window(args.window)))
    if not rep.is_local:
        raise CheckFailed(out)
    return out


def cmd_wedge(args, rc):
    fm = FermionModule(MarkedConfig.of(rc["points"]), rc["gl_rank"])
    slices = [{"degree": d, "dimension": len(fm.monomials_of_degree(rc["charge"], d))}
              for d in range(0, rc["depth"] - 1, -1)]
    basis = fm.window_basis(rc["charge"], Truncation(rc["depth"]))
    return {"charge": rc["charge"], "depth": rc["depth"], "slices": slices, "basis": basis}


def cmd_sugawara(args, rc):
    from .sugawara import ReductiveSplit, SugawaraOperator, detect_level, window_bound

    cfg = MarkedConfig.of(rc["points"])
    fm = FermionModule(cfg, rc["gl_rank"])
    split = ReductiveSplit(rc["gl_rank"])
    detect_level(fm, split, rc["charge"], Truncation(-3), rc["orientation"], rc["seed"])
    sug = SugawaraOperator(fm, split, rc["orientation"])
    out = {"levels": split.levels(), "kappas": split.kappas(),
           "prefactors": {s.name: sug.prefactor(s) for s in split.summands},
           "window_bound": list(window_bound(cfg))}
    if args.k is not None:
        r = _point_index(cfg, args.p)
        out["mode"] = {"k": args.k, "p": r,
                       "window": sug.mode_window(args.k, r, rc["charge"], Truncation(rc["depth"])).as_json()}
    return out


def cmd_check_fundamental(args, rc):
    from .acceptance import fundamental_relation

    res = fundamental_relation(points=tuple(rc["points"]), gl_rank=rc["gl_rank"], bound=args.bound,
                               depth=rc["depth"])
    out = res.as_json()
    if not res.passed:
        raise CheckFailed(out)
    return out


def cmd_blocks(args, rc):
    from .blocks_kz import conformal_blocks

    fm = FermionModule(MarkedConfig.of(rc["points"]), rc["gl_rank"])
    return conformal_blocks(fm, rc["charge"], rc["depth"]).as_json()


def cmd_kz(args, rc):
    from .blocks_kz import kz_emit

    cfg = MarkedConfig.of(rc["points"])
    moving = _point_index(cfg, args.moving) if args.moving is not None else None
    return kz_emit(rc["points"], rc["gl_rank"], rc["charge"], rc["depth"], rc["orientation"], moving,
                   args.samples, rc["seed"])


def cmd_curvature(args, rc):
    from .blocks_kz import BlockBundle

    pts = rc["points"]
    N = len(pts)
    if N < 2:
        return {"table": [], "note": "one point: no pair of directions"}
    table = []
    failed = False
    for p in range(1, N + 1):
        for q in range(p + 1, N + 1):
            bb = BlockBundle(pts, rc["gl_rank"], rc["charge"], rc["depth"], {p: 1, q: 2}, rc["orientation"],
                             check=False)
            try:
                lpq, lqp = bb.curvature(p, q), bb.curvature(q, p)
                table.append({"pair": [p, q], "lambda": lpq, "lambda_reversed": lqp, "antisymmetric": lpq == -lqp})
                failed = failed or lpq != -lqp
            except NotScalar as exc:
                table.append({"pair": [p, q], "error": str(exc)})
                failed = True
    out = {"table": table}
    if failed:
        raise CheckFailed(out)
    return out


def _run_check(item):
    fn, kwargs = item
    return fn(**kwargs).as_json()


def cmd_verify_all(args, rc):
    from .acceptance import full_suite, quick_suite

    suite = full_suite() if args.full else quick_suite(rc["points"], rc["gl_rank"], rc["depth"], rc["seed"])
    jobs = args.jobs
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_check, suite))
    else:
        results = [_run_check(item) for item in suite]
    for r in results:
        tag = "PASS" if r["passed"] else "FAIL"
        print(f"[{tag}] criterion {r['criterion']:2d} {r['name']}", file=sys.stderr)
    out = {"passed": all(r["passed"] for r in results), "results": results, "mode": "full" if args.full else "quick"}
    if not out["passed"]:
        raise CheckFailed(out)
    return out


COMMANDS = {
    "basis": cmd_basis,
    "pairing": cmd_pairing,
    "structure": cmd_structure,
    "cocycle": cmd_cocycle,
    "check-local": cmd_check_local,
    "wedge": cmd_wedge,
    "sugawara": cmd_sugawara,
    "check-fundamental": cmd_check_fundamental,
    "blocks": cmd_blocks,
    "kz": cmd_kz,
    "curvature": cmd_curvature,
    "verify-all": cmd_verify_all,
}


# --------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("KNCLI_JOBS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with points, gl_rank, charge, depth, orientation, seed")
    common.add_argument("--points", help="comma separated rationals, e.g. 0,1/2,3")
    common.add_argument("--gl-rank", dest="gl_rank", type=int)
    common.add_argument("--charge", type=int)
    common.add_argument("--depth", type=int)
    common.add_argument("--orientation", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--jobs", type=int, default=_default_jobs(), help="worker processes (default $KNCLI_JOBS or 1)")
    common.add_argument("--csv", action="store_true", help="matrices as CSV (kz only)")

    parser = _Parser(prog="kncli", description="Krichever-Novikov algebras, wedge modules and KZ connections")
    sub = parser.add_subparsers(dest="command", metavar="subcommand", parser_class=_Parser)
    sub.required = True

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    p = add("basis", "a KN basis element")
    p.add_argument("--lambda", dest="lam", type=int, default=0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, default=1)

    p = add("pairing", "KN pairing of two basis elements")
    p.add_argument("--lambda", dest="lam", type=int, default=0)
    for name, dflt in (("--n", None), ("--p", 1), ("--m", None), ("--r", 1)):
        p.add_argument(name, type=int, default=dflt, required=dflt is None)

    p = add("structure", "structure constants over a degree window")
    p.add_argument("--type", default="function")
    p.add_argument("--window", default="-2,2")

    p = add("cocycle", "a cocycle on two basis elements")
    p.add_argument("--type", default="function")
    for name, dflt in (("--n", None), ("--p", 1), ("--m", None), ("--r", 1)):
        p.add_argument(name, type=int, default=dflt, required=dflt is None)

    p = add("check-local", "locality scan of a cocycle")
    p.add_argument("--type", default="function")
    p.add_argument("--window", default="-6,6")

    add("wedge", "degree slices and window basis of the wedge module")

    p = add("sugawara", "levels, prefactors and optionally one mode on the window")
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=int, default=1)

    p = add("check-fundamental", "[T(e), u(A)] = u(e.A) on all basis triples")
    p.add_argument("--bound", type=int, default=2)

    add("blocks", "conformal blocks on the window")

    p = add("kz", "first-order system on blocks with pole diagnostics")
    p.add_argument("--moving", type=int)
    p.add_argument("--samples", type=int, default=8)

    add("curvature", "curvature scalars for all pairs of points")

    p = add("verify-all", "run the acceptance checks")
    p.add_argument("--full", action="store_true", help="full acceptance parameters instead of the quick suite")
    return parser


def _kz_csv(out: dict) -> str:
    lines = []
    for s in out["systems"]:
        lines.append(f"# direction {s['direction']}")
        for row in s["matrix"]:
            lines.append(",".join(json.dumps(to_jsonable(x)) if isinstance(x, JetScalar) else frac_str(x) for x in row))
    return "\n".join(lines)


_LIST_OPTIONS = ("--points", "--window")


def _glue_lists(argv: list) -> list:
    """'--window -3,3' would read as an option; glue list values to their flag."""
    out: list = []
    it = iter(argv)
    for tok in it:
        if tok in _LIST_OPTIONS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_glue_lists(sys.argv[1:] if argv is None else list(argv)))
    try:
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        rc = run_config(args)
        out = COMMANDS[args.command](args, rc)
    except UsageError as exc:
        print(f"kncli: error: {exc}", file=sys.stderr)
        return 1
    except CheckFailed as exc:
        print(dumps({"ok": False, "report": exc.report}))
        return 2
    if args.csv and args.command == "kz":
        print(_kz_csv(out))
    else:
        print(dumps(out))
    return 0


if __name__ == "__main__":
    sys.exit(main())
