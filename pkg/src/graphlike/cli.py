"""Command-line entry point: ``graphlike <subcommand> ...``.

Every subcommand checks the invariants of what it computed. On success it
exits 0; otherwise it prints a JSON failure record to stderr and exits 1
(failed check or exhausted budget) or 2 (invalid input).
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import math
import os
import sys
from typing import Any, Dict, List, Optional, Sequence

from . import io as gio
from .converge import certified_resistance, invariance_suite, resistance_sequence
from .core import EdgePoint, MetricGraph
from .decomp import DEFAULT_M, exclude_points
from .electrical import effective_resistance
from .errors import BudgetExhausted, CutNotAchievable, GraphlikeError
from .measure import _first_level, d_ell, d_f, edge_cut_for_delta, hausdorff_estimate
from .sequence import RefinementSequence, point_at
from .spaces import FAMILIES, SpaceSpec, constant, from_spec

FAMILY_PARAMS = {
    "hawaiian": {"first", "ratio", "lengths"},
    "fat_cantor": {"depth"},
    "gasket_edges": {"eps0", "ratio"},
    "dumbbell": set(),
}


class CheckFailed(Exception):
    def __init__(self, message: str, detail: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.detail = detail or {}


class InvalidInput(Exception):
    pass


# -- inputs ------------------------------------------------------------------------


def _parse_params(items: Sequence[str]) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for item in items or ():
        if "=" not in item:
            raise InvalidInput(f"parameter {item!r} is not key=value")
        k, v = item.split("=", 1)
        try:
            out[k] = json.loads(v)
        except ValueError:
            out[k] = v
    return out


def load_space(token: str, params: Dict[str, Any]) -> RefinementSequence:
    """A fixture family name, a spec document or a graph document."""
    if token in FAMILIES and token != "custom":
        unknown = set(params) - FAMILY_PARAMS[token]
        if unknown:
            raise InvalidInput(f"unknown parameters for {token}: {sorted(unknown)}")
        return from_spec(SpaceSpec(token, params))
    if not os.path.exists(token):
        raise InvalidInput(f"{token!r} is neither a known family nor a file")
    with open(token) as fh:
        doc = gio.load_document(fh.read())
    if isinstance(doc, MetricGraph):
        if params:
            raise InvalidInput("parameters do not apply to a graph document")
        return constant(doc)
    return load_space(doc.family, {**doc.params, **params})


def _positive(name: str, x: float) -> float:
    if not (x > 0 and math.isfinite(x)):
        raise InvalidInput(f"{name} must be a positive number, got {x}")
    return x


def _level(seq: RefinementSequence, n: Optional[int], points=(), n_max: int = 40) -> int:
    if n is None:
        return _first_level(seq, points, n_max) if points else 0
    if n < 0:
        raise InvalidInput("level must be >= 0")
    return n


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(doc: Any) -> str:
    return json.dumps(doc, indent=2, default=_jsonable) + "\n"


def _jsonable(x: Any) -> Any:
    if isinstance(x, EdgePoint):
        return {"edge": x.edge, "fraction": x.fraction}
    if hasattr(x, "id"):
        return gio.encode_id(x.id)
    raise TypeError(f"cannot serialize {x!r}")


def _csv(header: Sequence[str], rows: List[Sequence[Any]], summary: Optional[Dict[str, Any]] = None) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if x is None else (repr(x) if isinstance(x, float) else x) for x in r])
    if summary is not None:
        buf.write("# summary " + json.dumps(summary, default=_jsonable) + "\n")
    return buf.getvalue()


# -- subcommands -----------------------------------------------------------------------


def cmd_gen(args) -> None:
    seq = load_space(args.space, _parse_params(args.param))
    g = seq.refine(_level(seq, args.n))
    _emit(args, gio.dumps_graph(g))


def cmd_resist(args) -> None:
    seq = load_space(args.space, _parse_params(args.param))
    p, q = gio.parse_point(args.p), gio.parse_point(args.q)
    if args.certify is not None:
        eps = _positive("--certify", args.certify)
        try:
            cv = certified_resistance(seq, p, q, eps, n_max=args.n_max, M=args.M)
        except BudgetExhausted as exc:
            best = exc.best
            raise CheckFailed(str(exc), {"best": None if best is None else _cv_doc(best)})
        _emit(args, _json(_cv_doc(cv)))
        return
    n = _level(seq, args.n, (p, q), args.n_max)
    r = effective_resistance(seq.refine(n), point_at(seq, p, n), point_at(seq, q, n))
    _emit(args, f"{r!r}\n")


def _cv_doc(cv) -> Dict[str, Any]:
    return {"estimate": cv.estimate, "halfwidth": cv.halfwidth, "lower": cv.lower, "upper": cv.upper,
            "n_certified": cv.n_certified, **cv.detail}


def _geometric(rank: int, member: int) -> float:
    return 2.0**-rank


def cmd_measure(args) -> None:
    seq = load_space(args.space, _parse_params(args.param))
    if args.gap < 0:
        raise InvalidInput("--gap must be >= 0")
    try:
        est = hausdorff_estimate(seq, args.gap, n_max=args.n_max)
    except BudgetExhausted as exc:
        raise CheckFailed(str(exc))
    pair = None
    if args.pair:
        pair = tuple(gio.parse_point(t) for t in args.pair)
    ells: Dict[int, float] = {}
    fs: Dict[int, float] = {}
    f_err = None
    if pair is not None:
        dl = d_ell(seq, *pair, est.n)
        ells = dict(zip(dl.levels, dl.values))
        if not dl.is_monotone():
            raise CheckFailed("d_ell increased along the sequence", {"values": list(dl.values)})

        def tail(N: int) -> float:
            return 2.0 ** -len(seq.declared_members(N))

        df = d_f(seq, _geometric, *pair, est.n, tail=tail)
        fs = dict(zip(df.levels, df.values))
        f_err = df.error
    rows = []
    for n in range(est.n + 1):
        h = None
        if est.delta is not None:
            try:
                h = edge_cut_for_delta(seq, n, est.delta).value
            except CutNotAchievable:
                h = None
        length = seq.total_length(n)
        rows.append((n, est.delta, length, h, length + seq.tail(n), ells.get(n), fs.get(n)))
    summary = {"lower": est.lower, "upper": est.upper, "gap": est.gap, "n": est.n, "delta": est.delta,
               "h_g_delta": est.h_g_delta, "cut_size": est.cut_size, "d_f_error": f_err}
    _emit(args, _csv(("n", "delta", "length", "h_g_delta", "upper", "d_ell", "d_f"), rows, summary))
    if est.gap > args.gap:
        raise CheckFailed("measure bracket wider than requested", summary)


def cmd_decomp(args) -> None:
    seq = load_space(args.space, _parse_params(args.param))
    eps = _positive("--eps", args.eps)
    _positive("--M", args.M)
    n = _level(seq, args.n)
    forbidden = [point_at(seq, gio.parse_point(t), n) for t in args.exclude or ()]
    dec = exclude_points((seq, n), eps, forbidden, args.M, strict=False)
    doc = gio.decomposition_to_doc(dec)
    doc["level"] = n
    _emit(args, _json(doc))
    if doc["violations"]:
        raise CheckFailed("decomposition invariants failed", {"violations": doc["violations"]})
    if not dec.total_delta < eps:
        raise CheckFailed("total discrepancy not below eps", {"sum_delta": dec.total_delta, "eps": eps})


def cmd_converge(args) -> None:
    seq = load_space(args.space, _parse_params(args.param))
    eps = _positive("--eps", args.eps)
    p, q = gio.parse_point(args.p), gio.parse_point(args.q)
    if args.extra < 0:
        raise InvalidInput("--extra must be >= 0")
    try:
        cv = certified_resistance(seq, p, q, eps, n_max=args.n_max, M=args.M)
    except BudgetExhausted as exc:
        raise CheckFailed(str(exc))
    n0 = cv.n_certified
    rows = resistance_sequence(seq, p, q, range(n0, n0 + args.extra + 1))
    vals = [r for _, r in rows]
    spread = max(vals) - min(vals)
    summary = {**_cv_doc(cv), "max_gap": spread}
    _emit(args, _csv(("n", "R"), rows, summary))
    if not spread < eps:
        raise CheckFailed("resistances after n_certified differ by eps or more", summary)


def cmd_invariance(args) -> None:
    seq = load_space(args.space, _parse_params(args.param))
    if args.trials < 1:
        raise InvalidInput("--trials must be >= 1")
    p, q = gio.parse_point(args.p), gio.parse_point(args.q)
    n = _level(seq, args.n, (p, q))
    g = seq.refine(n)
    pn, qn = point_at(seq, p, n), point_at(seq, q, n)
    if isinstance(pn, EdgePoint) or isinstance(qn, EdgePoint):
        from .core import with_points

        g, (a, b) = with_points(g, [pn, qn])
    else:
        a, b = pn.id, qn.id
    rep = invariance_suite(g, a, b, args.trials, seed=args.seed)
    doc = {"level": n, "baseline": rep.baseline, "trials": rep.trials, "max_deviation": rep.max_deviation,
           "max_relative": rep.max_relative, "rel_tol": args.rel_tol, "passed": rep.passed(args.rel_tol)}
    _emit(args, _json(doc))
    if not doc["passed"]:
        raise CheckFailed("resistance moved under subdivision", doc)


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="graphlike", description="Metric graph approximations of graph-like spaces.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, *, level=True):
        p.add_argument("space", help="family name (%s) or a JSON graph/spec file" % ", ".join(sorted(FAMILY_PARAMS)))
        p.add_argument("-P", "--param", action="append", default=[], metavar="KEY=VALUE", help="family parameter")
        p.add_argument("-o", "--output", help="write here instead of stdout")
        if level:
            p.add_argument("-n", type=int, default=None, help="level of the sequence")

    p = sub.add_parser("gen", help="write G_n as a graph document")
    common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("resist", help="effective resistance at a level, or certified in the limit")
    common(p)
    p.add_argument("p")
    p.add_argument("q")
    p.add_argument("--certify", type=float, metavar="EPS")
    p.add_argument("--M", type=float, default=DEFAULT_M)
    p.add_argument("--n-max", type=int, default=40)
    p.set_defaults(func=cmd_resist)

    p = sub.add_parser("measure", help="CSV of length bounds, cut functional and metrics per level")
    common(p, level=False)
    p.add_argument("--gap", type=float, default=1e-3)
    p.add_argument("--pair", nargs=2, metavar=("P", "Q"), help="also report d_ell and d_f between these points")
    p.add_argument("--n-max", type=int, default=40)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("decomp", help="pseudo-edge decomposition document")
    common(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--M", type=float, default=DEFAULT_M)
    p.add_argument("--exclude", nargs="*", metavar="POINT", help="points no pseudo-edge may touch")
    p.set_defaults(func=cmd_decomp)

    p = sub.add_parser("converge", help="CSV of R_n after the certified level plus a summary line")
    common(p, level=False)
    p.add_argument("p")
    p.add_argument("q")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--extra", type=int, default=10, help="levels reported after n_certified")
    p.add_argument("--M", type=float, default=DEFAULT_M)
    p.add_argument("--n-max", type=int, default=40)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("invariance", help="resistance under random subdivision and relabeling")
    common(p)
    p.add_argument("p")
    p.add_argument("q")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rel-tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_invariance)
    return ap


def _fail(command: str, code: int, kind: str, message: str, detail=None) -> int:
    rec = {"ok": False, "command": command, "error": kind, "message": message}
    if detail:
        rec["detail"] = detail
    sys.stderr.write(json.dumps(rec, default=_jsonable) + "\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except CheckFailed as exc:
        return _fail(args.command, 1, "CheckFailed", str(exc), exc.detail)
    except (InvalidInput, ValueError, KeyError) as exc:
        return _fail(args.command, 2, type(exc).__name__, str(exc))
    except GraphlikeError as exc:
        return _fail(args.command, 1, type(exc).__name__, str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
