"""Command-line front end. Run ``amenable <command> --help`` for flags."""

from __future__ import annotations

import argparse
import json
import sys

from . import constructions, foelner, growth, ore, trace
from .artifacts import SCHEMA_VERSION, csv_text, dumps, write_atomic
from .exactlin import CapExceeded, format_rational, parse_rational
from .kernel import AlgebraElement, GroupFamily, ParseError, parse, parse_family, parse_list, serialize, truncation

EXIT_OK, EXIT_USAGE, EXIT_NEGATIVE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: usage error: {message}\n")


def _family(sel):
    try:
        return parse_family(sel)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _gens(fam, text, with_unit=False):
    gens = parse_list(fam, text)
    if not gens:
        raise UsageError("no generators given")
    one = AlgebraElement.scalar(fam, 1)
    if with_unit and one not in gens:
        gens.insert(0, one)
    return gens


def _emit(args, text: str):
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _rational(text):
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad rational {text!r}") from None


def _report_json(rep: foelner.RatioReport, fam):
    return {"schema_version": SCHEMA_VERSION, "kind": "ratio_report", "algebra": fam.selector(),
            "generators": [serialize(g) for g in rep.generators], "degree": rep.degree,
            "subspace_dim": rep.subspace_dim, "image_dim": rep.image_dim, "ratio": format_rational(rep.ratio)}


def cmd_ratio(args):
    fam = _family(args.algebra)
    gens = _gens(fam, args.gens, args.with_unit)
    t = truncation(fam, args.degree)
    V = t.full() if not args.basis else t.span([parse(fam, e) for e in args.basis.split(";") if e.strip()])
    rep = foelner.ratio(gens, V, t)
    _emit(args, dumps(_report_json(rep, fam)))
    return EXIT_OK


def cmd_scan(args):
    fam = _family(args.algebra)
    gens = _gens(fam, args.gens, args.with_unit)
    res = foelner.ball_sequence_scan(gens, args.dmax)
    if args.format == "csv":
        _emit(args, csv_text(("n", "dim", "image_dim", "ratio_num", "ratio_den"), [r.row() for r in res.reports]))
    else:
        _emit(args, dumps({"schema_version": SCHEMA_VERSION, "kind": "ball_scan", "algebra": fam.selector(),
                           "generators": [serialize(g) for g in gens], "truncated": res.truncated,
                           "rows": [list(r.row()) for r in res.reports]}))
    if res.truncated:
        print(f"scan truncated: {res.reason}", file=sys.stderr)
    return EXIT_OK


def cmd_search(args):
    fam = _family(args.algebra)
    gens = _gens(fam, args.gens, args.with_unit)
    eps = _rational(args.epsilon)
    if eps <= 0:
        raise UsageError("epsilon must be positive")
    res = foelner.witness_search(gens, eps, budget=args.budget, seed=args.seed, strategy=args.strategy,
                                 degree=args.degree)
    if isinstance(res, foelner.FoelnerCertificate):
        _emit(args, dumps(res.to_json()))
        return EXIT_OK
    _emit(args, dumps(res.to_json(gens, eps, args.seed, args.budget)))
    return EXIT_NEGATIVE


def cmd_bruteforce(args):
    fam = _family(args.algebra)
    gens = _gens(fam, args.gens, args.with_unit)
    r, words = foelner.min_ratio_bruteforce(gens, args.degree)
    _emit(args, dumps({"schema_version": SCHEMA_VERSION, "kind": "bruteforce_minimum", "algebra": fam.selector(),
                       "generators": [serialize(g) for g in gens], "degree": args.degree,
                       "min_ratio": format_rational(r), "words": [fam.format_word(w) for w in words]}))
    return EXIT_OK


def cmd_growth(args):
    fam = _family(args.algebra)
    window = tuple(int(x) for x in args.window.split(",")) if args.window else None
    if args.cayley:
        if args.algebra.strip().lower() != "heis":
            raise UsageError("--cayley is only available for heis")
        points = growth.heisenberg_growth(args.N)
        try:
            slope = growth.fit_slope(points, window)
        except ValueError:
            slope = None
        payload = {"schema_version": SCHEMA_VERSION, "kind": "cayley_growth", "algebra": "heis",
                   "points": [list(p) for p in points], "fitted_slope": None if slope is None else round(slope, 12),
                   "fit_window": list(window or growth.default_window(points))}
        if args.format == "csv":
            _emit(args, csv_text(("n", "dim"), points))
        else:
            _emit(args, dumps(payload))
        return EXIT_OK
    V = _gens(fam, args.V)
    r = parse(fam, args.r)
    prof = growth.profile(V, r, args.N, window)
    if args.format == "csv":
        _emit(args, csv_text(("n", "dim"), prof.points))
    else:
        _emit(args, dumps(prof.to_json()))
    return EXIT_OK


def cmd_ore(args):
    fam = _family(args.algebra)
    a, b = parse(fam, args.a), parse(fam, args.b)
    res = ore.ore_solve(a, b, args.dmax, side=args.side)
    _emit(args, dumps(res.to_json(a, b)))
    return EXIT_OK if isinstance(res, ore.OreSolution) else EXIT_NEGATIVE


def cmd_overlap(args):
    fam = _family(args.algebra)
    a, b = parse(fam, args.a), parse(fam, args.b)
    t = truncation(fam, args.degree)
    W = t.full() if not args.basis else t.span([parse(fam, e) for e in args.basis.split(";") if e.strip()])
    o = ore.overlap(a, b, W, t)
    _emit(args, dumps({"schema_version": SCHEMA_VERSION, "kind": "overlap", "algebra": fam.selector(),
                       "a": serialize(a), "b": serialize(b), "degree": args.degree, "dim_W": o.dim_W,
                       "a_overlap": format_rational(o.a_overlap), "b_overlap": format_rational(o.b_overlap),
                       "dim_aW_cap_bW": o.dim_aW_bW}))
    return EXIT_OK


def cmd_transport(args):
    fam = _family(args.algebra)
    rep = constructions.quotient_transport(_gens(fam, args.xr), parse(fam, args.r), args.dmax)
    _emit(args, dumps(rep.to_json()))
    return EXIT_OK


def cmd_tensor(args):
    fa, fb = _family(args.algebra_a), _family(args.algebra_b)
    ga, gb = _gens(fa, args.gens_a), _gens(fb, args.gens_b)
    ta, tb = truncation(fa, args.degree_a), truncation(fb, args.degree_b)
    rep = constructions.tensor_foelner(ga, ta.full(), ta, gb, tb.full(), tb)
    d = rep.to_json()
    d.update({"algebra_A": fa.selector(), "algebra_B": fb.selector(), "gens_A": [serialize(g) for g in ga],
              "gens_B": [serialize(g) for g in gb], "degree_A": args.degree_a, "degree_B": args.degree_b})
    _emit(args, dumps(d))
    return EXIT_OK


def cmd_dsum(args):
    fam = _family(args.algebra)
    gens = _gens(fam, args.gens, args.with_unit)
    res = constructions.dsum_monomial_min(gens, args.m, args.degree, seed=args.seed, samples=args.samples)
    d = res.to_json(fam)
    d.update({"algebra": fam.selector(), "generators": [serialize(g) for g in gens], "m": args.m,
              "degree": args.degree, "seed": args.seed})
    _emit(args, dumps(d))
    return EXIT_OK


def cmd_trace(args):
    group = _family(args.group)
    if not isinstance(group, GroupFamily):
        raise UsageError("trace needs a group: f2, f:N, z:D or heis")
    A = trace.parse_operator(group, args.op)
    g_el = parse(group, args.g)
    if len(g_el) != 1:
        raise UsageError("--g must be a single group element")
    g = next(iter(g_el.words()))
    rows = trace.trace_rows(group, A, g, args.nmax, args.nmin)
    if args.format == "csv":
        _emit(args, csv_text(trace.TRACE_HEADER, rows))
    else:
        lo, hi = trace.tail_extremes([r[3] for r in rows])
        _emit(args, dumps({"schema_version": SCHEMA_VERSION, "kind": "trace_sequence", "group": group.selector(),
                           "operator": args.op, "g": args.g, "header": list(trace.TRACE_HEADER),
                           "rows": [list(r) for r in rows], "gap_tail_min": lo, "gap_tail_max": hi}))
    return EXIT_OK


def cmd_verify(args):
    try:
        with open(args.certificate, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read certificate: {exc}") from None
    problems = foelner.verify_certificate(data)
    if problems:
        for p in problems:
            print(f"FAIL: {p}", file=sys.stderr)
        return EXIT_NEGATIVE
    print(f"OK: ratio {data['ratio']} < 1 + {data['epsilon']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="amenable", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_, algebra=True):
        sp = sub.add_parser(name, help=help_)
        if algebra:
            sp.add_argument("--algebra", required=True, help="poly:N, free:N, weyl, f2, f:N, z:D, heis, quat")
        sp.add_argument("--out", help="write the artifact here (atomically) instead of stdout")
        sp.set_defaults(fn=fn)
        return sp

    def gens(sp, unit=True):
        sp.add_argument("--gens", required=True, help='comma-separated expressions, e.g. "1,x,y"')
        if unit:
            sp.add_argument("--with-unit", action="store_true", help="prepend 1 to the generators")

    sp = add("ratio", cmd_ratio, "Foelner ratio of a subspace of a truncation")
    gens(sp)
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--basis", help='";"-separated spanning elements (default: the whole truncation)')

    sp = add("scan", cmd_scan, "ratios of the ball sequence")
    gens(sp)
    sp.add_argument("--dmax", type=int, required=True)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = add("search", cmd_search, "search for a Foelner witness")
    gens(sp)
    sp.add_argument("--epsilon", required=True, help="exact rational, e.g. 1/10")
    sp.add_argument("--budget", type=int, default=64, help="maximum number of ratio evaluations")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--strategy", choices=foelner.STRATEGIES, default="ball")
    sp.add_argument("--degree", type=int, help="ambient degree (greedy/random) or maximal ball level")

    sp = add("bruteforce", cmd_bruteforce, "exact minimum over monomial subspaces")
    gens(sp)
    sp.add_argument("--degree", type=int, required=True)

    sp = add("growth", cmd_growth, "dimensions of (k + V r)^n and fitted slope")
    sp.add_argument("--V", default="1", help="comma-separated elements of V")
    sp.add_argument("--r", default="1")
    sp.add_argument("--N", type=int, default=10)
    sp.add_argument("--window", help="n_min,n_max for the slope fit")
    sp.add_argument("--cayley", action="store_true", help="Heisenberg Cayley-ball sizes by BFS")
    sp.add_argument("--format", choices=("csv", "json"), default="json")

    for name, fn, help_ in (("ore", cmd_ore, "common multiples a*u = b*v"),
                            ("overlap", cmd_overlap, "dim(aW ∩ W)/dim W and dim(bW ∩ W)/dim W")):
        sp = add(name, fn, help_)
        sp.add_argument("--a", required=True)
        sp.add_argument("--b", required=True)
        if name == "ore":
            sp.add_argument("--dmax", type=int, required=True)
            sp.add_argument("--side", choices=("right", "left"), default="right",
                            help="right: aA ∩ bA (default); left: Aa ∩ Ab")
        else:
            sp.add_argument("--degree", type=int, required=True)
            sp.add_argument("--basis")

    sp = add("transport", cmd_transport, "quotient transport chain on balls")
    sp.add_argument("--xr", required=True, help="comma-separated products x_i*r")
    sp.add_argument("--r", required=True)
    sp.add_argument("--dmax", type=int, required=True)

    sp = add("tensor", cmd_tensor, "tensor Foelner check on full truncations", algebra=False)
    for side in ("a", "b"):
        sp.add_argument(f"--algebra-{side}", required=True)
        sp.add_argument(f"--gens-{side}", required=True)
        sp.add_argument(f"--degree-{side}", type=int, required=True)

    sp = add("dsum", cmd_dsum, "monomial minimum over an m-fold direct sum")
    gens(sp)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=200)

    sp = add("trace", cmd_trace, "normalized traces on balls of a group", algebra=False)
    sp.add_argument("--group", required=True, help="f2, f:N, z:D or heis")
    sp.add_argument("--op", required=True, help='prefix:a, parity:0, id, const:c or conv:"<expr>"')
    sp.add_argument("--g", required=True, help="group element to conjugate by")
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--nmin", type=int, default=0)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = add("verify", cmd_verify, "re-check a stored certificate", algebra=False)
    sp.add_argument("certificate")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
