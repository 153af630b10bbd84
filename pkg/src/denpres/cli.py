"""Command-line entry point: ``denpres <subcommand> ...``.

Every subcommand writes a JSON document (keys sorted, rationals as
``"num/den"`` strings) or a CSV table to ``--out`` or stdout, and optionally
a PNG figure to ``--figure``. Equal arguments give byte-identical files.

Exit status: 0 on success, 1 when a verification fails (a violated
verdict, a bound exceeded, a measure deviation above 3 sigma), 2 on a
usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .arith import cumulative_profile, m_ratio
from .jacobian import jacobian_limit_test
from .linalg import det
from .maps import ZOO, map_from_spec, orbit, orbit_csv
from .points import Box, denominator_sorted_array, star_discrepancy
from .sternbrocot import alternating_partial_sum, sawtooth_g
from .verify import (
    check_preserves_denominator,
    equidist_csv,
    equidist_statistic,
    measure_preservation_test,
    verdicts_csv,
)

DEFAULT_SEED = 20240101
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# options whose values may legitimately start with "-" (negative rationals)
_VALUE_OPTS = {"--box", "--window", "--point", "--start"}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- parsing


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def parse_point(text: str) -> tuple[Fraction, ...]:
    return tuple(parse_rational(x) for x in text.split(","))


def parse_box_corners(text: str) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"box must look like 'u1,u2:v1,v2', got {text!r}")
    u, v = parse_point(lo), parse_point(hi)
    if len(u) != len(v):
        raise argparse.ArgumentTypeError("box corners have different dimensions")
    if any(a > b for a, b in zip(u, v)):
        raise argparse.ArgumentTypeError("box lower corner exceeds upper corner")
    return u, v


def parse_k_list(text: str) -> list[int]:
    """``"1..60,2310"`` -> [1, ..., 60, 2310]; order kept, duplicates dropped."""
    out: list[int] = []
    try:
        for part in text.split(","):
            a, dots, b = part.partition("..")
            out.extend(range(int(a), int(b) + 1) if dots else [int(a)])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad k list {text!r}") from None
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError("k values must be positive")
    return list(dict.fromkeys(out))


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _make_box(corners, closure: str) -> Box:
    u, v = corners
    return {"half-open": Box.half_open, "closed": Box.closed, "open": Box.open}[closure](u, v)


def _map(spec: str):
    try:
        return map_from_spec(spec)
    except (ValueError, KeyError, IndexError, ZeroDivisionError) as exc:
        msg = str(exc)
        if "known maps" not in msg:
            msg += f" (known maps: {', '.join(ZOO)})"
        raise UsageError(f"bad map {spec!r}: {msg}") from None


def _fr(x) -> str:
    return str(Fraction(x))


# ---------------------------------------------------------------- output


def _emit(args, text: str) -> None:
    if args.out in (None, "-"):
        sys.stdout.write(text)
        return
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text)


def _json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _csv(header: list[str], rows: list[list]) -> str:
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _config(args) -> dict:
    skip = {"func", "out", "figure", "format"}
    cfg = {}
    for key, val in sorted(vars(args).items()):
        if key in skip:
            continue
        if isinstance(val, tuple) and val and isinstance(val[0], tuple):
            val = [[_fr(x) for x in c] for c in val]
        elif isinstance(val, tuple):
            val = [_fr(x) for x in val]
        elif isinstance(val, list) and val and isinstance(val[0], tuple):
            val = [[[_fr(x) for x in c] for c in b] for b in val]
        cfg[key] = val
    return cfg


# ---------------------------------------------------------------- commands


def cmd_totient(args) -> int:
    prof = cumulative_profile(args.k_max, args.dim)
    rows = [
        {"k": r.k, "g": r.g, "G": r.G, "t": r.t, "T": r.T, "m": _fr(m_ratio(r.k, args.dim))}
        for r in prof
    ]
    cols = ["k", "g", "G", "t", "T", "m"]
    if args.format == "csv":
        _emit(args, _csv(cols, [[r[c] for c in cols] for r in rows]))
    else:
        _emit(args, _json({"command": "totient", "config": _config(args), "rows": rows}))
    return EXIT_OK


def cmd_equidist(args) -> int:
    if args.box is None:
        n = args.dim or 2
        corners = ((Fraction(0),) * n, (Fraction(1, 2), Fraction(1, 3)) if n == 2 else (Fraction(1, 2),) * n)
    else:
        corners = args.box
        n = len(corners[0])
        if args.dim is not None and args.dim != n:
            raise UsageError(f"--dim {args.dim} does not match the {n}-dimensional box")
    box = _make_box(corners, args.closure)
    reports = [equidist_statistic(box, k, n) for k in args.k_list]
    rows = [r.to_row() for r in reports]
    ok = all(r["within_bound"] is not False for r in rows)
    if args.format == "csv":
        _emit(args, equidist_csv(reports))
    else:
        doc = {"command": "equidist", "config": _config(args), "box": box.to_json(), "dim": n,
               "rows": rows, "all_within_bound": ok}
        _emit(args, _json(doc))
    if args.figure:
        from .plotting import plot_equidist

        plot_equidist(rows, args.figure)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_checkmap(args) -> int:
    m = _map(args.map)
    if args.window is None:
        corners = ((Fraction(-2),) * m.dim, (Fraction(2),) * m.dim)
    else:
        corners = args.window
    if len(corners[0]) != m.dim:
        raise UsageError(f"window is {len(corners[0])}-dimensional but {m.spec()} acts on R^{m.dim}")
    window = _make_box(corners, args.closure)
    try:
        verdicts = [check_preserves_denominator(m, window, k) for k in args.k_list]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    violated = any(v.status == "violated" for v in verdicts)
    if args.format == "csv":
        _emit(args, verdicts_csv(verdicts))
    else:
        doc = {"command": "checkmap", "config": _config(args), "map": m.descriptor(),
               "verdicts": [v.to_json() for v in verdicts]}
        _emit(args, _json(doc))
    return EXIT_FAIL if violated else EXIT_OK


def cmd_jacobian(args) -> int:
    m = _map(args.map)
    if len(args.point) != m.dim:
        raise UsageError(f"point is {len(args.point)}-dimensional but {m.spec()} acts on R^{m.dim}")
    try:
        trace = jacobian_limit_test(m, args.point, args.depth, window=args.window)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "csv":
        _emit(args, trace.to_csv())
    else:
        doc = {"command": "jacobian", "config": _config(args), "map": m.descriptor()} | trace.to_json()
        _emit(args, _json(doc))
    if args.figure:
        from .plotting import plot_jacobian_trace

        plot_jacobian_trace([det(s.A) for s in trace.steps], [s.a_is_integer for s in trace.steps], args.figure)
    return EXIT_OK


def cmd_discrepancy(args) -> int:
    Ks = list(range(1, args.k_max + 1)) if args.k_max else args.k_list
    cubes = ["half-open", "closed"] if args.cube == "both" else [args.cube]
    rows = []
    for cube in cubes:
        for K in Ks:
            pts = denominator_sorted_array(args.dim, K, cube)
            d = star_discrepancy(pts, args.dim, args.grid)
            exact = isinstance(d, Fraction)
            rows.append({
                "K": K, "n": args.dim, "cube": cube, "N": len(pts.ks),
                "discrepancy": _fr(d) if exact else repr(d),
                "discrepancy_float": float(d),
                "method": "exact" if exact else f"grid-{args.grid}",
            })
    cols = ["K", "n", "cube", "N", "discrepancy", "discrepancy_float", "method"]
    if args.format == "csv":
        _emit(args, _csv(cols, [[r[c] for c in cols] for r in rows]))
    else:
        _emit(args, _json({"command": "discrepancy", "config": _config(args), "rows": rows}))
    if args.figure:
        from .plotting import plot_discrepancy

        plot_discrepancy(rows, args.figure)
    return EXIT_OK


def _plotf_function(args):
    if args.kind == "sawtooth":
        return sawtooth_g(args.stages), f"g_{args.stages}"
    if args.kind == "example1":
        from .maps import example1_f

        return example1_f(args.stages), f"f (first {args.stages} teeth)"
    return alternating_partial_sum(args.stages), f"f_{args.stages}"


def cmd_plotf(args) -> int:
    f, label = _plotf_function(args)
    if args.format == "json":
        doc = {"command": "plotf", "config": _config(args), "label": label} | f.to_json()
        _emit(args, _json(doc))
    else:
        _emit(args, f.to_svg(title=label))
    if args.figure:
        from .plotting import plot_function

        plot_function(f, args.figure, title=label)
    return EXIT_OK


def cmd_orbit(args) -> int:
    m = _map(args.map)
    if len(args.start) != m.dim:
        raise UsageError(f"start is {len(args.start)}-dimensional but {m.spec()} acts on R^{m.dim}")
    if args.format == "csv":
        _emit(args, orbit_csv(m, args.start, args.steps))
        pts = None
    else:
        pts = orbit(m, args.start, args.steps)
        doc = {"command": "orbit", "config": _config(args), "map": m.descriptor(),
               "points": [[_fr(x) for x in p] for p in pts]}
        _emit(args, _json(doc))
    if args.figure:
        from .plotting import plot_orbit

        plot_orbit(pts or orbit(m, args.start, args.steps), args.figure)
    return EXIT_OK


def cmd_measure(args) -> int:
    m = _map(args.map)
    boxes = args.box or [((Fraction(1, 2),) * m.dim, (Fraction(3, 2),) * m.dim)]
    if any(len(c[0]) != m.dim for c in boxes):
        raise UsageError(f"probe boxes must be {m.dim}-dimensional")
    probes = measure_preservation_test(m, [Box.half_open(*c) for c in boxes], args.samples, seed=args.seed)
    ok = all(p.deviation <= 3 * p.sigma for p in probes)
    rows = [p.to_json() | {"within_3_sigma": p.deviation <= 3 * p.sigma} for p in probes]
    cols = ["box", "measure", "estimate", "deviation", "sigma", "samples", "escaped", "within_3_sigma"]
    if args.format == "csv":
        _emit(args, _csv(cols, [[r[c] for c in cols] for r in rows]))
    else:
        _emit(args, _json({"command": "measure", "config": _config(args), "map": m.descriptor(), "probes": rows}))
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------- parser


def _common(p: argparse.ArgumentParser, formats=("json", "csv"), figure: bool = True) -> None:
    g = p.add_argument_group("output")
    g.add_argument("--format", choices=formats, default=formats[0], help=f"report format (default {formats[0]})")
    g.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    g.add_argument("--seed", type=int, default=DEFAULT_SEED, help="64-bit RNG seed (default %(default)s)")
    if figure:
        g.add_argument("--figure", metavar="PNG", help="also render a matplotlib figure to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="denpres",
        description="Exact experiments on rational points sorted by denominator and on maps that preserve denominators.",
        epilog="Rationals are written num/den; box corners are separated by ':', e.g. 0,0:1/2,1/3.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    fmt = argparse.RawDescriptionHelpFormatter

    p = sub.add_parser(
        "totient",
        help="Jordan totients and cumulative counts",
        formatter_class=fmt,
        description=(
            "Rows k, g(k), G(k), t(K), T(K), m(k) for k = 1..K.\n\n"
            "g(k) = sum_{d|k} mu(k/d) d^n counts denominator-k points in the half-open\n"
            "cube (0,1]^n, G(k) = sum_{d|k} mu(k/d) (d+1)^n those in [0,1]^n; t and T\n"
            "are running sums. m(k) = sum_{d|k} |mu(k/d)| d^(n-1) / g(k) is the error\n"
            "ratio in the box-count bound."
        ),
    )
    p.add_argument("--k-max", type=positive_int, required=True, help="largest k")
    p.add_argument("--dim", type=positive_int, default=2, help="dimension n (default 2)")
    _common(p, figure=False)
    p.set_defaults(func=cmd_totient)

    p = sub.add_parser(
        "equidist",
        help="box averages over denominator-k points against the box volume",
        formatter_class=fmt,
        description=(
            "For each k, the fraction of denominator-k points of the unit cube that fall\n"
            "in the box, compared with the box volume. For a half-open box (u,v] the\n"
            "difference is bounded by 2^n m(k) per anchored box in its decomposition,\n"
            "and the report carries that bound. Exits 1 if a bound is exceeded.\n"
            "Default box: (0,(1/2,1/3)] when n = 2."
        ),
    )
    p.add_argument("--box", type=parse_box_corners, help="corners u:v, e.g. 0,0:1/2,1/3")
    p.add_argument("--closure", choices=["half-open", "closed", "open"], default="half-open",
                   help="which faces belong to the box (default half-open: lower open, upper closed)")
    p.add_argument("--k-list", type=parse_k_list, required=True, help="k values, e.g. 1..60,2310")
    p.add_argument("--dim", type=positive_int, help="dimension (inferred from --box)")
    _common(p)
    p.set_defaults(func=cmd_equidist)

    p = sub.add_parser(
        "checkmap",
        help="check denominator preservation on a window",
        formatter_class=fmt,
        description=(
            "Pushes every denominator-k point of the window through the map and its\n"
            "inverse and reports 'preserved', 'violated' (with a witness point) or\n"
            "'inconclusive' (preimages leave the map's domain). A finite window can\n"
            "refute preservation but not prove it. Exits 1 on any violation.\n\n"
            f"Maps: {', '.join(ZOO)}; parameters follow a colon, e.g.\n"
            "translation:1/2,1/3, affine:1,1;0,1@0,2, shear-example1:40, shear-fT:11."
        ),
    )
    p.add_argument("--map", required=True, help="map spec")
    p.add_argument("--window", type=parse_box_corners, help="window corners (default -2,...:2,...)")
    p.add_argument("--closure", choices=["closed", "open", "half-open"], default="closed",
                   help="window faces (default closed)")
    p.add_argument("--k-list", type=parse_k_list, required=True, help="k values, e.g. 1..60")
    _common(p, figure=False)
    p.set_defaults(func=cmd_checkmap)

    p = sub.add_parser(
        "jacobian",
        help="difference matrices along unimodular simplices shrinking to a point",
        formatter_class=fmt,
        description=(
            "Builds nested simplices whose projective vertex matrices are in GL(n+1,Z)\n"
            "(mediant subdivision of the longest edge) and records, at every depth,\n"
            "the linear map A sending vertex differences to image differences.\n"
            "For a denominator-preserving map A is an integer matrix, so a\n"
            "differentiable map has an integer Jacobian. The verdict is 'converged'\n"
            "when the last --window matrices coincide."
        ),
    )
    p.add_argument("--map", required=True, help="map spec (see checkmap --help)")
    p.add_argument("--point", type=parse_point, required=True, help="target point, e.g. 1/1000,1/1000")
    p.add_argument("--depth", type=positive_int, default=25, help="subdivision depth (default 25)")
    p.add_argument("--window", type=positive_int, default=5, help="stabilization window (default 5)")
    _common(p)
    p.set_defaults(func=cmd_jacobian)

    p = sub.add_parser(
        "discrepancy",
        help="star discrepancy of the denominator-sorted enumeration",
        formatter_class=fmt,
        description=(
            "Star discrepancy of all points of denominator <= K in the cube. For n = 1\n"
            "it is exact; for n >= 2 it is the maximum over anchored boxes [0,b] with\n"
            "corners b on the grid {0,1/R,...,1}^n, a lower bound for the true value."
        ),
    )
    p.add_argument("--dim", type=positive_int, default=1, help="dimension (default 1)")
    ks = p.add_mutually_exclusive_group()
    ks.add_argument("--k-max", type=positive_int, help="every K = 1..K_MAX")
    ks.add_argument("--k-list", type=parse_k_list, default=[10, 40, 160], help="K values (default 10,40,160)")
    p.add_argument("--cube", choices=["half-open", "closed", "both"], default="half-open",
                   help="enumerate (0,1]^n or [0,1]^n (default half-open)")
    p.add_argument("--grid", type=positive_int, default=50, help="grid resolution R for n >= 2 (default 50)")
    _common(p)
    p.set_defaults(func=cmd_discrepancy)

    p = sub.add_parser(
        "plotf",
        help="graph of a Stern-Brocot partial sum as SVG",
        formatter_class=fmt,
        description=(
            "g_t is the period-1 sawtooth equal to 1/den at the stage-t mediants and 0\n"
            "at stage t-1 endpoints; f_T = sum_{t<=T} (-1)^(t-1) g_t. The default\n"
            "output is an 800x500 SVG 1.1 polyline through the exact breakpoints;\n"
            "--kind example1 draws the tooth function built from flanking intervals."
        ),
    )
    p.add_argument("--stages", type=positive_int, default=11, help="number of stages T (default 11)")
    p.add_argument("--kind", choices=["partial-sum", "sawtooth", "example1"], default="partial-sum",
                   help="f_T (default), the single sawtooth g_T, or the tooth function")
    _common(p, formats=("svg", "json"))
    p.set_defaults(func=cmd_plotf)

    p = sub.add_parser(
        "orbit",
        help="iterate a map from a starting point",
        formatter_class=fmt,
        description="Exact orbit (x_0, F(x_0), ..., F^s(x_0)) with the denominator of each point.",
    )
    p.add_argument("--map", required=True, help="map spec (see checkmap --help)")
    p.add_argument("--start", type=parse_point, required=True, help="starting point, e.g. 1/3,1/5")
    p.add_argument("--steps", type=int, default=100, help="number of iterates (default 100)")
    _common(p, formats=("csv", "json"))
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser(
        "measure",
        help="Monte-Carlo area of preimages of probe boxes",
        formatter_class=fmt,
        description=(
            "Estimates the Lebesgue measure of F^-1(W) for each probe box W by stratified\n"
            "sampling (one uniform point per grid cell) over a bounding region of the\n"
            "preimage, and compares it with the measure of W. Exits 1 if any deviation\n"
            "exceeds 3 binomial standard errors."
        ),
    )
    p.add_argument("--map", required=True, help="map spec (see checkmap --help)")
    p.add_argument("--box", type=parse_box_corners, action="append",
                   help="probe box u:v (repeatable; default (1/2,3/2]^n)")
    p.add_argument("--samples", type=positive_int, default=10**6, help="samples per box (default 10^6)")
    _common(p, figure=False)
    p.set_defaults(func=cmd_measure)
    return parser


def _join_negative_values(argv: list[str]) -> list[str]:
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if tok in _VALUE_OPTS and len(nxt) > 1 and nxt[0] == "-" and (nxt[1].isdigit() or nxt[1] == "."):
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"denpres {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"denpres {args.command}: cannot write output: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
