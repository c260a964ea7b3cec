"""Command-line front end.

Exit codes: 0 success, 1 suite violations, 2 usage or schema error,
3 enumeration budget exceeded (partial output is still written).
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import analysis as An
from . import checks as K
from . import cubing as C
from . import kernels
from . import walls2d as W
from .errors import BudgetExceeded, DualCubeError, SchemaError
from .pocset import free_pocset, roller_chain_example, star_tree_example

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _positive_int(s):
    v = int(s)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _nonneg_int(s):
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a nonnegative integer")
    return v


def _rational(s):
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {s}") from exc


def _positive_rational(s):
    q = _rational(s)
    if q <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return q


def _window(s):
    try:
        cx, cy, r = (Fraction(p) for p in s.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("window is cx,cy,r") from exc
    if r <= 0:
        raise argparse.ArgumentTypeError("window radius must be positive")
    return W.Window((cx, cy), r)


def _radii(s):
    return [_positive_rational(p) for p in s.split(",") if p]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget-vertices", type=_nonneg_int, default=C.DEFAULT_MAX_VERTICES)
    common.add_argument("--budget-radius", type=_nonneg_int, default=None)
    common.add_argument("--margin", type=_rational, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--format", default=None)

    p = argparse.ArgumentParser(prog="dualcube", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"dualcube ({kernels.BACKEND_NAME} kernels)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write an arrangement or poc-set")
    g.add_argument("kind", choices=["hex", "triangle", "grid", "random", "parallel",
                                    "roller-chain", "star-tree", "free"])
    g.add_argument("--N", type=_positive_int)
    g.add_argument("--n", type=_positive_int)
    g.add_argument("--gap", type=_positive_rational, default=Fraction(10))
    g.add_argument("--window", type=_window, default=None, help="cx,cy,r")
    g.add_argument("--base-radius", type=_rational, default=Fraction(0))

    e = sub.add_parser("enumerate", parents=[common], help="enumerate the dual cubing")
    e.add_argument("input")

    a = sub.add_parser("analyze", parents=[common], help="heights, shadows and metric report")
    a.add_argument("input")
    a.add_argument("--qi", action="store_true")
    a.add_argument("--samples", type=_positive_int, default=500)
    a.add_argument("--radii", type=_radii, default=[])

    c = sub.add_parser("check", parents=[common], help="run an invariant suite")
    c.add_argument("input", nargs="?")
    c.add_argument("--suite", choices=K.SUITES)
    c.add_argument("--C", dest="C", type=_positive_rational, default=None)
    c.add_argument("--samples", type=_positive_int, default=100)
    c.add_argument("--radii", type=_radii, default=[])
    c.add_argument("--replay", default=None, help="violations file to re-run")

    x = sub.add_parser("export", parents=[common], help="DOT graph or SVG figure")
    x.add_argument("input")
    return p


def _emit(args, payload):
    data = payload if isinstance(payload, bytes) else payload.encode()
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _dump(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True, default=str) + "\n"


def _read(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: expected a JSON object")
    return doc


def _budget(args):
    return {"max_vertices": args.budget_vertices, "max_radius": args.budget_radius}


def cmd_generate(args):
    k = args.kind
    need_N = k in ("hex", "grid")
    need_n = k in ("random", "roller-chain", "star-tree", "free")
    if need_N and args.N is None:
        raise UsageError(f"generate {k} needs --N")
    if need_n and args.n is None:
        raise UsageError(f"generate {k} needs --n")
    if k == "random" and args.seed is None:
        raise UsageError("generate random needs --seed")
    if k == "hex":
        obj = W.arrangement_hex(args.N, args.window, args.base_radius)
    elif k == "grid":
        obj = W.arrangement_grid(args.N, args.window, args.base_radius)
    elif k == "triangle":
        obj = W.arrangement_triangle(args.window, args.base_radius)
    elif k == "parallel":
        obj = W.arrangement_parallel(args.gap, args.window)
    elif k == "random":
        obj = W.arrangement_random(args.n, args.seed, args.window)
    elif k == "roller-chain":
        obj = roller_chain_example(args.n)
    elif k == "star-tree":
        if args.n < 3:
            raise UsageError("star-tree needs --n >= 3")
        obj = star_tree_example(args.n)
    else:
        obj = free_pocset(args.n)
    _emit(args, _dump(obj.to_json()))
    return EXIT_OK


def _enumerate(inst, args):
    """Graph plus exit status; a budget overrun still yields the partial graph."""
    try:
        return K.build_graph(inst, **_budget(args)), EXIT_OK
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return exc.graph, EXIT_BUDGET


def cmd_enumerate(args):
    inst = K.load_instance(_read(args.input))
    G, status = _enumerate(inst, args)
    fmt = args.format or "json"
    if fmt not in ("json", "dot"):
        raise UsageError("enumerate writes json or dot")
    heights = None
    if G.consistent is not None and G.consistent.any():
        heights = An.heights(G).height
    _emit(args, C.export_graph(G, fmt, heights=heights))
    return status


def cmd_analyze(args):
    inst = K.load_instance(_read(args.input))
    if not isinstance(inst, W.Arrangement):
        raise UsageError("analyze needs an arrangement")
    G, status = _enumerate(inst, args)
    qi = An.qi_report(inst, G, args.samples, args.seed or 0) if args.qi else None
    doc = An.analysis_report(inst, G, qi=qi, radii=args.radii, margin=args.margin)
    _emit(args, _dump(doc))
    return status


def cmd_check(args):
    if args.replay:
        records = _read(args.replay).get("violations", [])
        again = [r for rec in records for r in K.replay(rec)]
        _emit(args, _dump({"replayed": len(records), "reproduced": len(again), "violations": again}))
        return EXIT_VIOLATION if again else EXIT_OK
    if not args.input or not args.suite:
        raise UsageError("check needs an input file and --suite (or --replay)")
    if args.suite == "pwp" and args.C is None:
        raise UsageError("--suite pwp needs --C")
    params = {"seed": args.seed or 0, "samples": args.samples,
              "max_vertices": args.budget_vertices, "max_radius": args.budget_radius}
    if args.C is not None:
        params["C"] = W.rat_json(args.C)
    if args.margin is not None:
        params["margin"] = W.rat_json(args.margin)
    if args.radii:
        params["radii"] = [W.rat_json(r) for r in args.radii]
    try:
        records = K.run_suite(_read(args.input), args.suite, params)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        _emit(args, _dump({"suite": args.suite, "complete": False, "violations": []}))
        return EXIT_BUDGET
    _emit(args, _dump({"suite": args.suite, "complete": True, "violations": records}))
    return EXIT_VIOLATION if records else EXIT_OK


def cmd_export(args):
    inst = K.load_instance(_read(args.input))
    fmt = args.format or ("svg" if isinstance(inst, W.Arrangement) else "dot")
    if fmt == "svg":
        if not isinstance(inst, W.Arrangement):
            raise UsageError("svg export needs an arrangement")
        G, status = _enumerate(inst, args)
        _emit(args, An.shadow_overlay_svg(inst, G))
        return status
    if fmt in ("dot", "json"):
        G, status = _enumerate(inst, args)
        heights = An.heights(G).height if G.consistent is not None and G.consistent.any() else None
        _emit(args, C.export_graph(G, fmt, heights=heights))
        return status
    raise UsageError(f"unknown export format {fmt!r}")


COMMANDS = {"generate": cmd_generate, "enumerate": cmd_enumerate, "analyze": cmd_analyze,
            "check": cmd_check, "export": cmd_export}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DualCubeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
