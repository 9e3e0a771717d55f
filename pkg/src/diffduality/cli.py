"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 usage or input error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .checks import CheckUsageError, check_names, run_check
from .coefficients import CoefficientError
from .diffop import SpaceMismatchError, op_adjoint, op_compose
from .fileformat import DocumentError, parse_metric, parse_operator, print_operator
from .gallery import (
    MetricError, algebraic_map, dims_table, dual_operator, gauge_divergence, lie_operator,
    linearized_curvature, metric_make,
)
from .groebner import BudgetExceeded, op_rank, syzygy_module, time_budget
from .randops import property_failures
from .sequences import diff_trd, parametrization_test

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _gallery_table():
    return {
        "killing": lambda m: lie_operator(m),
        "conformal-killing": lambda m: lie_operator(m, conformal=True),
        "christoffel": lambda m: linearized_curvature(m, "christoffel"),
        "riemann": lambda m: linearized_curvature(m, "riemann"),
        "ricci": lambda m: linearized_curvature(m, "ricci"),
        "trace": lambda m: linearized_curvature(m, "trace"),
        "einstein": lambda m: linearized_curvature(m, "einstein"),
        "dalembertian": lambda m: linearized_curvature(m, "dalembertian"),
        "bar": lambda m: algebraic_map(m, "bar"),
        "bar-inv": lambda m: algebraic_map(m, "bar_inv"),
        "trace-free": lambda m: algebraic_map(m, "trace_free"),
        "elation-to-ricci": lambda m: algebraic_map(m, "elation_to_ricci"),
        "ricci-to-elation": lambda m: algebraic_map(m, "ricci_to_elation"),
        "decompose-t2": lambda m: algebraic_map(m, "decompose_t2"),
        "cauchy": lambda m: dual_operator(m, "cauchy"),
        "div": lambda m: dual_operator(m, "div"),
        "adricci-sigma": lambda m: dual_operator(m, "adricci_sigma"),
        "gauge-div": lambda m: gauge_divergence(m),
    }


GALLERY = _gallery_table()


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_op(path: str):
    return parse_operator(_read(path))


def _metric(spec: str, n: int | None):
    if spec in ("minkowski", "euclid"):
        if n is None:
            raise UsageError("--n is required for preset metrics")
        return metric_make(spec, n)
    m = parse_metric(_read(spec))
    if n is not None and n != m.n:
        raise UsageError(f"metric file has dimension {m.n}, --n says {n}")
    return m


def _emit(out, text: str):
    out.write(text if text.endswith("\n") else text + "\n")


def cmd_adjoint(args, out):
    _emit(out, print_operator(op_adjoint(_load_op(args.file))))
    return EXIT_OK


def cmd_compose(args, out):
    outer, inner = _load_op(args.outer), _load_op(args.inner)
    _emit(out, print_operator(op_compose(outer, inner)))
    return EXIT_OK


def cmd_cc(args, out):
    op = _load_op(args.file)
    if args.depth < 1:
        raise UsageError("--depth must be at least 1")
    docs = []
    for level in range(1, args.depth + 1):
        op = syzygy_module(op, name=f"cc{level}")
        docs.append(f"# level {level}\n" + print_operator(op))
        if op.dst.dim == 0:
            break
    _emit(out, "\n".join(docs))
    return EXIT_OK


def cmd_paramtest(args, out):
    rep = parametrization_test(_load_op(args.file))
    _emit(out, rep.serialize())
    if args.show:
        _emit(out, "# parametrization\n" + print_operator(rep.parametrization))
    return EXIT_OK


def cmd_rank(args, out):
    _emit(out, f"rank: {op_rank(_load_op(args.file))}")
    return EXIT_OK


def cmd_difftrd(args, out):
    _emit(out, f"diff_trd: {diff_trd(_load_op(args.file))}")
    return EXIT_OK


def cmd_gallery(args, out):
    if args.name not in GALLERY:
        raise UsageError(f"unknown gallery operator {args.name!r}; choose from {', '.join(GALLERY)}")
    _emit(out, print_operator(GALLERY[args.name](_metric(args.metric, args.n))))
    return EXIT_OK


def cmd_dims(args, out):
    t = dims_table(args.n)
    lines = [f"{k}: {v}" for k, v in t.as_dict().items()]
    lines += [f"S{q}: {v}" for q, v in enumerate(t.sym)]
    lines += [f"L{r}: {v}" for r, v in enumerate(t.forms)]
    lines += [f"identity[{k}]: {'true' if ok else 'false'}" for k, ok in t.identities().items()]
    _emit(out, "\n".join(lines))
    return EXIT_OK


def cmd_check(args, out):
    if args.all == bool(args.name):
        raise UsageError("give a check name or --all")
    names = check_names() if args.all else [args.name]
    metric = args.metric
    if metric not in ("minkowski", "euclid"):
        metric = _metric(metric, args.n)
    blocks, failed, passed = [], 0, 0
    for name in names:
        try:
            res = run_check(name, args.n, metric)
        except CheckUsageError as exc:
            if not args.all:
                raise UsageError(str(exc)) from None
            blocks.append(f"check: {name}\nresult: not applicable ({exc})")
            continue
        blocks.append("\n".join(res.lines(timing=not args.no_timing)))
        if res.passed:
            passed += 1
        else:
            failed += 1
    _emit(out, "\n\n".join(blocks))
    if args.all:
        _emit(out, f"\nsummary: {passed} passed, {failed} failed")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_props(args, out):
    bad = property_failures(args.seed, args.count)
    lines = [f"seed: {args.seed}", f"cases: {args.count}", f"result: {'pass' if not bad else 'fail'}"]
    lines += [f"witness: {b}" for b in bad]
    _emit(out, "\n".join(lines))
    return EXIT_FAIL if bad else EXIT_OK


def _global_flags(p, default):
    # subcommands repeat the global flags; SUPPRESS keeps the top-level value unless given again
    keep = default is argparse.SUPPRESS
    p.add_argument("--seed", type=int, default=default if keep else 0, help="seed for randomized subcommands")
    p.add_argument("--budget", type=float, default=default if keep else None, metavar="SECONDS",
                   help="abort Groebner computations after this many seconds (exit 3)")
    p.add_argument("--no-timing", action="store_true", default=default if keep else False,
                   help="omit elapsed times from reports")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="diffduality", description="Linear differential operators over Q(x): "
                                "adjoints, compatibility conditions and parametrizations.")
    _global_flags(p, None)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)
    add = sub.add_parser

    def add_parser(name, **kw):
        return add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    s = sub.add_parser("adjoint", help="formal adjoint of an operator document")
    s.add_argument("file")
    s.set_defaults(func=cmd_adjoint)

    s = sub.add_parser("compose", help="print OUTER o INNER")
    s.add_argument("outer")
    s.add_argument("inner")
    s.set_defaults(func=cmd_compose)

    s = sub.add_parser("cc", help="generating compatibility conditions")
    s.add_argument("file")
    s.add_argument("--depth", type=int, default=1)
    s.set_defaults(func=cmd_cc)

    s = sub.add_parser("paramtest", help="adjoint-based parametrization test")
    s.add_argument("file")
    s.add_argument("--show", action="store_true", help="also print the parametrization")
    s.set_defaults(func=cmd_paramtest)

    for name, func, help_ in (("rank", cmd_rank, "generic rank"),
                              ("difftrd", cmd_difftrd, "differential transcendence degree")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("file")
        s.set_defaults(func=func)

    s = sub.add_parser("gallery", help="print a gravity-chain operator")
    s.add_argument("name", help=", ".join(GALLERY))
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--metric", default="minkowski", help="minkowski, euclid or a metric file")
    s.set_defaults(func=cmd_gallery)

    s = sub.add_parser("dims", help="dimension table")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_dims)

    s = sub.add_parser("check", help="run a named check (or --all)")
    s.add_argument("name", nargs="?")
    s.add_argument("--all", action="store_true")
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--metric", default="minkowski")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("props", help="randomized adjoint property checks")
    s.add_argument("--count", type=int, default=20)
    s.set_defaults(func=cmd_props)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        with time_budget(args.budget):
            return args.func(args, out)
    except BudgetExceeded:
        print("error: budget exceeded", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, DocumentError, CheckUsageError, MetricError, SpaceMismatchError,
            CoefficientError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
