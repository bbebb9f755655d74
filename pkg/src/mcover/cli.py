"""Command line front end: ``run``, ``gen`` and ``census``.

Exit codes: 0 success, 1 usage or I/O error, 2 invariant violation
(``run --verify``), 3 search budget exceeded.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

from .core import format_rational, parse_rational
from .formats import FormatError, dumps_stream, read_stream
from .generators import TARGET_RULES, ParameterError, build_family
from .oracle import REPORT_COLUMNS, Algorithm, BudgetExceeded, run_stream
from .rounding import (
    CensusBudgetExceeded,
    CensusMode,
    build_context,
    census_for_context,
    distinct_load_census,
    pow2,
    validate_epsilon,
)

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with 2, which means "violation" here
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _epsilon(text: str) -> Fraction:
    try:
        return validate_epsilon(parse_rational(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"epsilon must be a unit fraction 1/k: {exc}")


def _write(text: str, out: Optional[str]) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mcover", description="Online machine covering with bounded migration.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser(
        "run",
        help="replay a stream through an online algorithm",
        description="Replay a stream and report one row per arrival.",
        epilog="CSV columns: " + ", ".join(REPORT_COLUMNS) + ". JSON mirrors the rows and adds max_ratio and max_factor.",
    )
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--family", help="generated family, e.g. appendix-a:k=2 or random:seed=7,n=20")
    src.add_argument("--input", help="JSONL stream file")
    run.add_argument("--algo", choices=[a.value for a in Algorithm], default="online-lpt")
    run.add_argument("--eps", type=_epsilon, help="rounding accuracy 1/k (default: the stream's)")
    run.add_argument("--m", type=int, help="machine count when the input has no header")
    run.add_argument("--tie-break", choices=sorted(TARGET_RULES), help="Push target rule for --algo jump")
    run.add_argument("--verify", action="store_true", help="check structural invariants after every arrival")
    run.add_argument("--format", choices=["csv", "json"], default="csv")
    run.add_argument("--out", help="output path (default stdout)")
    run.add_argument("--opt-limit", type=int, default=14, help="compute OPT only for at most this many jobs")
    run.add_argument("--budget", type=int, default=5_000_000, help="node budget of the exact optimum search")

    gen = sub.add_parser("gen", help="write a generated family as a JSONL stream")
    gen.add_argument("family", help="family spec, e.g. swap-lb:k=2")
    gen.add_argument("--eps", type=_epsilon)
    gen.add_argument("--out")

    census = sub.add_parser(
        "census",
        help="count distinct single-machine loads under a rounding family",
        description="Words: arithmetic | geometric [pow2]; parameters as key=value "
        "(eps, ub, bound, floor, depth).",
    )
    census.add_argument("words", nargs="+", help="e.g. 'geometric pow2 depth=3' or 'arithmetic eps=1/2 ub=16'")
    census.add_argument("--guard", type=int, default=2_000_000)
    return parser


def cmd_run(args: argparse.Namespace) -> int:
    if args.family:
        spec = build_family(args.family, args.eps)
    else:
        with open(args.input, encoding="utf-8") as fh:
            spec = read_stream(fh, m=args.m, epsilon=args.eps)
    if args.budget <= 0 or args.opt_limit < 0:
        raise UsageError("budgets must be positive")
    eps = args.eps or spec.epsilon
    report = run_stream(
        spec.arrivals,
        spec.m,
        eps,
        args.algo,
        initial=spec.initial,
        opt_limit=args.opt_limit,
        budget=args.budget,
        target_rule=TARGET_RULES[args.tie_break or spec.target_rule],
        ub_override=spec.ub,
        verify=args.verify,
    )
    _write(report.to_json() if args.format == "json" else report.to_csv(), args.out)
    if args.verify and report.violations:
        for line in report.violations:
            print(f"violation: {line}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    spec = build_family(args.family, args.eps)
    _write(dumps_stream(spec), args.out)
    return EXIT_OK


def cmd_census(args: argparse.Namespace) -> int:
    words: List[str] = []
    params = {}
    for w in args.words:
        if "=" in w:
            key, _, value = w.partition("=")
            params[key.strip().lower()] = value.strip()
        else:
            words.append(w.lower())
    if not words or words[0] not in ("arithmetic", "geometric", "pow2"):
        raise UsageError("census mode must be arithmetic or geometric")
    try:
        if "pow2" in words:
            depth = int(params.get("depth", 3))
            total = pow2(depth)
            result = distinct_load_census(
                CensusMode.POWERS_OF_TWO, Fraction(1, 2), total, 1, exact_total=total, guard=args.guard
            )
            print(f"mode=pow2 depth={depth} multisets={result.multisets}")
            return EXIT_OK
        eps = validate_epsilon(parse_rational(params.get("eps", "1/2")))
        if words[0] == "arithmetic":
            ctx = build_context(eps, parse_rational(params.get("ub", "16")))
            result = census_for_context(ctx, guard=args.guard)
            label = f"mode=arithmetic eps={format_rational(eps)} ub={format_rational(ctx.ub)}"
        else:
            bound = parse_rational(params.get("bound", "1"))
            floor = parse_rational(params["floor"]) if "floor" in params else eps * bound
            result = distinct_load_census(CensusMode.GEOMETRIC, eps, bound, floor, guard=args.guard)
            label = f"mode=geometric eps={format_rational(eps)} bound={format_rational(bound)}"
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from exc
    verdict = "true" if result.all_distinct else "false"
    print(f"{label} distinct_loads={result.count} multisets={result.multisets} all_distinct={verdict}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"run": cmd_run, "gen": cmd_gen, "census": cmd_census}[args.command]
    try:
        return handler(args)
    except (BudgetExceeded, CensusBudgetExceeded) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, ParameterError, FormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
