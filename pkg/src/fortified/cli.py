"""Command-line entry point: ``fortify {table,multirun,slice,analyze}``.

Examples::

    fortify table --preset table1 --runs 1000 --format md
    fortify table --preset table2 --bump-optimum 1 --workers 4 --out table2.csv
    fortify multirun --bump-optimum 3 --runs 100800 --m-max 10 --bits-out opt3.bits
    fortify analyze --bits opt3.bits --mean-evals 45.0
    fortify slice --epsilon 1 2 --points 151
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from .de import DEConfig
from .harness import Problem
from .multirun import format_outcome_line, parse_outcome_line
from .reporting import DEFAULT_SEED, PRESETS, analyze_outcomes, cmd_multirun, cmd_slice, cmd_table


def _add_common(p: argparse.ArgumentParser, bump_default=None):
    p.add_argument("--function", default="branin", help="registered test function (default: branin)")
    p.add_argument("--bump-optimum", type=int, default=bump_default, help="label of the optimum to fortify")
    p.add_argument("--epsilon", type=float, default=1.0, help="bump width parameter (support radius 1/epsilon)")
    p.add_argument("--amplitude", type=float, default=10.0, help="bump multiplier (peak depth amplitude/e)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"master seed (default: {DEFAULT_SEED})")
    p.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    p.add_argument("--format", choices=("csv", "md"), default="csv")
    p.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fortify",
        description="Fortified test functions and DE replicate experiments",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__.split("Examples::", 1)[1],
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("table", help="replicate-run table over (pop, max_iter, polish) settings")
    _add_common(t)
    t.add_argument("--preset", choices=sorted(PRESETS), default=None, help="row set (table2 bumps optimum 1)")
    t.add_argument("--pop", type=int, default=None)
    t.add_argument("--max-iter", type=int, default=None)
    t.add_argument("--polish", action=argparse.BooleanOptionalAction, default=True)
    t.add_argument("--runs", type=int, default=1000)

    m = sub.add_parser("multirun", help="group-of-m failure rates vs the independence prediction")
    _add_common(m, bump_default=1)
    m.add_argument("--pop", type=int, default=2)
    m.add_argument("--max-iter", type=int, default=2)
    m.add_argument("--polish", action=argparse.BooleanOptionalAction, default=True)
    m.add_argument("--runs", type=int, default=100_800)
    m.add_argument("--m-max", type=int, default=10)
    m.add_argument("--bits-out", type=Path, default=None, help="write the run outcomes as one 0/1 line")

    a = sub.add_parser("analyze", help="multi-run table from a saved 0/1 outcome line")
    a.add_argument("--bits", type=Path, required=True)
    a.add_argument("--mean-evals", type=float, required=True, help="mean evaluations of a single run")
    a.add_argument("--m-max", type=int, default=10)
    a.add_argument("--format", choices=("csv", "md"), default="csv")
    a.add_argument("--out", type=Path, default=None)

    s = sub.add_parser("slice", help="1-D slice at fixed x1 for the base and fortified functions")
    s.add_argument("--function", default="branin")
    s.add_argument("--bump-optimum", type=int, default=1)
    s.add_argument("--epsilon", type=float, nargs="*", default=[1.0, 2.0])
    s.add_argument("--amplitude", type=float, default=10.0)
    s.add_argument("--x1", type=float, default=-math.pi)
    s.add_argument("--points", type=int, default=151)
    s.add_argument("--format", choices=("csv", "md"), default="csv")
    s.add_argument("--out", type=Path, default=None)
    return parser


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")

    try:
        if args.command == "table":
            if args.pop is not None or args.max_iter is not None:
                if args.pop is None or args.max_iter is None:
                    raise ValueError("--pop and --max-iter must be given together")
                rows, bump = [(args.pop, args.max_iter, args.polish)], None
            else:
                rows, bump = PRESETS[args.preset or "table1"]
            if args.bump_optimum is not None:
                bump = args.bump_optimum
            problem = Problem(args.function, bump, args.epsilon, args.amplitude)
            doc = cmd_table(rows, problem, args.runs, args.seed, args.workers)
        elif args.command == "multirun":
            problem = Problem(args.function, args.bump_optimum, args.epsilon, args.amplitude)
            config = DEConfig(pop=args.pop, max_iter=args.max_iter, polish=args.polish)
            result = cmd_multirun(problem, config, args.runs, args.m_max, args.seed, args.workers)
            if args.bits_out is not None:
                args.bits_out.write_text(format_outcome_line(result.outcome_bits) + "\n")
            doc = result.document
        elif args.command == "analyze":
            outcomes = parse_outcome_line(args.bits.read_text())
            doc = analyze_outcomes(outcomes, args.mean_evals, args.m_max)
        else:
            doc = cmd_slice(args.function, args.bump_optimum, args.epsilon, args.amplitude, args.x1, args.points)
    except ValueError as exc:
        print(f"fortify: error: {exc}", file=sys.stderr)
        return 2

    _emit(doc.render(args.format), args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
