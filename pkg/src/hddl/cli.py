"""Command-line entry point: ``hddl validate|ground|plan|verify|fmt``."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import List, Optional, TextIO

from .diagnostics import Diagnostic, HDDLSemanticError, HDDLSyntaxError
from .grounding import GroundingError, emit_ground
from .model import analyze
from .pipeline import UncompiledPreconditions, load_ground
from .planner import SearchLimits, plan
from .syntax import emit, parse_domain_text, parse_problem_text, parse_text
from .verification import WitnessParseError, format_witness, parse_witness, renumber, verify

OK, REJECTED, USAGE, INVALID, LIMIT = 0, 1, 2, 3, 4


class _Out:
    def __init__(self, args, witness_on_stdout: bool = False):
        self.json = getattr(args, "json", False)
        self.info_stream: TextIO = sys.stderr if (args.quiet or witness_on_stdout) else sys.stdout
        env = os.environ.get("HDDL_COLOR")
        self.color = env == "1" if env in ("0", "1") else sys.stderr.isatty()

    def info(self, msg: str):
        print(msg, file=self.info_stream)

    def error(self, msg: str):
        print(f"hddl: {msg}", file=sys.stderr)

    def diagnostics(self, diags: List[Diagnostic]):
        for d in diags:
            print(d.to_json() if self.json else d.format(self.color), file=sys.stderr)


def _read(path: str) -> str:
    return Path(path).read_text()


def _ground(args):
    return load_ground(
        args.domain,
        args.problem,
        strict=args.strict_requirements,
        compile_preconditions=args.compile_method_prec,
        prune=not args.no_prune,
    )


def cmd_validate(args, out: _Out) -> int:
    d = parse_domain_text(_read(args.domain), args.domain)
    p = parse_problem_text(_read(args.problem), args.problem)
    model, diags = analyze(d, p, args.strict_requirements)
    out.diagnostics(diags)
    if model is None:
        return INVALID
    out.info("valid")
    return OK


def cmd_ground(args, out: _Out) -> int:
    g = _ground(args)
    if args.emit_ground:
        listing = emit_ground(g)
        if args.output:
            Path(args.output).write_text(listing)
        else:
            sys.stdout.write(listing)
    if args.stats or not args.emit_ground:
        for k, v in g.stats().items():
            out.info(f"{k}={v}")
    return OK


def cmd_plan(args, out: _Out) -> int:
    g = _ground(args)
    try:
        if args.exhaustive:
            limits = SearchLimits(None, None, args.node_budget, None)
        else:
            limits = SearchLimits(args.max_depth, args.max_length, args.node_budget, args.time_budget)
    except ValueError as e:
        out.error(str(e))
        return USAGE
    result = plan(g, limits)
    if args.stats:
        for line in result.stats.lines():
            out.info(line)
    if not result.solved:
        out.info(f"no plan: {result.reason}")
        return REJECTED
    verdict = verify(g, result.plan, result.tree)
    if not verdict.accepted:
        out.error(f"internal error: planner output failed verification: {verdict}")
        return LIMIT
    text = format_witness(*renumber(result.plan, result.tree))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    out.info(f"plan found: {len(result.plan)} actions")
    return OK


def cmd_verify(args, out: _Out) -> int:
    g = _ground(args)
    text = _read(args.witness)
    try:
        p, tree = parse_witness(text)
    except WitnessParseError as e:
        out.error(f"{args.witness}: malformed witness: {e}")
        return INVALID
    verdict = verify(g, p, tree)
    out.info(str(verdict))
    return OK if verdict.accepted else REJECTED


def cmd_fmt(args, out: _Out) -> int:
    original = _read(args.path)
    formatted = emit(parse_text(original, args.path)) + "\n"
    if args.check:
        if formatted != original:
            out.info(f"{args.path} is not formatted")
            return REJECTED
        return OK
    target = args.output or args.path
    if args.output or formatted != original:
        Path(target).write_text(formatted)
    return OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiet", action="store_true", help="send all messages to standard error")
    common.add_argument("--json", action="store_true", help="print diagnostics as JSON lines")

    pipeline = argparse.ArgumentParser(add_help=False, parents=[common])
    pipeline.add_argument("domain")
    pipeline.add_argument("problem")
    pipeline.add_argument("--strict-requirements", action="store_true")
    pipeline.add_argument("--no-prune", action="store_true", help="keep unreachable ground tasks")
    pipeline.add_argument(
        "--compile-method-prec",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="turn method preconditions into leading actions (default: on)",
    )

    parser = argparse.ArgumentParser(prog="hddl", description="HDDL parser, grounder, planner and plan verifier.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", parents=[pipeline], help="parse and check a domain/problem pair")
    v.set_defaults(run=cmd_validate)

    g = sub.add_parser("ground", parents=[pipeline], help="instantiate the model")
    g.add_argument("--emit-ground", action="store_true", help="print the ground model listing")
    g.add_argument("--stats", action="store_true")
    g.add_argument("-o", "--output")
    g.set_defaults(run=cmd_ground)

    p = sub.add_parser("plan", parents=[pipeline], help="search for a plan and write a witness")
    p.add_argument("-o", "--output", help="witness file (default: standard output)")
    p.add_argument("--stats", action="store_true")
    p.add_argument("--exhaustive", action="store_true", help="no depth, length or time limit")
    p.add_argument("--node-budget", type=int, default=1_000_000)
    p.add_argument("--time-budget", type=float, default=60.0)
    p.add_argument("--max-depth", type=int, default=None, help="decomposition limit (default: none)")
    p.add_argument("--max-length", type=int, default=None)
    p.set_defaults(run=cmd_plan)

    w = sub.add_parser("verify", parents=[pipeline], help="check a plan witness")
    w.add_argument("witness")
    w.set_defaults(run=cmd_verify)

    f = sub.add_parser("fmt", parents=[common], help="rewrite a file in canonical form")
    f.add_argument("path")
    f.add_argument("-o", "--output", help="write here instead of in place")
    f.add_argument("--check", action="store_true", help="only report whether the file is formatted")
    f.set_defaults(run=cmd_fmt)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    witness_on_stdout = args.command == "plan" and not args.output
    out = _Out(args, witness_on_stdout)
    try:
        return args.run(args, out)
    except HDDLSyntaxError as e:
        out.diagnostics([e.diagnostic])
        return INVALID
    except HDDLSemanticError as e:
        out.diagnostics(e.diagnostics)
        return INVALID
    except GroundingError as e:
        out.error(f"ground-infeasible: {e}")
        return INVALID
    except UncompiledPreconditions as e:
        out.error(str(e))
        return USAGE
    except OSError as e:
        out.error(f"{e.filename or ''}: {e.strerror or e}")
        return USAGE
    except (RecursionError, MemoryError) as e:
        out.error(f"internal limit: {type(e).__name__}")
        return LIMIT


if __name__ == "__main__":
    sys.exit(main())
