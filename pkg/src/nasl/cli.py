"""`nasl` command-line driver: check, run, latex and repl subcommands."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, TextIO

from .analysis import TypedSpecification, check_specification
from .deep import run_deep
from .derivation import render_trace, render_tree
from .diagnostics import Diagnostic, NaslError
from .evaluator import DEFAULT_FUEL, DerivationFailure, EvaluationResult, run_evaluations
from .latex import emit_latex
from .parser import parse_source
from .values import RuntimeFault, render_value

EXIT_OK, EXIT_ERRORS, EXIT_IO = 0, 1, 2


class InputError(Exception):
    """The input file could not be read or the output could not be written."""


def read_source(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def load(path: str) -> tuple[Optional[TypedSpecification], list[Diagnostic]]:
    """Parse and check a file; the specification is None if parsing failed."""
    source = read_source(path)
    try:
        spec = parse_source(source, path)
    except NaslError as exc:
        return None, exc.diagnostics
    tspec = check_specification(spec)
    return tspec, tspec.diagnostics


def print_diagnostics(diags: list[Diagnostic], out: TextIO):
    for d in diags:
        print(d.render(), file=out)
    errors = sum(d.is_error for d in diags)
    if errors:
        print(f"{errors} error{'s' if errors != 1 else ''}", file=out)


def format_result(result: EvaluationResult, show_tree: bool = False, trace_depth: int = 5) -> str:
    if result.ok:
        text = render_value(result.value)
        if show_tree:
            text += "\n" + render_tree(result.tree)
        return text
    err = result.error
    where = result.evaluation.span
    if isinstance(err, DerivationFailure):
        lines = [f"{where}: error: {err.code}: {err.message}"]
        if err.trace:
            lines.append("  attempted rules:")
            lines.append(render_trace(err.trace, trace_depth, indent=2))
        return "\n".join(lines)
    if isinstance(err, RuntimeFault):
        return f"{where}: error: {err.code}: {err.message} (at {err.span})"
    return f"{where}: error: {err}"


def cmd_check(args) -> int:
    tspec, diags = load(args.file)
    print_diagnostics(diags, sys.stdout)
    return EXIT_OK if tspec is not None and tspec.ok else EXIT_ERRORS


def cmd_run(args) -> int:
    tspec, diags = load(args.file)
    print_diagnostics(diags, sys.stderr)
    if tspec is None or not tspec.ok:
        return EXIT_ERRORS
    if not tspec.spec.evaluations:
        print("no evaluations")
        return EXIT_OK
    status = EXIT_OK
    for result in run_evaluations(tspec, args.max_fuel):
        print(format_result(result, args.show_tree, args.trace_depth))
        if not result.ok:
            status = EXIT_ERRORS
    return status


def cmd_latex(args) -> int:
    tspec, diags = load(args.file)
    print_diagnostics(diags, sys.stderr)
    if tspec is None or not tspec.ok:
        return EXIT_ERRORS
    out = args.output or str(Path(args.file).with_suffix(".tex"))
    try:
        Path(out).write_text(emit_latex(tspec, fragment=args.fragment), encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc}") from exc
    return EXIT_OK


def cmd_repl(args) -> int:
    from .repl import Repl

    return Repl(max_fuel=args.max_fuel, trace_depth=args.trace_depth).loop(sys.stdin, sys.stdout)


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nasl", description="Check, run and typeset natural-semantics specifications.")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="report parse and type errors")
    check.add_argument("file")
    check.set_defaults(func=cmd_check)

    run = sub.add_parser("run", help="check, then execute every evaluation")
    run.add_argument("file")
    run.add_argument("--show-tree", action="store_true", help="print each derivation tree")
    run.add_argument("--max-fuel", type=_positive, default=DEFAULT_FUEL, help="rule attempts per evaluation")
    run.add_argument("--trace-depth", type=_positive, default=5, help="nesting shown in failure traces")
    run.set_defaults(func=cmd_run)

    latex = sub.add_parser("latex", help="write grammars and rules as LaTeX")
    latex.add_argument("file")
    latex.add_argument("-o", "--output", help="output path (default: input with .tex suffix)")
    latex.add_argument("--fragment", action="store_true", help="omit the document preamble")
    latex.set_defaults(func=cmd_latex)

    repl = sub.add_parser("repl", help="interactive session")
    repl.add_argument("--max-fuel", type=_positive, default=DEFAULT_FUEL)
    repl.add_argument("--trace-depth", type=_positive, default=5)
    repl.set_defaults(func=cmd_repl)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run_deep(args.func, args)
    except InputError as exc:
        print(f"nasl: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
