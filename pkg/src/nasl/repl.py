"""Line-oriented interactive session.

Definitions accumulate into one specification, which is re-checked after every
addition; input that introduces errors is reported and discarded. Evaluations
run immediately. An item may span several lines: input is buffered for as long
as the parser reports that it ended too early.
"""
from __future__ import annotations

from dataclasses import replace
from typing import TextIO

from . import model as m
from .analysis import check_specification
from .cli import EXIT_OK, InputError, format_result, read_source
from .diagnostics import NaslError
from .evaluator import DEFAULT_FUEL, evaluate_lets, run_evaluation, run_evaluations
from .latex import emit_latex
from .parser import ReplCommand, ReplDefinition, parse_repl_input, parse_source
from .values import RuntimeFault

PROMPT, CONTINUATION = "nasl> ", "  ... "


class Repl:
    def __init__(self, max_fuel: int = DEFAULT_FUEL, trace_depth: int = 5, show_tree: bool = False):
        self.max_fuel = max_fuel
        self.trace_depth = trace_depth
        self.show_tree = show_tree
        self.spec = m.Specification()
        self.tspec = check_specification(self.spec)
        self.env = evaluate_lets(self.tspec)
        self.buffer: list[str] = []
        self.done = False

    @property
    def prompt(self) -> str:
        return CONTINUATION if self.buffer else PROMPT

    def feed(self, line: str) -> list[str]:
        """Process one input line and return the lines to print."""
        if not self.buffer and not line.strip():
            return []
        text = "\n".join(self.buffer + [line])
        try:
            item = parse_repl_input(text, self.spec)
        except NaslError as exc:
            if getattr(exc, "at_eof", False) and line.strip():
                self.buffer.append(line)
                return []
            self.buffer = []
            return [d.render() for d in exc.diagnostics]
        self.buffer = []
        if isinstance(item, ReplCommand):
            return self._command(item)
        if isinstance(item, ReplDefinition):
            return self._define(item.fragment)
        return self._evaluate(item.evaluation)

    def _accept(self, merged: m.Specification) -> list[str]:
        """Adopt `merged` (minus evaluations) if it checks cleanly; else report."""
        tspec = check_specification(merged)
        seen = {d.render() for d in self.tspec.diagnostics}
        out = [d.render() for d in tspec.diagnostics if d.render() not in seen]
        if not tspec.ok:
            return out
        try:
            env = evaluate_lets(tspec)
        except RuntimeFault as fault:
            return out + [f"{fault.span}: error: {fault.code}: {fault.message}"]
        self.spec = replace(merged, evaluations=())
        self.tspec = check_specification(self.spec)
        self.env = env
        return out

    def _define(self, fragment: m.Specification) -> list[str]:
        before = self.spec
        out = self._accept(before.merge(fragment))
        if self.spec is not before:
            node = (fragment.domains + fragment.syntaxes + fragment.lets + fragment.systems)[0]
            out.append(f"defined {node.name}")
        return out

    def _evaluate(self, ev: m.Evaluation) -> list[str]:
        tspec = check_specification(replace(self.spec, evaluations=(ev,)))
        if not tspec.ok:
            return [d.render() for d in tspec.errors]
        result = run_evaluation(tspec, ev, self.env, self.max_fuel)
        return [format_result(result, self.show_tree, self.trace_depth)]

    def _command(self, cmd: ReplCommand) -> list[str]:
        if cmd.name == "quit":
            self.done = True
            return []
        if cmd.name == "latex":
            try:
                with open(cmd.argument, "w", encoding="utf-8") as fh:
                    fh.write(emit_latex(self.tspec))
            except OSError as exc:
                return [f"error: cannot write {cmd.argument}: {exc}"]
            return [f"wrote {cmd.argument}"]
        return self._load(cmd.argument)

    def _load(self, path: str) -> list[str]:
        try:
            source = read_source(path)
            fragment = parse_source(source, path, self.spec.constructor_names())
        except InputError as exc:
            return [f"error: {exc}"]
        except NaslError as exc:
            return [d.render() for d in exc.diagnostics]
        before = self.spec
        merged = before.merge(fragment)
        out = self._accept(merged)
        if self.spec is before:
            return out
        if not fragment.evaluations:
            return out + ["no evaluations"]
        tspec = check_specification(replace(self.spec, evaluations=fragment.evaluations))
        for result in run_evaluations(tspec, self.max_fuel):
            out.append(format_result(result, self.show_tree, self.trace_depth))
        return out

    def loop(self, inp: TextIO, out: TextIO, interactive: bool = None) -> int:
        if interactive is None:
            interactive = inp.isatty()
        while not self.done:
            if interactive:
                out.write(self.prompt)
                out.flush()
            line = inp.readline()
            if not line:
                break
            for text in self.feed(line.rstrip("\n")):
                print(text, file=out)
        if self.buffer:
            # flush an unfinished item so its error is reported
            pending, self.buffer = "\n".join(self.buffer), []
            try:
                parse_repl_input(pending, self.spec)
            except NaslError as exc:
                for d in exc.diagnostics:
                    print(d.render(), file=out)
        return EXIT_OK
