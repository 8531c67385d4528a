"""Derivation trees and rule-application traces, with plain-text rendering."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .deep import deep
from .diagnostics import NO_SPAN, SourceSpan
from .values import Value, render_value

PATTERN_MISMATCH = "PatternMismatch"
PREMISE_FAILED = "PremiseFailed"
SIDE_CONDITION_FALSE = "SideConditionFalse"
SUCCEEDED = "Succeeded"
ABORTED = "Aborted"


@dataclass(frozen=True)
class TraceEntry:
    system: str
    rule_label: str
    outcome: str
    index: Optional[int] = None  # 0-based premise index for premise outcomes
    nested: tuple["TraceEntry", ...] = ()
    reason: str = ""
    span: SourceSpan = NO_SPAN

    def describe(self) -> str:
        head = f"[{self.rule_label}]"
        if self.outcome == PATTERN_MISMATCH:
            return f"{head} conclusion pattern does not match"
        if self.outcome == SUCCEEDED:
            return f"{head} succeeded"
        if self.outcome == SIDE_CONDITION_FALSE:
            return f"{head} side condition (premise {self.index + 1}) is false"
        where = f" premise {self.index + 1}" if self.index is not None else ""
        verb = "failed" if self.outcome == PREMISE_FAILED else "aborted"
        return f"{head}{where} {verb}" + (f": {self.reason}" if self.reason else "")


@dataclass(frozen=True)
class SideConditionHeld:
    cond: str


@dataclass(frozen=True)
class LocalBound:
    pattern: str
    value: Value


@dataclass(frozen=True)
class DerivationTree:
    system: str
    rule_label: str
    antecedent: Optional[Value]
    initial: Value
    final: Value
    children: tuple[Union["DerivationTree", SideConditionHeld, LocalBound], ...] = ()
    trace: tuple[TraceEntry, ...] = ()

    @property
    def subtrees(self) -> list["DerivationTree"]:
        return [c for c in self.children if isinstance(c, DerivationTree)]

    @property
    def is_axiom(self) -> bool:
        return not self.subtrees

    def judgement(self) -> str:
        ante = f"{render_value(self.antecedent)} |- " if self.antecedent is not None else ""
        return f"{ante}{render_value(self.initial)} ==> {render_value(self.final)}"


@deep
def render_tree(tree: DerivationTree, indent: int = 0, attempts: bool = True) -> str:
    """One line per node. With `attempts`, rules abandoned after their pattern
    matched are listed under the node as `abandoned` lines."""
    lines: list[str] = []
    _render_tree(tree, indent, lines, attempts)
    return "\n".join(lines)


def _render_tree(tree: DerivationTree, indent: int, lines: list[str], attempts: bool):
    pad = "  " * indent
    lines.append(f"{pad}[{tree.rule_label}] {tree.judgement()}")
    if attempts:
        for entry in tree.trace:
            if entry.outcome not in (PATTERN_MISMATCH, SUCCEEDED):
                lines.append(f"{pad}  abandoned {entry.describe()}")
    for child in tree.children:
        if isinstance(child, DerivationTree):
            _render_tree(child, indent + 1, lines, attempts)
        elif isinstance(child, SideConditionHeld):
            lines.append(f"{pad}  if {child.cond}")
        else:
            lines.append(f"{pad}  let {child.pattern} = {render_value(child.value)}")


@deep
def render_trace(entries: tuple[TraceEntry, ...], max_depth: int = 5, indent: int = 0) -> str:
    lines: list[str] = []
    _render_trace(entries, max_depth, indent, lines)
    return "\n".join(lines)


def _render_trace(entries, depth_left, indent, lines):
    pad = "  " * indent
    for entry in entries:
        lines.append(pad + entry.describe())
        if entry.nested:
            if depth_left <= 1:
                lines.append(pad + "  ... (trace truncated)")
            else:
                _render_trace(entry.nested, depth_left - 1, indent + 1, lines)
