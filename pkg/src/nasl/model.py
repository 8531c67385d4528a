"""Abstract syntax of specifications: domains, expressions, patterns, systems.

Every node is immutable. Spans are carried as keyword-only fields that are
excluded from equality, so two trees parsed from differently laid out text
compare equal when they have the same structure.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .diagnostics import NO_SPAN, SourceSpan

BASIC_KINDS = ("Int", "String", "Bool", "Symbol")


def _span():
    return field(default=NO_SPAN, compare=False, repr=False, kw_only=True)


# -- domains ---------------------------------------------------------------


@dataclass(frozen=True)
class TBasic:
    kind: str
    span: SourceSpan = _span()

    def __str__(self):
        return self.kind


@dataclass(frozen=True)
class TProduct:
    left: "TypeExpr"
    right: "TypeExpr"
    span: SourceSpan = _span()

    def __str__(self):
        left = f"({self.left})" if isinstance(self.left, (TProduct, TArrow)) else str(self.left)
        right = f"({self.right})" if isinstance(self.right, TArrow) else str(self.right)
        return f"{left} * {right}"


@dataclass(frozen=True)
class TArrow:
    domain: "TypeExpr"
    codomain: "TypeExpr"
    span: SourceSpan = _span()

    def __str__(self):
        dom = f"({self.domain})" if isinstance(self.domain, TArrow) else str(self.domain)
        return f"{dom} -> {self.codomain}"


@dataclass(frozen=True)
class TNamed:
    name: str
    span: SourceSpan = _span()

    def __str__(self):
        return self.name


TypeExpr = Union[TBasic, TProduct, TArrow, TNamed]

INT = TBasic("Int")
STRING = TBasic("String")
BOOL = TBasic("Bool")
SYMBOL = TBasic("Symbol")


def product_of(types: list[TypeExpr]) -> TypeExpr:
    """Right-nested product of one or more types."""
    result = types[-1]
    for t in reversed(types[:-1]):
        result = TProduct(t, result)
    return result


def flatten_product(t: TypeExpr) -> list[TypeExpr]:
    parts = []
    while isinstance(t, TProduct):
        parts.append(t.left)
        t = t.right
    parts.append(t)
    return parts


@dataclass(frozen=True)
class Constructor:
    name: str
    payload: Optional[TypeExpr] = None
    span: SourceSpan = _span()


@dataclass(frozen=True)
class DomainDef:
    name: str
    body: Union[TypeExpr, tuple[Constructor, ...]]
    span: SourceSpan = _span()

    @property
    def is_union(self) -> bool:
        return isinstance(self.body, tuple)


@dataclass(frozen=True)
class Terminal:
    text: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Hole:
    type: TypeExpr
    span: SourceSpan = _span()


Shape = tuple  # tuple[Optional[str], ...]; None marks a hole


def render_shape(shape: Shape) -> str:
    return " ".join("_" if item is None else f"'{item}'" for item in shape)


@dataclass(frozen=True)
class Production:
    items: tuple[Union[Terminal, Hole], ...]
    span: SourceSpan = _span()

    @property
    def shape(self) -> Shape:
        return tuple(i.text if isinstance(i, Terminal) else None for i in self.items)

    @property
    def holes(self) -> tuple[TypeExpr, ...]:
        return tuple(i.type for i in self.items if isinstance(i, Hole))


@dataclass(frozen=True)
class SyntaxDef:
    name: str
    productions: tuple[Production, ...]
    span: SourceSpan = _span()


# -- expressions -------------------------------------------------------------


@dataclass(frozen=True)
class IntLit:
    value: int
    span: SourceSpan = _span()


@dataclass(frozen=True)
class StringLit:
    value: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    span: SourceSpan = _span()


@dataclass(frozen=True)
class SymbolLit:
    value: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Var:
    name: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Lambda:
    param: str
    param_type: TypeExpr
    body: "Expr"
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Apply:
    fn: "Expr"
    arg: "Expr"
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Bottom:
    type: TypeExpr
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Update:
    fn: "Expr"
    key: "Expr"
    value: "Expr"
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Pair:
    left: "Expr"
    right: "Expr"
    span: SourceSpan = _span()


ARITH_OPS = ("+", "-", "*")
COMPARE_OPS = ("==", "!=", "<", "<=")


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    span: SourceSpan = _span()


@dataclass(frozen=True)
class CtorApply:
    name: str
    args: tuple["Expr", ...]
    span: SourceSpan = _span()


@dataclass(frozen=True)
class SyntaxExpr:
    shape: Shape
    args: tuple["Expr", ...]
    span: SourceSpan = _span()


Expr = Union[
    IntLit, StringLit, BoolLit, SymbolLit, Var, Lambda, Apply, Bottom, Update, Pair, BinOp, CtorApply, SyntaxExpr
]


# -- patterns ----------------------------------------------------------------


@dataclass(frozen=True)
class PVar:
    name: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class PWildcard:
    span: SourceSpan = _span()


@dataclass(frozen=True)
class PIntLit:
    value: int
    span: SourceSpan = _span()


@dataclass(frozen=True)
class PStringLit:
    value: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class PBoolLit:
    value: bool
    span: SourceSpan = _span()


@dataclass(frozen=True)
class PSymbolLit:
    value: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class PPair:
    left: "Pattern"
    right: "Pattern"
    span: SourceSpan = _span()


@dataclass(frozen=True)
class PCtor:
    name: str
    args: tuple["Pattern", ...]
    span: SourceSpan = _span()


@dataclass(frozen=True)
class PSyntax:
    shape: Shape
    args: tuple["Pattern", ...]
    span: SourceSpan = _span()


Pattern = Union[PVar, PWildcard, PIntLit, PStringLit, PBoolLit, PSymbolLit, PPair, PCtor, PSyntax]


def pattern_vars(p: Pattern) -> list[str]:
    """Variables of a pattern in left-to-right order, repeats included."""
    if isinstance(p, PVar):
        return [p.name]
    if isinstance(p, PPair):
        return pattern_vars(p.left) + pattern_vars(p.right)
    if isinstance(p, (PCtor, PSyntax)):
        return [v for a in p.args for v in pattern_vars(a)]
    return []


# -- transition systems ------------------------------------------------------


@dataclass(frozen=True)
class Transition:
    target: str
    antecedent: Optional[Expr]
    initial: Expr
    final: Pattern
    explicit: bool = False
    span: SourceSpan = _span()


@dataclass(frozen=True)
class SideCondition:
    cond: Expr
    span: SourceSpan = _span()


@dataclass(frozen=True)
class LocalDef:
    pattern: Pattern
    rhs: Expr
    span: SourceSpan = _span()


Premise = Union[Transition, SideCondition, LocalDef]


@dataclass(frozen=True)
class Rule:
    label: str
    antecedent: Optional[Pattern]
    initial: Pattern
    final: Expr
    premises: tuple[Premise, ...] = ()
    span: SourceSpan = _span()


@dataclass(frozen=True)
class TransitionSystem:
    name: str
    antecedent_type: Optional[TypeExpr]
    initial_type: TypeExpr
    final_type: TypeExpr
    rules: tuple[Rule, ...] = ()
    span: SourceSpan = _span()


@dataclass(frozen=True)
class LetDef:
    name: str
    expr: Expr
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Evaluation:
    antecedent: Optional[Expr]
    initial: Expr
    system: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Specification:
    domains: tuple[DomainDef, ...] = ()
    syntaxes: tuple[SyntaxDef, ...] = ()
    lets: tuple[LetDef, ...] = ()
    systems: tuple[TransitionSystem, ...] = ()
    evaluations: tuple[Evaluation, ...] = ()
    warnings: tuple = field(default=(), compare=False, repr=False)

    def constructor_names(self) -> set[str]:
        return {c.name for d in self.domains if d.is_union for c in d.body}

    def merge(self, other: "Specification") -> "Specification":
        return Specification(
            self.domains + other.domains,
            self.syntaxes + other.syntaxes,
            self.lets + other.lets,
            self.systems + other.systems,
            self.evaluations + other.evaluations,
            self.warnings + other.warnings,
        )

    def system(self, name: str) -> Optional[TransitionSystem]:
        for s in self.systems:
            if s.name == name:
                return s
        return None
