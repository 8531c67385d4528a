"""Runtime values and the structural operations on them."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional, Union

from . import model as m
from .deep import deep
from .diagnostics import NO_SPAN, SourceSpan


class RuntimeFault(Exception):
    code = "RuntimeError"

    def __init__(self, message: str, span: SourceSpan = NO_SPAN):
        self.message = message
        self.span = span
        super().__init__(message)


class BottomEvaluated(RuntimeFault):
    code = "BottomEvaluated"


class FunctionComparison(RuntimeFault):
    code = "FunctionComparison"


class UnboundPatternVariable(RuntimeFault):
    code = "UnboundPatternVariable"


@dataclass(frozen=True)
class VInt:
    value: int


@dataclass(frozen=True)
class VString:
    value: str


@dataclass(frozen=True)
class VBool:
    value: bool


@dataclass(frozen=True)
class VSymbol:
    name: str


@dataclass(frozen=True)
class VPair:
    left: "Value"
    right: "Value"


@dataclass(frozen=True)
class VCtor:
    name: str
    payload: Optional["Value"] = None


@dataclass(frozen=True)
class VSyntax:
    shape: m.Shape
    children: tuple["Value", ...]

    def __post_init__(self):
        if sum(1 for i in self.shape if i is None) != len(self.children):
            raise ValueError(f"shape {m.render_shape(self.shape)} needs as many children as holes")


@dataclass(frozen=True, eq=False)
class VClosure:
    param: str
    param_type: m.TypeExpr
    body: m.Expr
    env: Any


@dataclass(frozen=True, eq=False)
class VUpdated:
    base: "Value"
    key: "Value"
    replacement: "Value"


Value = Union[VInt, VString, VBool, VSymbol, VPair, VCtor, VSyntax, VClosure, VUpdated]

BASIC_VALUES = (VInt, VString, VBool, VSymbol)


def nest_values(values: list[Value]) -> Optional[Value]:
    """Right-nested pairs for constructor payloads written as argument lists."""
    if not values:
        return None
    result = values[-1]
    for v in reversed(values[:-1]):
        result = VPair(v, result)
    return result


def value_equals(a: Value, b: Value) -> bool:
    if isinstance(a, (VClosure, VUpdated)) or isinstance(b, (VClosure, VUpdated)):
        raise FunctionComparison("functions cannot be compared for equality")
    if type(a) is not type(b):
        return False
    if isinstance(a, BASIC_VALUES):
        return a == b
    if isinstance(a, VPair):
        return value_equals(a.left, b.left) and value_equals(a.right, b.right)
    if isinstance(a, VCtor):
        if a.name != b.name or (a.payload is None) != (b.payload is None):
            return False
        return a.payload is None or value_equals(a.payload, b.payload)
    if isinstance(a, VSyntax):
        return a.shape == b.shape and all(value_equals(x, y) for x, y in zip(a.children, b.children))
    raise TypeError(f"not a value: {a!r}")


def instantiate(pat: m.Pattern, bindings: dict[str, Value]) -> Value:
    """The value a wildcard-free pattern denotes under `bindings`."""
    if isinstance(pat, m.PVar):
        if pat.name not in bindings:
            raise UnboundPatternVariable(f"pattern variable {pat.name} is unbound", pat.span)
        return bindings[pat.name]
    if isinstance(pat, m.PWildcard):
        raise ValueError("a wildcard does not denote a value")
    if isinstance(pat, m.PIntLit):
        return VInt(pat.value)
    if isinstance(pat, m.PStringLit):
        return VString(pat.value)
    if isinstance(pat, m.PBoolLit):
        return VBool(pat.value)
    if isinstance(pat, m.PSymbolLit):
        return VSymbol(pat.value)
    if isinstance(pat, m.PPair):
        return VPair(instantiate(pat.left, bindings), instantiate(pat.right, bindings))
    if isinstance(pat, m.PCtor):
        return VCtor(pat.name, nest_values([instantiate(a, bindings) for a in pat.args]))
    if isinstance(pat, m.PSyntax):
        return VSyntax(pat.shape, tuple(instantiate(a, bindings) for a in pat.args))
    raise TypeError(f"not a pattern: {pat!r}")


@deep
def render_value(v: Value) -> str:
    from .printer import print_expr, print_type

    if isinstance(v, VInt):
        return str(v.value)
    if isinstance(v, VString):
        return '"' + v.value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'
    if isinstance(v, VBool):
        return "true" if v.value else "false"
    if isinstance(v, VSymbol):
        return f"`{v.name}`"
    if isinstance(v, VPair):
        return f"({render_value(v.left)}, {render_value(v.right)})"
    if isinstance(v, VCtor):
        if v.payload is None:
            return v.name
        inner = render_value(v.payload)
        return f"{v.name}{inner}" if isinstance(v.payload, VPair) else f"{v.name}({inner})"
    if isinstance(v, VSyntax):
        parts, children = [], iter(v.children)
        for item in v.shape:
            parts.append(f"'{item}'" if item is not None else render_value(next(children)))
        return "{" + " ".join(parts) + "}"
    if isinstance(v, VClosure):
        return f"(\\{v.param} : {print_type(v.param_type)} . {print_expr(v.body)})"
    if isinstance(v, VUpdated):
        updates = []
        while isinstance(v, VUpdated):
            updates.append(f"[{render_value(v.key)} -> {render_value(v.replacement)}]")
            v = v.base
        return render_value(v) + "".join(reversed(updates))
    raise TypeError(f"not a value: {v!r}")
