"""Plain-text printer for specifications; its output parses back to an equal tree."""
from __future__ import annotations

from . import model as m
from .deep import deep

LAMBDA, COMPARE, ADD, MUL, POSTFIX, ATOM = range(6)
_BINOP_LEVEL = {"+": ADD, "-": ADD, "*": MUL, **{op: COMPARE for op in m.COMPARE_OPS}}


def print_type(t: m.TypeExpr) -> str:
    return str(t)


def _type_atom(t: m.TypeExpr) -> str:
    return f"({t})" if isinstance(t, (m.TProduct, m.TArrow)) else str(t)


def _string(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t") + '"'


def _syntax(shape, args, show) -> str:
    parts, it = [], iter(args)
    for item in shape:
        parts.append(f"'{item}'" if item is not None else show(next(it)))
    return "{" + " ".join(parts) + "}"


def print_expr(e: m.Expr, level: int = LAMBDA) -> str:
    text, own = _expr(e)
    return f"({text})" if own < level else text


def _expr(e: m.Expr) -> tuple[str, int]:
    if isinstance(e, m.IntLit):
        return str(e.value), ATOM
    if isinstance(e, m.StringLit):
        return _string(e.value), ATOM
    if isinstance(e, m.BoolLit):
        return ("true" if e.value else "false"), ATOM
    if isinstance(e, m.SymbolLit):
        return f"`{e.value}`", ATOM
    if isinstance(e, m.Var):
        return e.name, ATOM
    if isinstance(e, m.Bottom):
        return f"-|{e.type}|", ATOM
    if isinstance(e, m.Pair):
        return f"({print_expr(e.left)}, {print_expr(e.right)})", ATOM
    if isinstance(e, m.CtorApply):
        if not e.args:
            return e.name, ATOM
        return f"{e.name}({', '.join(print_expr(a) for a in e.args)})", POSTFIX
    if isinstance(e, m.SyntaxExpr):
        return _syntax(e.shape, e.args, lambda a: print_expr(a, COMPARE)), ATOM
    if isinstance(e, m.Lambda):
        return f"\\{e.param} : {e.param_type} . {print_expr(e.body)}", LAMBDA
    if isinstance(e, m.Apply):
        return f"{print_expr(e.fn, POSTFIX)}({print_expr(e.arg)})", POSTFIX
    if isinstance(e, m.Update):
        return f"{print_expr(e.fn, POSTFIX)}[{print_expr(e.key)} -> {print_expr(e.value)}]", POSTFIX
    if isinstance(e, m.BinOp):
        level = _BINOP_LEVEL[e.op]
        if level == COMPARE:
            left, right = print_expr(e.left, ADD), print_expr(e.right, ADD)
        else:
            left, right = print_expr(e.left, level), print_expr(e.right, level + 1)
        return f"{left} {e.op} {right}", level
    raise TypeError(f"not an expression: {e!r}")


def print_pattern(p: m.Pattern) -> str:
    if isinstance(p, m.PVar):
        return p.name
    if isinstance(p, m.PWildcard):
        return "_"
    if isinstance(p, m.PIntLit):
        return str(p.value)
    if isinstance(p, m.PStringLit):
        return _string(p.value)
    if isinstance(p, m.PBoolLit):
        return "true" if p.value else "false"
    if isinstance(p, m.PSymbolLit):
        return f"`{p.value}`"
    if isinstance(p, m.PPair):
        return f"({print_pattern(p.left)}, {print_pattern(p.right)})"
    if isinstance(p, m.PCtor):
        return p.name if not p.args else f"{p.name}({', '.join(print_pattern(a) for a in p.args)})"
    if isinstance(p, m.PSyntax):
        return _syntax(p.shape, p.args, print_pattern)
    raise TypeError(f"not a pattern: {p!r}")


def print_premise(p: m.Premise) -> str:
    if isinstance(p, m.SideCondition):
        return f"if {print_expr(p.cond)}"
    if isinstance(p, m.LocalDef):
        return f"let {print_pattern(p.pattern)} = {print_expr(p.rhs)}"
    ante = f"{print_expr(p.antecedent)} |- " if p.antecedent is not None else ""
    arrow = f"={p.target}=>" if p.explicit else "==>"
    return f"{ante}{print_expr(p.initial)} {arrow} {print_pattern(p.final)}"


def print_rule(r: m.Rule) -> str:
    ante = f"{print_pattern(r.antecedent)} |- " if r.antecedent is not None else ""
    head = f"[[ {r.label} ]]: {ante}{print_pattern(r.initial)} ==> {print_expr(r.final)}"
    if not r.premises:
        return head + ";"
    body = ",\n".join("    " + print_premise(p) for p in r.premises)
    return f"{head} \\\\\n{body};"


def print_system(s: m.TransitionSystem) -> str:
    ante = f"{s.antecedent_type} |- " if s.antecedent_type is not None else ""
    lines = [f"system {s.name} : {ante}{s.initial_type} ==> {s.final_type} ="]
    lines += ["  " + print_rule(r).replace("\n", "\n  ") for r in s.rules]
    lines.append("end")
    return "\n".join(lines)


def print_domain(d: m.DomainDef) -> str:
    if d.is_union:
        ctors = " + ".join(c.name if c.payload is None else f"{c.name} : {c.payload}" for c in d.body)
        return f"domain {d.name} = {{ {ctors} }};"
    return f"domain {d.name} = {d.body};"


def print_production(p: m.Production) -> str:
    return " ".join(f"'{i.text}'" if isinstance(i, m.Terminal) else _type_atom(i.type) for i in p.items)


def print_syntax(s: m.SyntaxDef) -> str:
    prods = "\n  | ".join(print_production(p) for p in s.productions)
    return f"syntax {s.name} = {prods};"


def print_evaluation(ev: m.Evaluation) -> str:
    ante = f"{print_expr(ev.antecedent)} |- " if ev.antecedent is not None else ""
    return f"evaluate {ante}{print_expr(ev.initial)} in {ev.system}"


@deep
def print_specification(spec: m.Specification) -> str:
    blocks = [print_domain(d) for d in spec.domains]
    blocks += [print_syntax(s) for s in spec.syntaxes]
    blocks += [f"let {l.name} = {print_expr(l.expr)};" for l in spec.lets]
    blocks += [print_system(s) for s in spec.systems]
    blocks += [print_evaluation(ev) for ev in spec.evaluations]
    return "\n\n".join(blocks) + ("\n" if blocks else "")
