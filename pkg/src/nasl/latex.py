"""LaTeX rendering of grammars and transition rules.

Each syntax definition becomes a BNF display and each rule an inference rule
in its own displaymath block. Transitions use \\Downarrow, subscripted with the
target system whenever it differs from the system the rule belongs to.
"""
from __future__ import annotations

import re

from . import model as m
from .analysis import TypedSpecification
from .deep import deep
from .printer import ADD, ATOM, COMPARE, LAMBDA, MUL, POSTFIX

PREAMBLE = (
    "\\documentclass{article}\n"
    "\\usepackage[utf8]{inputenc}\n"
    "\\usepackage[T1]{fontenc}\n"
    "\\usepackage{amsmath}\n"
    "\\usepackage{amssymb}\n"
    "\\begin{document}\n"
)
TRAILER = "\\end{document}\n"

_BASIC = {"Int": "\\mathbb{Z}", "Bool": "\\mathbb{B}", "String": "\\mathit{String}", "Symbol": "\\mathcal{X}^{*}"}
_OPS = {"+": "+", "-": "-", "*": "\\times", "==": "=", "!=": "\\neq", "<": "<", "<=": "\\leq"}
_LEVEL = {"+": ADD, "-": ADD, "*": MUL, **{op: COMPARE for op in m.COMPARE_OPS}}
_TEXT_ESCAPES = {
    "\\": "\\textbackslash{}", "{": "\\{", "}": "\\}", "$": "\\$", "&": "\\&", "#": "\\#",
    "^": "\\textasciicircum{}", "_": "\\_", "%": "\\%", "~": "\\textasciitilde{}",
}
_METAVAR = re.compile(r"([A-Za-z]+)(\d*)('*)")


def escape_text(s: str) -> str:
    return "".join(_TEXT_ESCAPES.get(c, c) for c in s)


def metavar(name: str) -> str:
    """`e1` -> `e_{1}`, `s''` -> `s''`, longer names in \\mathit."""
    match = _METAVAR.fullmatch(name)
    if match is None:
        body, digits, primes = name.rstrip("'"), "", "'" * (len(name) - len(name.rstrip("'")))
    else:
        body, digits, primes = match.groups()
    out = body if len(body) == 1 else f"\\mathit{{{escape_text(body)}}}"
    if digits:
        out += f"_{{{digits}}}"
    return out + primes


def terminal(text: str) -> str:
    return f"\\text{{\\texttt{{{escape_text(text)}}}}}"


def tex_type(t: m.TypeExpr) -> str:
    if isinstance(t, m.TBasic):
        return _BASIC[t.kind]
    if isinstance(t, m.TNamed):
        return metavar(t.name) if len(t.name) == 1 else f"\\mathit{{{escape_text(t.name)}}}"
    if isinstance(t, m.TProduct):
        left = tex_type(t.left)
        if isinstance(t.left, (m.TProduct, m.TArrow)):
            left = f"({left})"
        right = tex_type(t.right)
        if isinstance(t.right, m.TArrow):
            right = f"({right})"
        return f"{left} \\times {right}"
    left = tex_type(t.domain)
    if isinstance(t.domain, m.TArrow):
        left = f"({left})"
    return f"{left} \\rightarrow {tex_type(t.codomain)}"


def _syntax(shape, args, show) -> str:
    parts, it = [], iter(args)
    for item in shape:
        if item is not None:
            parts.append(terminal(item))
            continue
        arg = next(it)
        text = show(arg)
        # nested multi-item syntax needs grouping once the braces are gone
        if isinstance(arg, (m.SyntaxExpr, m.PSyntax)) and len(arg.shape) > 1:
            text = f"({text})"
        parts.append(text)
    return " \\; ".join(parts)


def _tuple(items, show) -> str:
    return "\\langle " + ", ".join(show(i) for i in items) + " \\rangle"


def _flatten_pair(e, pair_type):
    items = []
    while isinstance(e, pair_type):
        items.append(e.left)
        e = e.right
    items.append(e)
    return items


def tex_expr(e: m.Expr, level: int = LAMBDA) -> str:
    text, own = _expr(e)
    return f"({text})" if own < level else text


def _expr(e: m.Expr) -> tuple[str, int]:
    if isinstance(e, m.IntLit):
        return str(e.value), ATOM
    if isinstance(e, m.StringLit):
        return f"\\text{{\"{escape_text(e.value)}\"}}", ATOM
    if isinstance(e, m.BoolLit):
        return ("\\mathbf{true}" if e.value else "\\mathbf{false}"), ATOM
    if isinstance(e, m.SymbolLit):
        return f"\\textrm{{`{escape_text(e.value)}'}}", ATOM
    if isinstance(e, m.Var):
        return metavar(e.name), ATOM
    if isinstance(e, m.Bottom):
        return f"\\bot_{{{tex_type(e.type)}}}", ATOM
    if isinstance(e, m.Pair):
        return _tuple(_flatten_pair(e, m.Pair), tex_expr), ATOM
    if isinstance(e, m.CtorApply):
        name = f"\\mathsf{{{escape_text(e.name)}}}"
        if not e.args:
            return name, ATOM
        return f"{name}({', '.join(tex_expr(a) for a in e.args)})", POSTFIX
    if isinstance(e, m.SyntaxExpr):
        return _syntax(e.shape, e.args, lambda a: tex_expr(a, COMPARE)), COMPARE
    if isinstance(e, m.Lambda):
        return f"\\lambda {metavar(e.param)} : {tex_type(e.param_type)} .\\, {tex_expr(e.body)}", LAMBDA
    if isinstance(e, m.Apply):
        return f"{tex_expr(e.fn, POSTFIX)}({tex_expr(e.arg)})", POSTFIX
    if isinstance(e, m.Update):
        return f"{tex_expr(e.fn, POSTFIX)}[{tex_expr(e.key)} \\mapsto {tex_expr(e.value)}]", POSTFIX
    if isinstance(e, m.BinOp):
        level = _LEVEL[e.op]
        if level == COMPARE:
            left, right = tex_expr(e.left, ADD), tex_expr(e.right, ADD)
        else:
            left, right = tex_expr(e.left, level), tex_expr(e.right, level + 1)
        return f"{left} {_OPS[e.op]} {right}", level
    raise TypeError(f"not an expression: {e!r}")


def tex_pattern(p: m.Pattern) -> str:
    if isinstance(p, m.PVar):
        return metavar(p.name)
    if isinstance(p, m.PWildcard):
        return "\\_"
    if isinstance(p, m.PIntLit):
        return str(p.value)
    if isinstance(p, m.PStringLit):
        return f"\\text{{\"{escape_text(p.value)}\"}}"
    if isinstance(p, m.PBoolLit):
        return "\\mathbf{true}" if p.value else "\\mathbf{false}"
    if isinstance(p, m.PSymbolLit):
        return f"\\textrm{{`{escape_text(p.value)}'}}"
    if isinstance(p, m.PPair):
        return _tuple(_flatten_pair(p, m.PPair), tex_pattern)
    if isinstance(p, m.PCtor):
        name = f"\\mathsf{{{escape_text(p.name)}}}"
        return name if not p.args else f"{name}({', '.join(tex_pattern(a) for a in p.args)})"
    if isinstance(p, m.PSyntax):
        return _syntax(p.shape, p.args, tex_pattern)
    raise TypeError(f"not a pattern: {p!r}")


def _arrow(target: str, owner: str) -> str:
    if target == owner:
        return "\\Downarrow"
    return f"\\Downarrow_{{{metavar(target)}}}"


def tex_transition(antecedent: str, initial: str, final: str, arrow: str) -> str:
    ante = f"{antecedent} \\vdash " if antecedent else ""
    return f"{ante}{initial} {arrow} {final}"


def tex_rule(rule: m.Rule, system: str) -> str:
    above, beside = [], []
    for premise in rule.premises:
        if isinstance(premise, m.Transition):
            ante = tex_expr(premise.antecedent) if premise.antecedent is not None else ""
            above.append(tex_transition(ante, tex_expr(premise.initial), tex_pattern(premise.final),
                                        _arrow(premise.target, system)))
        elif isinstance(premise, m.SideCondition):
            beside.append(f"\\text{{if }} {tex_expr(premise.cond)}")
        else:
            beside.append(f"\\text{{where }} {tex_pattern(premise.pattern)} = {tex_expr(premise.rhs)}")
    ante = tex_pattern(rule.antecedent) if rule.antecedent is not None else ""
    conclusion = tex_transition(ante, tex_pattern(rule.initial), tex_expr(rule.final), "\\Downarrow")
    premises = " \\quad ".join(above)
    body = f"\\frac{{{premises}}}{{{conclusion}}}" if above else conclusion
    line = f"[\\textsc{{{escape_text(rule.label)}}}] \\quad {body}"
    for cond in beside:
        line += f" \\quad {cond}"
    return f"\\begin{{displaymath}}\n{line}\n\\end{{displaymath}}\n"


def tex_production(p: m.Production) -> str:
    parts = [terminal(i.text) if isinstance(i, m.Terminal) else tex_type(i.type) for i in p.items]
    return " \\; ".join(parts)


def tex_syntax(s: m.SyntaxDef) -> str:
    rows = []
    for i, prod in enumerate(s.productions):
        head = tex_type(m.TNamed(s.name)) if i == 0 else ""
        sep = "::=" if i == 0 else "\\mid"
        rows.append(f"{head} & {sep} & {tex_production(prod)}")
    return (
        "\\begin{displaymath}\n\\begin{array}{rcl}\n"
        + " \\\\\n".join(rows)
        + "\n\\end{array}\n\\end{displaymath}\n"
    )


@deep
def emit_latex(tspec: TypedSpecification, fragment: bool = False) -> str:
    """Render grammars, then each system's rules; `fragment` drops the preamble."""
    spec = tspec.spec
    blocks = []
    if spec.syntaxes:
        blocks.append("\\subsection*{Syntax}\n")
        blocks.extend(tex_syntax(s) for s in spec.syntaxes)
    for system in spec.systems:
        blocks.append(f"\\subsection*{{System ${metavar(system.name)}$}}\n")
        blocks.extend(tex_rule(rule, system.name) for rule in system.rules)
    body = "\n".join(blocks)
    if fragment:
        return body
    return PREAMBLE + ("\n" + body + "\n" if body else "") + TRAILER
