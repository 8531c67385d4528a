"""Domain analysis and type analysis.

Types are kept as written so that messages mention the user's domain names;
`DomainTable.norm` expands aliases whenever two types are compared.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import model as m
from .deep import deep
from .diagnostics import Diagnostic, SourceSpan, error, warning
from .printer import print_pattern


@dataclass(frozen=True)
class CtorInfo:
    name: str
    owner: str
    payload: Optional[m.TypeExpr]
    span: SourceSpan


@dataclass(frozen=True)
class ShapeInfo:
    owner: str
    production: m.Production

    @property
    def holes(self) -> tuple[m.TypeExpr, ...]:
        return self.production.holes


@dataclass
class DomainTable:
    definitions: dict[str, object] = field(default_factory=dict)
    aliases: dict[str, m.TypeExpr] = field(default_factory=dict)
    constructors: dict[str, CtorInfo] = field(default_factory=dict)
    shapes: dict[tuple, ShapeInfo] = field(default_factory=dict)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def is_nominal(self, name: str) -> bool:
        d = self.definitions.get(name)
        return isinstance(d, m.SyntaxDef) or (isinstance(d, m.DomainDef) and d.is_union)

    def whnf(self, t: m.TypeExpr) -> m.TypeExpr:
        """Expand aliases at the root only."""
        while isinstance(t, m.TNamed) and t.name in self.aliases:
            t = self.aliases[t.name]
        return t

    def norm(self, t: m.TypeExpr) -> m.TypeExpr:
        t = self.whnf(t)
        if isinstance(t, m.TProduct):
            return m.TProduct(self.norm(t.left), self.norm(t.right))
        if isinstance(t, m.TArrow):
            return m.TArrow(self.norm(t.domain), self.norm(t.codomain))
        return t

    def same(self, a: Optional[m.TypeExpr], b: Optional[m.TypeExpr]) -> bool:
        if a is None or b is None:
            return True  # an earlier error already explains this position
        return self.norm(a) == self.norm(b)

    def components(self, t: m.TypeExpr) -> list[m.TypeExpr]:
        parts = []
        t = self.whnf(t)
        while isinstance(t, m.TProduct):
            parts.append(t.left)
            t = self.whnf(t.right)
        parts.append(t)
        return parts

    def contains_function(self, t: m.TypeExpr, seen=None) -> bool:
        seen = set() if seen is None else seen
        t = self.whnf(t)
        if isinstance(t, m.TArrow):
            return True
        if isinstance(t, m.TProduct):
            return self.contains_function(t.left, seen) or self.contains_function(t.right, seen)
        if isinstance(t, m.TNamed) and t.name not in seen:
            seen.add(t.name)
            d = self.definitions.get(t.name)
            if isinstance(d, m.SyntaxDef):
                return any(self.contains_function(h, seen) for p in d.productions for h in p.holes)
            if isinstance(d, m.DomainDef) and d.is_union:
                return any(self.contains_function(c.payload, seen) for c in d.body if c.payload is not None)
        return False

    def free_names(self, t: m.TypeExpr) -> list[m.TNamed]:
        if isinstance(t, m.TNamed):
            return [] if t.name in self.definitions else [t]
        if isinstance(t, m.TProduct):
            return self.free_names(t.left) + self.free_names(t.right)
        if isinstance(t, m.TArrow):
            return self.free_names(t.domain) + self.free_names(t.codomain)
        return []


def _free_domain(name: m.TNamed) -> Diagnostic:
    return error("domain", "FreeDomainVariable", f"domain {name.name} is not defined", name.span)


def check_domains(spec: m.Specification) -> DomainTable:
    table = DomainTable()
    diags = table.diagnostics
    for d in spec.domains + spec.syntaxes:
        if d.name in table.definitions:
            prev = table.definitions[d.name]
            diags.append(error("domain", "DuplicateDefinition", f"duplicate definition of domain {d.name}",
                               d.span, [("previously defined here", prev.span)]))
            continue
        table.definitions[d.name] = d

    for d in table.definitions.values():
        if isinstance(d, m.DomainDef) and d.is_union:
            for c in d.body:
                if c.name in table.constructors:
                    prev = table.constructors[c.name]
                    diags.append(error("domain", "DuplicateConstructor", f"duplicate constructor {c.name}",
                                       c.span, [("previously defined here", prev.span)]))
                    continue
                table.constructors[c.name] = CtorInfo(c.name, d.name, c.payload, c.span)
                if c.payload is not None:
                    diags.extend(_free_domain(n) for n in table.free_names(c.payload))
        elif isinstance(d, m.SyntaxDef):
            for p in d.productions:
                if p.shape in table.shapes:
                    prev = table.shapes[p.shape]
                    if all(i is None for i in p.shape):
                        diags.append(error(
                            "domain", "AmbiguousBareProduction",
                            f"productions without symbols must differ in their number of domains; "
                            f"{d.name} and {prev.owner} both have one with {len(p.shape)}",
                            p.span, [("the other production is here", prev.production.span)]))
                    else:
                        diags.append(error(
                            "domain", "DuplicateConstructor",
                            f"syntax constructor {m.render_shape(p.shape)} is defined more than once",
                            p.span, [("previously defined here", prev.production.span)]))
                    continue
                table.shapes[p.shape] = ShapeInfo(d.name, p)
                for h in p.holes:
                    diags.extend(_free_domain(n) for n in table.free_names(h))

    aliases = {d.name: d for d in table.definitions.values() if isinstance(d, m.DomainDef) and not d.is_union}
    for d in aliases.values():
        diags.extend(_free_domain(n) for n in table.free_names(d.body))
    cyclic = _alias_cycles(aliases, diags)
    for name, d in aliases.items():
        if name not in cyclic:
            table.aliases[name] = d.body
    return table


def _alias_refs(t: m.TypeExpr) -> list[str]:
    if isinstance(t, m.TNamed):
        return [t.name]
    if isinstance(t, m.TProduct):
        return _alias_refs(t.left) + _alias_refs(t.right)
    if isinstance(t, m.TArrow):
        return _alias_refs(t.domain) + _alias_refs(t.codomain)
    return []


def _alias_cycles(aliases: dict[str, m.DomainDef], diags: list[Diagnostic]) -> set[str]:
    """Depth-first search over alias-to-alias references; reports each cycle once."""
    state: dict[str, int] = {}  # 1 = on stack, 2 = done
    cyclic: set[str] = set()

    def visit(name: str, path: list[str]):
        state[name] = 1
        path.append(name)
        for ref in _alias_refs(aliases[name].body):
            if ref not in aliases:
                continue
            if state.get(ref) == 1:
                cycle = path[path.index(ref):] + [ref]
                cyclic.update(cycle)
                diags.append(error("domain", "RecursiveAlias",
                                   f"domain alias {ref} is defined in terms of itself ({' -> '.join(cycle)}); "
                                   "use a union domain for inductive definitions", aliases[ref].span))
            elif ref not in state:
                visit(ref, path)
            if ref in cyclic:
                cyclic.add(name)
        path.pop()
        state[name] = 2

    for name in aliases:
        if name not in state:
            visit(name, [])
    return cyclic


# -- type analysis ---------------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    antecedent: Optional[m.TypeExpr]
    initial: m.TypeExpr
    final: m.TypeExpr

    def render(self) -> str:
        ante = f"{self.antecedent} |- " if self.antecedent is not None else ""
        return f"{ante}{self.initial} ==> {self.final}"


@dataclass
class TypeContext:
    table: DomainTable
    globals: dict[str, Optional[m.TypeExpr]] = field(default_factory=dict)
    systems: dict[str, Signature] = field(default_factory=dict)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def report(self, code: str, message: str, span: SourceSpan, notes=()):
        self.diagnostics.append(error("type", code, message, span, notes))

    def check_type(self, t: m.TypeExpr) -> bool:
        free = self.table.free_names(t)
        self.diagnostics.extend(_free_domain(n) for n in free)
        return not free

    def expect(self, expected, found, span, what="expression") -> bool:
        if self.table.same(expected, found):
            return True
        self.report("TypeMismatch", f"{what} has type {found}, but {expected} was expected", span)
        return False


def infer_expr_type(ctx: TypeContext, e: m.Expr, scope: Optional[dict] = None) -> Optional[m.TypeExpr]:
    """Synthesise the type of `e`; returns None after reporting an error."""
    scope = ctx.globals if scope is None else scope
    table = ctx.table
    if isinstance(e, m.IntLit):
        return m.INT
    if isinstance(e, m.StringLit):
        return m.STRING
    if isinstance(e, m.BoolLit):
        return m.BOOL
    if isinstance(e, m.SymbolLit):
        return m.SYMBOL
    if isinstance(e, m.Var):
        if e.name not in scope:
            ctx.report("UnknownVariable", f"unknown variable {e.name}", e.span)
            return None
        return scope[e.name]
    if isinstance(e, m.Lambda):
        if not ctx.check_type(e.param_type):
            return None
        body = infer_expr_type(ctx, e.body, {**scope, e.param: e.param_type})
        return m.TArrow(e.param_type, body) if body is not None else None
    if isinstance(e, m.Bottom):
        return e.type if ctx.check_type(e.type) else None
    if isinstance(e, m.Apply):
        fn = infer_expr_type(ctx, e.fn, scope)
        arg = infer_expr_type(ctx, e.arg, scope)
        if fn is None:
            return None
        arrow = table.whnf(fn)
        if not isinstance(arrow, m.TArrow):
            ctx.report("NotAFunction", f"cannot apply a value of type {fn}", e.fn.span)
            return None
        ctx.expect(arrow.domain, arg, e.arg.span, "argument")
        return arrow.codomain
    if isinstance(e, m.Update):
        fn = infer_expr_type(ctx, e.fn, scope)
        key = infer_expr_type(ctx, e.key, scope)
        value = infer_expr_type(ctx, e.value, scope)
        if fn is None:
            return None
        arrow = table.whnf(fn)
        if not isinstance(arrow, m.TArrow):
            ctx.report("NotAFunction", f"cannot update a value of type {fn}", e.fn.span)
            return None
        if not isinstance(table.whnf(arrow.domain), m.TBasic):
            ctx.report("UpdateOnNonBasicParameter",
                       f"only functions whose parameter is a basic domain can be updated; "
                       f"this one takes {arrow.domain}", e.span)
            return fn
        ctx.expect(arrow.domain, key, e.key.span, "update key")
        ctx.expect(arrow.codomain, value, e.value.span, "update value")
        return fn
    if isinstance(e, m.Pair):
        left = infer_expr_type(ctx, e.left, scope)
        right = infer_expr_type(ctx, e.right, scope)
        return m.TProduct(left, right) if left is not None and right is not None else None
    if isinstance(e, m.BinOp):
        return _binop(ctx, e, scope)
    if isinstance(e, m.CtorApply):
        return _ctor_apply(ctx, e, scope)
    if isinstance(e, m.SyntaxExpr):
        info = resolve_syntax_shape(ctx, e.shape, e.span)
        args = [infer_expr_type(ctx, a, scope) for a in e.args]
        if info is None:
            return None
        for arg, hole, node in zip(args, info.holes, e.args):
            ctx.expect(hole, arg, node.span, "syntax hole")
        return m.TNamed(info.owner)
    raise TypeError(f"not an expression: {e!r}")


def _binop(ctx: TypeContext, e: m.BinOp, scope) -> Optional[m.TypeExpr]:
    left = infer_expr_type(ctx, e.left, scope)
    right = infer_expr_type(ctx, e.right, scope)
    if e.op in m.ARITH_OPS:
        ctx.expect(m.INT, left, e.left.span, f"left operand of {e.op}")
        ctx.expect(m.INT, right, e.right.span, f"right operand of {e.op}")
        return m.INT
    if left is not None and not isinstance(ctx.table.whnf(left), m.TBasic):
        ctx.report("TypeMismatch", f"{e.op} compares basic values only; found {left}", e.left.span)
    elif left is not None:
        ctx.expect(left, right, e.right.span, f"right operand of {e.op}")
    return m.BOOL


def _ctor_apply(ctx: TypeContext, e: m.CtorApply, scope) -> Optional[m.TypeExpr]:
    args = [infer_expr_type(ctx, a, scope) for a in e.args]
    info = ctx.table.constructors.get(e.name)
    if info is None:
        ctx.report("UnknownConstructor", f"unknown constructor {e.name}", e.span)
        return None
    if info.payload is None:
        if e.args:
            ctx.report("TypeMismatch", f"constructor {e.name} takes no arguments", e.span)
    elif not e.args:
        ctx.report("TypeMismatch", f"constructor {e.name} needs an argument of type {info.payload}", e.span)
    elif None not in args:
        ctx.expect(info.payload, m.product_of(args), e.span, f"argument of {e.name}")
    return m.TNamed(info.owner)


def resolve_syntax_shape(ctx: TypeContext, shape: m.Shape, span: SourceSpan) -> Optional[ShapeInfo]:
    info = ctx.table.shapes.get(tuple(shape))
    if info is None:
        ctx.report("NoSuchProduction", f"no syntax production has the shape {m.render_shape(shape)}", span)
    return info


def check_pattern(ctx: TypeContext, p: m.Pattern, expected: Optional[m.TypeExpr], bound: dict,
                  seen: Optional[set] = None) -> dict:
    """Check `p` against `expected`, adding new variables to `bound` (the rule scope).

    A variable already in `bound` is an equality constraint rather than a binding.
    """
    seen = set() if seen is None else seen
    table = ctx.table
    if isinstance(p, m.PVar):
        if p.name in seen:
            ctx.report("NonLinearPattern", f"variable {p.name} occurs more than once in this pattern", p.span)
        elif p.name in bound:
            if ctx.expect(bound[p.name], expected, p.span, f"{p.name}") and expected is not None:
                if table.contains_function(expected):
                    ctx.report("FunctionEquality",
                               f"{p.name} is already bound and values of type {expected} cannot be compared",
                               p.span)
        else:
            bound[p.name] = expected
        seen.add(p.name)
        return bound
    if isinstance(p, m.PWildcard):
        return bound
    literal = {m.PIntLit: m.INT, m.PStringLit: m.STRING, m.PBoolLit: m.BOOL, m.PSymbolLit: m.SYMBOL}
    if type(p) in literal:
        ctx.expect(expected, literal[type(p)], p.span, "constant pattern")
        return bound
    if isinstance(p, m.PPair):
        prod = table.whnf(expected) if expected is not None else None
        if prod is not None and not isinstance(prod, m.TProduct):
            ctx.report("TypeMismatch", f"pair pattern cannot match a value of type {expected}", p.span)
            prod = None
        check_pattern(ctx, p.left, prod.left if prod else None, bound, seen)
        check_pattern(ctx, p.right, prod.right if prod else None, bound, seen)
        return bound
    if isinstance(p, m.PCtor):
        info = table.constructors.get(p.name)
        if info is None:
            ctx.report("UnknownConstructor", f"unknown constructor {p.name}", p.span)
            slots = [None] * len(p.args)
        else:
            ctx.expect(expected, m.TNamed(info.owner), p.span, f"constructor {p.name}")
            slots = _payload_slots(ctx, info, p)
        for arg, slot in zip(p.args, slots):
            check_pattern(ctx, arg, slot, bound, seen)
        return bound
    if isinstance(p, m.PSyntax):
        info = resolve_syntax_shape(ctx, p.shape, p.span)
        holes = info.holes if info else (None,) * len(p.args)
        if info is not None:
            ctx.expect(expected, m.TNamed(info.owner), p.span, "syntax pattern")
        for arg, hole in zip(p.args, holes):
            check_pattern(ctx, arg, hole, bound, seen)
        return bound
    raise TypeError(f"not a pattern: {p!r}")


def _payload_slots(ctx: TypeContext, info: CtorInfo, p: m.PCtor) -> list:
    n = len(p.args)
    if info.payload is None or n == 0:
        if info.payload is not None or n:
            ctx.report("PatternArityMismatch",
                       f"constructor {p.name} takes {'no' if info.payload is None else 'an'} argument", p.span)
        return [None] * n
    slots, rest = [], info.payload
    for _ in range(n - 1):
        prod = ctx.table.whnf(rest)
        if not isinstance(prod, m.TProduct):
            ctx.report("PatternArityMismatch",
                       f"constructor {p.name} has payload {info.payload}, which has fewer than {n} components",
                       p.span)
            return [None] * n
        slots.append(prod.left)
        rest = prod.right
    return slots + [rest]


def _check_antecedent(ctx: TypeContext, sig: Signature, target: str, expr, found, span):
    if sig.antecedent is None and expr is not None:
        ctx.report("AntecedentArityMismatch",
                   f"system {target} ({sig.render()}) has no antecedent, but one is supplied", span)
    elif sig.antecedent is not None and expr is None:
        ctx.report("AntecedentArityMismatch",
                   f"system {target} ({sig.render()}) needs an antecedent of type {sig.antecedent}", span)
    elif expr is not None and found is not None and not ctx.table.same(sig.antecedent, found):
        want, got = ctx.table.components(sig.antecedent), ctx.table.components(found)
        if len(want) != len(got):
            ctx.report("AntecedentArityMismatch",
                       f"system {target} expects an antecedent with {len(want)} components ({sig.antecedent}), "
                       f"but {len(got)} {'was' if len(got) == 1 else 'were'} supplied ({found})", expr.span)
        else:
            ctx.expect(sig.antecedent, found, expr.span, "antecedent")


def check_rule(ctx: TypeContext, sys: m.TransitionSystem, rule: m.Rule):
    sig = ctx.systems[sys.name]
    bound: dict = {}
    if (rule.antecedent is None) != (sig.antecedent is None):
        have = "omits the antecedent" if rule.antecedent is None else "has an antecedent"
        ctx.report("AntecedentArityMismatch",
                   f"rule {rule.label} {have}, but system {sys.name} is {sig.render()}", rule.initial.span)
    if rule.antecedent is not None:
        check_pattern(ctx, rule.antecedent, sig.antecedent, bound)
    check_pattern(ctx, rule.initial, sig.initial, bound)

    def scope():
        return {**ctx.globals, **bound}

    for premise in rule.premises:
        if isinstance(premise, m.Transition):
            target = ctx.systems.get(premise.target)
            ante = infer_expr_type(ctx, premise.antecedent, scope()) if premise.antecedent is not None else None
            init = infer_expr_type(ctx, premise.initial, scope())
            if target is None:
                ctx.report("UnknownSystem", f"unknown transition system {premise.target}", premise.span)
                check_pattern(ctx, premise.final, None, bound)
                continue
            _check_antecedent(ctx, target, premise.target, premise.antecedent, ante, premise.span)
            ctx.expect(target.initial, init, premise.initial.span, f"initial configuration for {premise.target}")
            check_pattern(ctx, premise.final, target.final, bound)
        elif isinstance(premise, m.SideCondition):
            cond = infer_expr_type(ctx, premise.cond, scope())
            ctx.expect(m.BOOL, cond, premise.cond.span, "side condition")
        else:
            rhs = infer_expr_type(ctx, premise.rhs, scope())
            check_pattern(ctx, premise.pattern, rhs, bound)
    final = infer_expr_type(ctx, rule.final, scope())
    ctx.expect(sig.final, final, rule.final.span, f"result of rule {rule.label}")


def check_system(spec: m.Specification, sys: m.TransitionSystem, ctx: TypeContext) -> list[Diagnostic]:
    start = len(ctx.diagnostics)
    labels: dict[str, m.Rule] = {}
    for rule in sys.rules:
        if rule.label in labels:
            ctx.diagnostics.append(warning("type", "DuplicateLabel",
                                           f"rule label {rule.label} is used more than once in system {sys.name}",
                                           rule.span, [("first used here", labels[rule.label].span)]))
        labels.setdefault(rule.label, rule)
        check_rule(ctx, sys, rule)
    return ctx.diagnostics[start:]


@dataclass
class TypedSpecification:
    spec: m.Specification
    table: DomainTable
    let_types: dict[str, Optional[m.TypeExpr]]
    systems: dict[str, Signature]
    diagnostics: list[Diagnostic]

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.is_error]

    @property
    def warnings(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if not d.is_error]

    @property
    def ok(self) -> bool:
        return not self.errors


@deep
def check_specification(spec: m.Specification) -> TypedSpecification:
    table = check_domains(spec)
    ctx = TypeContext(table)
    ctx.diagnostics.extend(table.diagnostics)

    for sys in spec.systems:
        if sys.name in ctx.systems:
            ctx.report("DuplicateDefinition", f"duplicate definition of system {sys.name}", sys.span)
            continue
        header = [sys.initial_type, sys.final_type] + ([sys.antecedent_type] if sys.antecedent_type else [])
        for t in header:
            ctx.check_type(t)
        ctx.systems[sys.name] = Signature(sys.antecedent_type, sys.initial_type, sys.final_type)

    for let in spec.lets:
        if let.name in ctx.globals:
            ctx.report("DuplicateDefinition", f"duplicate definition of {let.name}", let.span)
            continue
        ctx.globals[let.name] = infer_expr_type(ctx, let.expr)

    seen_systems = set()
    for sys in spec.systems:
        if sys.name not in seen_systems:
            seen_systems.add(sys.name)
            check_system(spec, sys, ctx)

    for ev in spec.evaluations:
        check_evaluation(ctx, ev)

    diags = list(spec.warnings) + ctx.diagnostics
    return TypedSpecification(spec, table, dict(ctx.globals), dict(ctx.systems), diags)


def check_evaluation(ctx: TypeContext, ev: m.Evaluation):
    ante = infer_expr_type(ctx, ev.antecedent) if ev.antecedent is not None else None
    init = infer_expr_type(ctx, ev.initial)
    sig = ctx.systems.get(ev.system)
    if sig is None:
        ctx.report("UnknownSystem", f"unknown transition system {ev.system}", ev.span)
        return
    _check_antecedent(ctx, sig, ev.system, ev.antecedent, ante, ev.span)
    ctx.expect(sig.initial, init, ev.initial.span, f"initial configuration for {ev.system}")


def describe_pattern(p: m.Pattern) -> str:
    return print_pattern(p)
