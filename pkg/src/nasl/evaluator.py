"""Expression evaluation, pattern matching and derivation-tree construction.

Rules of a system are tried in declaration order; the first rule whose
patterns match and whose premises all hold produces the derivation. A rule
that fails is abandoned and the next one is tried. Every rule attempt costs
one unit of fuel, so a divergent derivation ends with FuelExhausted.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from . import model as m
from .analysis import TypedSpecification
from .deep import deep, run_deep
from .derivation import (
    ABORTED,
    PATTERN_MISMATCH,
    PREMISE_FAILED,
    SIDE_CONDITION_FALSE,
    SUCCEEDED,
    DerivationTree,
    LocalBound,
    SideConditionHeld,
    TraceEntry,
)
from .printer import print_expr, print_pattern
from .values import (
    BottomEvaluated,
    RuntimeFault,
    Value,
    VBool,
    VClosure,
    VCtor,
    VInt,
    VPair,
    VString,
    VSymbol,
    VSyntax,
    VUpdated,
    nest_values,
    render_value,
    value_equals,
)

DEFAULT_FUEL = 10_000


class RuntimeEnv:
    """Immutable chain of scopes; lookups go innermost first."""

    __slots__ = ("vars", "parent")

    def __init__(self, vars: Optional[dict] = None, parent: Optional["RuntimeEnv"] = None):
        self.vars = dict(vars or {})
        self.parent = parent

    def lookup(self, name: str) -> Value:
        env = self
        while env is not None:
            if name in env.vars:
                return env.vars[name]
            env = env.parent
        raise RuntimeFault(f"unbound variable {name}")

    def extend(self, bindings: dict) -> "RuntimeEnv":
        return RuntimeEnv(bindings, self)


class Fuel:
    def __init__(self, amount: int = DEFAULT_FUEL):
        if amount < 0:
            raise ValueError("fuel cannot be negative")
        self.initial = amount
        self.remaining = amount

    @property
    def used(self) -> int:
        return self.initial - self.remaining

    def spend(self) -> bool:
        if self.remaining == 0:
            return False
        self.remaining -= 1
        return True


# -- failures ------------------------------------------------------------------


class DerivationFailure(Exception):
    code = "DerivationFailure"

    def __init__(self, message: str, trace: tuple[TraceEntry, ...]):
        self.message = message
        self.trace = tuple(trace)
        super().__init__(message)


class NoRuleApplies(DerivationFailure):
    code = "NoRuleApplies"


class FuelExhausted(DerivationFailure):
    code = "FuelExhausted"

    def rewrap(self, trace):
        return FuelExhausted(self.message, trace)


class EvaluationAborted(DerivationFailure):
    """A runtime error inside a rule's conclusion; it is not backtracked over."""

    code = "EvaluationAborted"

    def __init__(self, message, trace, fault: RuntimeFault):
        super().__init__(message, trace)
        self.fault = fault

    def rewrap(self, trace):
        return EvaluationAborted(self.message, trace, self.fault)


# -- expressions -----------------------------------------------------------------


def eval_expr(env: RuntimeEnv, e: m.Expr) -> Value:
    if isinstance(e, m.IntLit):
        return VInt(e.value)
    if isinstance(e, m.StringLit):
        return VString(e.value)
    if isinstance(e, m.BoolLit):
        return VBool(e.value)
    if isinstance(e, m.SymbolLit):
        return VSymbol(e.value)
    if isinstance(e, m.Var):
        return env.lookup(e.name)
    if isinstance(e, m.Lambda):
        return VClosure(e.param, e.param_type, e.body, env)
    if isinstance(e, m.Apply):
        fn = eval_expr(env, e.fn)
        return apply_value(fn, eval_expr(env, e.arg))
    if isinstance(e, m.Bottom):
        raise BottomEvaluated(f"the bottom element -|{e.type}| was evaluated", e.span)
    if isinstance(e, m.Update):
        fn = eval_expr(env, e.fn)
        key = eval_expr(env, e.key)
        return VUpdated(fn, key, eval_expr(env, e.value))
    if isinstance(e, m.Pair):
        left = eval_expr(env, e.left)
        return VPair(left, eval_expr(env, e.right))
    if isinstance(e, m.BinOp):
        return _binop(e.op, eval_expr(env, e.left), eval_expr(env, e.right))
    if isinstance(e, m.CtorApply):
        return VCtor(e.name, nest_values([eval_expr(env, a) for a in e.args]))
    if isinstance(e, m.SyntaxExpr):
        return VSyntax(e.shape, tuple(eval_expr(env, a) for a in e.args))
    raise TypeError(f"not an expression: {e!r}")


def apply_value(fn: Value, arg: Value) -> Value:
    # the most recent update is the outermost VUpdated
    while isinstance(fn, VUpdated):
        if value_equals(fn.key, arg):
            return fn.replacement
        fn = fn.base
    if not isinstance(fn, VClosure):
        raise RuntimeFault(f"cannot apply {render_value(fn)}")
    return eval_expr(fn.env.extend({fn.param: arg}), fn.body)


def _binop(op: str, a: Value, b: Value) -> Value:
    if op == "+":
        return VInt(a.value + b.value)
    if op == "-":
        return VInt(a.value - b.value)
    if op == "*":
        return VInt(a.value * b.value)
    if op == "==":
        return VBool(value_equals(a, b))
    if op == "!=":
        return VBool(not value_equals(a, b))
    key = (lambda v: v.name) if isinstance(a, VSymbol) else (lambda v: v.value)
    if op == "<":
        return VBool(key(a) < key(b))
    if op == "<=":
        return VBool(key(a) <= key(b))
    raise ValueError(f"unknown operator {op}")


# -- patterns --------------------------------------------------------------------


def match_pattern(p: m.Pattern, v: Value, bindings: Optional[dict] = None) -> Optional[dict]:
    """Extend `bindings` by matching `p` against `v`; None when they do not match.

    A variable that is already bound must equal the value it is matched against.
    """
    out = dict(bindings or {})
    return out if _match(p, v, out) else None


def _match(p: m.Pattern, v: Value, out: dict) -> bool:
    if isinstance(p, m.PVar):
        if p.name in out:
            return value_equals(out[p.name], v)
        out[p.name] = v
        return True
    if isinstance(p, m.PWildcard):
        return True
    if isinstance(p, m.PIntLit):
        return isinstance(v, VInt) and v.value == p.value
    if isinstance(p, m.PStringLit):
        return isinstance(v, VString) and v.value == p.value
    if isinstance(p, m.PBoolLit):
        return isinstance(v, VBool) and v.value == p.value
    if isinstance(p, m.PSymbolLit):
        return isinstance(v, VSymbol) and v.name == p.value
    if isinstance(p, m.PPair):
        return isinstance(v, VPair) and _match(p.left, v.left, out) and _match(p.right, v.right, out)
    if isinstance(p, m.PCtor):
        if not isinstance(v, VCtor) or v.name != p.name:
            return False
        if not p.args:
            return v.payload is None
        return v.payload is not None and _match(_nest_patterns(p.args), v.payload, out)
    if isinstance(p, m.PSyntax):
        return (
            isinstance(v, VSyntax)
            and v.shape == p.shape
            and all(_match(sp, sv, out) for sp, sv in zip(p.args, v.children))
        )
    raise TypeError(f"not a pattern: {p!r}")


def _nest_patterns(args):
    result = args[-1]
    for a in reversed(args[:-1]):
        result = m.PPair(a, result)
    return result


# -- derivations -----------------------------------------------------------------


class _RuleFailed(Exception):
    def __init__(self, entry: TraceEntry):
        self.entry = entry


class Deriver:
    def __init__(self, tspec: TypedSpecification, globals_env: RuntimeEnv, fuel: Fuel):
        self.tspec = tspec
        self.systems = {s.name: s for s in tspec.spec.systems}
        self.globals = globals_env
        self.fuel = fuel

    def derive(self, system: str, antecedent: Optional[Value], initial: Value) -> DerivationTree:
        sys_def = self.systems[system]
        trace: list[TraceEntry] = []
        for rule in sys_def.rules:
            if not self.fuel.spend():
                trace.append(TraceEntry(system, rule.label, ABORTED, reason="fuel exhausted", span=rule.span))
                raise FuelExhausted(f"fuel exhausted after {self.fuel.initial} rule applications", trace)
            try:
                return self._apply(sys_def, rule, antecedent, initial, trace)
            except _RuleFailed as failed:
                trace.append(failed.entry)
        ante = f"{render_value(antecedent)} |- " if antecedent is not None else ""
        raise NoRuleApplies(f"no rule of system {system} applies to {ante}{render_value(initial)}", trace)

    def _apply(self, sys_def, rule: m.Rule, antecedent, initial, trace) -> DerivationTree:
        def fail(outcome, index=None, nested=(), reason=""):
            raise _RuleFailed(TraceEntry(sys_def.name, rule.label, outcome, index, tuple(nested), reason, rule.span))

        bindings: Optional[dict] = {}
        if rule.antecedent is not None:
            bindings = match_pattern(rule.antecedent, antecedent, bindings)
        if bindings is not None:
            bindings = match_pattern(rule.initial, initial, bindings)
        if bindings is None:
            fail(PATTERN_MISMATCH)

        children = []
        for i, premise in enumerate(rule.premises):
            env = self.globals.extend(bindings)
            try:
                if isinstance(premise, m.Transition):
                    ante = eval_expr(env, premise.antecedent) if premise.antecedent is not None else None
                    init = eval_expr(env, premise.initial)
                elif isinstance(premise, m.SideCondition):
                    cond = eval_expr(env, premise.cond)
                else:
                    rhs = eval_expr(env, premise.rhs)
            except BottomEvaluated as fault:
                fail(PREMISE_FAILED, i, reason=fault.message)
            except RuntimeFault as fault:
                self._abort(sys_def, rule, trace, fault, i)

            if isinstance(premise, m.Transition):
                sub = abort = None
                try:
                    sub = self.derive(premise.target, ante, init)
                except NoRuleApplies as nra:
                    fail(PREMISE_FAILED, i, nra.trace, "no rule applies")
                except (FuelExhausted, EvaluationAborted) as exc:
                    abort = exc
                if abort is not None:
                    # raised outside the handler so aborts do not chain through every level
                    entry = TraceEntry(sys_def.name, rule.label, ABORTED, i, abort.trace, abort.message, rule.span)
                    raise abort.rewrap(trace + [entry]).with_traceback(None)
                extended = self._match(sys_def, rule, trace, i, premise.final, sub.final, bindings)
                if extended is None:
                    fail(PREMISE_FAILED, i, reason=f"result {render_value(sub.final)} does not match "
                                                   f"{print_pattern(premise.final)}")
                bindings = extended
                children.append(sub)
            elif isinstance(premise, m.SideCondition):
                if not cond.value:
                    fail(SIDE_CONDITION_FALSE, i)
                children.append(SideConditionHeld(print_expr(premise.cond)))
            else:
                extended = self._match(sys_def, rule, trace, i, premise.pattern, rhs, bindings)
                if extended is None:
                    fail(PREMISE_FAILED, i, reason=f"{render_value(rhs)} does not match "
                                                   f"{print_pattern(premise.pattern)}")
                bindings = extended
                children.append(LocalBound(print_pattern(premise.pattern), rhs))

        try:
            final = eval_expr(self.globals.extend(bindings), rule.final)
        except RuntimeFault as fault:
            self._abort(sys_def, rule, trace, fault, None)
        trace.append(TraceEntry(sys_def.name, rule.label, SUCCEEDED, span=rule.span))
        return DerivationTree(sys_def.name, rule.label, antecedent, initial, final, tuple(children), tuple(trace))

    def _match(self, sys_def, rule, trace, index, pattern, value, bindings):
        try:
            return match_pattern(pattern, value, bindings)
        except RuntimeFault as fault:
            self._abort(sys_def, rule, trace, fault, index)

    def _abort(self, sys_def, rule, trace, fault: RuntimeFault, index):
        where = f"premise {index + 1}" if index is not None else "the conclusion"
        message = f"{fault.message} (in {where} of rule {rule.label}, at {fault.span})"
        entry = TraceEntry(sys_def.name, rule.label, ABORTED, index, (), message, rule.span)
        raise EvaluationAborted(message, trace + [entry], fault)


@deep
def evaluate_lets(tspec: TypedSpecification) -> RuntimeEnv:
    """Evaluate every let-binding once, in declaration order."""
    env = RuntimeEnv()
    for let in tspec.spec.lets:
        env = env.extend({let.name: eval_expr(env, let.expr)})
    return env


def derive(
    tspec: TypedSpecification,
    system: str,
    antecedent: Optional[Value],
    initial: Value,
    fuel: Union[Fuel, int] = DEFAULT_FUEL,
    env: Optional[RuntimeEnv] = None,
) -> DerivationTree:
    if not tspec.ok:
        raise ValueError("cannot evaluate a specification with errors")
    sig = tspec.systems[system]
    if (sig.antecedent is None) != (antecedent is None):
        raise ValueError(f"system {system} is {sig.render()}; antecedent presence does not match")
    fuel = fuel if isinstance(fuel, Fuel) else Fuel(fuel)
    env = evaluate_lets(tspec) if env is None else env
    return run_deep(Deriver(tspec, env, fuel).derive, system, antecedent, initial)


@dataclass
class EvaluationResult:
    evaluation: m.Evaluation
    value: Optional[Value] = None
    tree: Optional[DerivationTree] = None
    error: Optional[Exception] = None
    fuel_used: int = 0

    @property
    def ok(self) -> bool:
        return self.error is None


@deep
def run_evaluation(tspec: TypedSpecification, ev: m.Evaluation, env: RuntimeEnv,
                   max_fuel: int = DEFAULT_FUEL) -> EvaluationResult:
    fuel = Fuel(max_fuel)
    try:
        ante = eval_expr(env, ev.antecedent) if ev.antecedent is not None else None
        init = eval_expr(env, ev.initial)
        tree = derive(tspec, ev.system, ante, init, fuel, env)
    except (RuntimeFault, DerivationFailure) as exc:
        return EvaluationResult(ev, error=exc, fuel_used=fuel.used)
    return EvaluationResult(ev, tree.final, tree, fuel_used=fuel.used)


@deep
def run_evaluations(tspec: TypedSpecification, max_fuel: int = DEFAULT_FUEL) -> list[EvaluationResult]:
    if not tspec.ok:
        raise ValueError("cannot evaluate a specification with errors")
    try:
        env = evaluate_lets(tspec)
    except RuntimeFault as fault:
        return [EvaluationResult(ev, error=fault) for ev in tspec.spec.evaluations]
    return [run_evaluation(tspec, ev, env, max_fuel) for ev in tspec.spec.evaluations]


# -- runtime typing oracle ---------------------------------------------------------


def inhabits(tspec: TypedSpecification, v: Value, t: m.TypeExpr) -> bool:
    table = tspec.table
    t = table.whnf(t)
    if isinstance(t, m.TBasic):
        return isinstance(v, {"Int": VInt, "String": VString, "Bool": VBool, "Symbol": VSymbol}[t.kind])
    if isinstance(t, m.TProduct):
        return isinstance(v, VPair) and inhabits(tspec, v.left, t.left) and inhabits(tspec, v.right, t.right)
    if isinstance(t, m.TArrow):
        if isinstance(v, VUpdated):
            return (inhabits(tspec, v.key, t.domain) and inhabits(tspec, v.replacement, t.codomain)
                    and inhabits(tspec, v.base, t))
        return isinstance(v, VClosure) and table.same(v.param_type, t.domain)
    definition = table.definitions.get(t.name)
    if isinstance(definition, m.SyntaxDef):
        info = table.shapes.get(v.shape) if isinstance(v, VSyntax) else None
        return (info is not None and info.owner == t.name
                and all(inhabits(tspec, c, h) for c, h in zip(v.children, info.holes)))
    if isinstance(v, VCtor):
        info = table.constructors.get(v.name)
        if info is None or info.owner != t.name:
            return False
        if info.payload is None:
            return v.payload is None
        return v.payload is not None and inhabits(tspec, v.payload, info.payload)
    return False
