"""Randomised properties, each run for 1000 examples from a fixed seed.

The acceptance suite calls these and reports how many examples ran.
"""
from collections import Counter

from hypothesis import HealthCheck, assume, given, seed, settings
from hypothesis import strategies as st

from conftest import check, load
from imp_programs import initial_configuration, programs
from nasl import model as m
from nasl.derivation import render_tree
from nasl.evaluator import (
    DerivationFailure,
    FuelExhausted,
    RuntimeEnv,
    derive,
    eval_expr,
    evaluate_lets,
    inhabits,
    match_pattern,
)
from nasl.values import BottomEvaluated, instantiate

SEED = 20261016
EXAMPLES = 1000
PROPERTY_SETTINGS = settings(
    max_examples=EXAMPLES,
    deadline=None,
    database=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much, HealthCheck.data_too_large],
)
# examples actually executed per property, read by the acceptance report
RUNS: Counter = Counter()

IMP = load("imp")
IMP_EMPTY = evaluate_lets(IMP).lookup("empty")

# -- (a) matching a pattern against its own instance recovers the bindings --------

NAMES = st.sampled_from(["a", "b", "c", "d", "e1", "s'", "v"])
SHAPES = [("#", None), (None, "+", None), ("if", None, "then", None), ("skip",)]


@st.composite
def linear_patterns(draw, depth=3):
    used = set()

    def gen(d):
        kinds = ["var", "int", "bool", "str", "sym"] + (["pair", "ctor", "syntax"] if d > 0 else [])
        kind = draw(st.sampled_from(kinds))
        if kind == "var":
            name = draw(NAMES.filter(lambda n: n not in used)) if len(used) < 7 else None
            if name is None:
                return m.PIntLit(0)
            used.add(name)
            return m.PVar(name)
        if kind == "int":
            return m.PIntLit(draw(st.integers(-10**6, 10**6)))
        if kind == "bool":
            return m.PBoolLit(draw(st.booleans()))
        if kind == "str":
            return m.PStringLit(draw(st.text(max_size=5)))
        if kind == "sym":
            return m.PSymbolLit(draw(st.sampled_from(["x", "y", "next"])))
        if kind == "pair":
            return m.PPair(gen(d - 1), gen(d - 1))
        if kind == "ctor":
            return m.PCtor(draw(st.sampled_from(["Nil", "Cons", "Num"])), tuple(gen(d - 1) for _ in range(draw(st.integers(0, 3)))))
        shape = draw(st.sampled_from(SHAPES))
        return m.PSyntax(shape, tuple(gen(d - 1) for item in shape if item is None))

    return gen(depth)


@st.composite
def basic_values(draw):
    return draw(st.one_of(
        st.integers().map(lambda n: m.IntLit(n)),
        st.booleans().map(lambda b: m.BoolLit(b)),
        st.sampled_from(["x", "y"]).map(lambda s: m.SymbolLit(s)),
    ))


@seed(SEED)
@PROPERTY_SETTINGS
@given(pattern=linear_patterns(), data=st.data())
def match_instantiate_round_trip(pattern, data):
    RUNS["round-trip"] += 1
    names = sorted(m.pattern_vars(pattern))
    bindings = {n: eval_expr(RuntimeEnv(), data.draw(basic_values())) for n in names}
    value = instantiate(pattern, bindings)
    assert match_pattern(pattern, value) == bindings
    # and a wildcard anywhere still matches
    assert match_pattern(m.PWildcard(), value) == {}


# -- (b) more fuel never changes a completed result --------------------------------


def outcome(program, fuel):
    try:
        tree = derive(IMP, "S", None, initial_configuration(program, IMP_EMPTY), fuel)
    except DerivationFailure as failure:
        return type(failure).__name__, render_value_or_trace(failure)
    return "ok", render_tree(tree)


def render_value_or_trace(failure):
    return failure.message if isinstance(failure, FuelExhausted) else repr(failure.trace)


@seed(SEED)
@PROPERTY_SETTINGS
@given(program=programs(allow_unassigned=True), fuel=st.integers(1, 120), extra=st.integers(1, 400))
def fuel_monotonicity(program, fuel, extra):
    RUNS["fuel monotonicity"] += 1
    small = outcome(program, fuel)
    large = outcome(program, fuel + extra)
    if small[0] != "FuelExhausted":
        assert large == small
    if large[0] == "FuelExhausted":
        assert small[0] == "FuelExhausted"


# -- (c) evaluation results inhabit their static type -------------------------------

TYPED_BASE = check("""
domain Env = Symbol -> Int;
domain Tree = { Leaf : Int + Node : Tree * Tree + Empty };
syntax Exp = '#' Int | Symbol | Exp '+' Exp;
""")
BASE_TYPES = [m.INT, m.BOOL, m.SYMBOL, m.STRING, m.TNamed("Exp"), m.TNamed("Env"), m.TNamed("Tree")]


def types(depth=2):
    base = st.sampled_from(BASE_TYPES)
    if depth == 0:
        return base
    sub = types(depth - 1)
    return st.one_of(base, st.builds(m.TProduct, sub, sub), st.builds(m.TArrow, st.sampled_from([m.INT, m.SYMBOL]), sub))


@st.composite
def expressions(draw, t, scope=(), depth=3):
    """A well-typed expression of type `t`; `scope` lists (name, type) lambda parameters."""
    table = TYPED_BASE.table
    t_whnf = table.whnf(t)
    in_scope = [n for n, ty in scope if table.same(ty, t)]
    options = ["lit"]
    if in_scope:
        options.append("var")
    if depth > 0:
        options += ["compound", "apply"]
    if draw(st.integers(0, 40)) == 0:
        return m.Bottom(t)
    kind = draw(st.sampled_from(options))
    if kind == "var":
        return m.Var(draw(st.sampled_from(in_scope)))
    if kind == "apply":
        arg_t = draw(st.sampled_from([m.INT, m.SYMBOL, m.BOOL]))
        fn = draw(expressions(m.TArrow(arg_t, t), scope, depth - 1))
        return m.Apply(fn, draw(expressions(arg_t, scope, depth - 1)))
    d = depth - 1 if kind == "compound" else 0
    if isinstance(t_whnf, m.TBasic):
        if t_whnf.kind == "Int":
            if kind == "compound":
                op = draw(st.sampled_from(["+", "-", "*"]))
                return m.BinOp(op, draw(expressions(m.INT, scope, d)), draw(expressions(m.INT, scope, d)))
            return m.IntLit(draw(st.integers(-1000, 1000)))
        if t_whnf.kind == "Bool":
            if kind == "compound":
                op = draw(st.sampled_from(m.COMPARE_OPS))
                return m.BinOp(op, draw(expressions(m.INT, scope, d)), draw(expressions(m.INT, scope, d)))
            return m.BoolLit(draw(st.booleans()))
        if t_whnf.kind == "Symbol":
            return m.SymbolLit(draw(st.sampled_from(["x", "y", "z"])))
        return m.StringLit(draw(st.text(alphabet="ab\"\\\n", max_size=4)))
    if isinstance(t_whnf, m.TProduct):
        return m.Pair(draw(expressions(t_whnf.left, scope, d)), draw(expressions(t_whnf.right, scope, d)))
    if isinstance(t_whnf, m.TArrow):
        if kind == "compound" and isinstance(table.whnf(t_whnf.domain), m.TBasic) and draw(st.booleans()):
            return m.Update(draw(expressions(t, scope, d)), draw(expressions(t_whnf.domain, scope, d)),
                            draw(expressions(t_whnf.codomain, scope, d)))
        param = f"p{len(scope)}"
        body = draw(expressions(t_whnf.codomain, scope + ((param, t_whnf.domain),), d))
        return m.Lambda(param, t_whnf.domain, body)
    if t_whnf.name == "Exp":
        shape = draw(st.sampled_from([("#", None), (None,), (None, "+", None)])) if d else ("#", None)
        holes = {("#", None): [m.INT], (None,): [m.SYMBOL], (None, "+", None): [t, t]}[shape]
        return m.SyntaxExpr(shape, tuple(draw(expressions(h, scope, d)) for h in holes))
    ctor = draw(st.sampled_from(["Leaf", "Node", "Empty"] if d else ["Leaf", "Empty"]))
    payload = {"Leaf": [m.INT], "Node": [t, t], "Empty": []}[ctor]
    return m.CtorApply(ctor, tuple(draw(expressions(p, scope, d)) for p in payload))


@st.composite
def typed_expressions(draw):
    t = draw(types())
    return t, draw(expressions(t))


@seed(SEED)
@PROPERTY_SETTINGS
@given(case=typed_expressions())
def values_inhabit_static_types(case):
    t, e = case
    tspec = check_with_let(e)
    assert tspec.ok, [d.render() for d in tspec.errors]
    assert tspec.table.same(tspec.let_types["it"], t)
    try:
        value = eval_expr(RuntimeEnv(), e)
    except BottomEvaluated:
        assume(False)
    RUNS["inhabitation"] += 1
    assert inhabits(tspec, value, t)


def check_with_let(e):
    from nasl.analysis import check_specification

    return check_specification(TYPED_BASE.spec.merge(m.Specification(lets=(m.LetDef("it", e),))))


# -- (d) derivations are deterministic ----------------------------------------------


@seed(SEED)
@PROPERTY_SETTINGS
@given(program=programs(allow_unassigned=True))
def derivation_is_deterministic(program):
    RUNS["determinism"] += 1
    first = outcome(program, 500)
    assert outcome(program, 500) == first
