import pytest

from conftest import check, load
from nasl import model as m
from nasl.derivation import PATTERN_MISMATCH, SIDE_CONDITION_FALSE, SUCCEEDED, render_tree
from nasl.evaluator import (
    EvaluationAborted,
    Fuel,
    FuelExhausted,
    NoRuleApplies,
    RuntimeEnv,
    derive,
    eval_expr,
    inhabits,
    match_pattern,
    run_evaluations,
)
from nasl.parser import parse_source
from nasl.values import BottomEvaluated, VBool, VCtor, VInt, VPair, VSymbol, VSyntax, render_value


def evaluate(src):
    spec = parse_source(f"let it = {src};")
    assert check(f"let it = {src};").ok
    return eval_expr(RuntimeEnv(), spec.lets[0].expr)


@pytest.mark.parametrize("src, expected", [
    ("1 + 2 * 3", VInt(7)),
    ("10 - 4 - 3", VInt(3)),
    ("2 <= 2", VBool(True)),
    ("`a` < `b`", VBool(True)),
    ("`x` == `x`", VBool(True)),
    ("3 != 3", VBool(False)),
    ("(\\x : Int . x * x)(5)", VInt(25)),
    ("(\\f : Int -> Int . f(2))(\\y : Int . y + 1)", VInt(3)),
    ("(\\x : Symbol . 0)[`a` -> 1][`a` -> 2](`a`)", VInt(2)),
    ("(\\x : Symbol . 0)[`a` -> 1][`b` -> 2](`a`)", VInt(1)),
    ("(\\x : Symbol . 0)[`a` -> 1](`c`)", VInt(0)),
])
def test_eval_expr(src, expected):
    assert evaluate(src) == expected


def test_syntax_expression_children_are_evaluated():
    e = parse_source("let it = {'#' 1 + 1};").lets[0].expr
    assert eval_expr(RuntimeEnv(), e) == VSyntax(("#", None), (VInt(2),))


def test_big_integers_do_not_overflow():
    assert evaluate("4294967296 * 4294967296") == VInt(2 ** 64)


def test_bottom_raises():
    with pytest.raises(BottomEvaluated):
        evaluate("(\\x : Symbol . -|Int|)(`a`)")


def test_match_pattern():
    pat = m.PSyntax((None, "+", None), (m.PVar("a"), m.PWildcard()))
    v = VSyntax((None, "+", None), (VInt(1), VInt(2)))
    assert match_pattern(pat, v) == {"a": VInt(1)}
    assert match_pattern(pat, VSyntax((None, "-", None), (VInt(1), VInt(2)))) is None
    assert match_pattern(m.PVar("a"), VInt(2), {"a": VInt(1)}) is None
    assert match_pattern(m.PVar("a"), VInt(1), {"a": VInt(1)}) == {"a": VInt(1)}
    assert match_pattern(m.PCtor("C", (m.PVar("x"), m.PVar("y"))), VCtor("C", VPair(VInt(1), VInt(2)))) == {
        "x": VInt(1), "y": VInt(2)}
    assert match_pattern(m.PCtor("C", ()), VCtor("C", VInt(1))) is None


def test_match_does_not_mutate_bindings():
    bindings = {"a": VInt(1)}
    match_pattern(m.PVar("b"), VInt(2), bindings)
    assert bindings == {"a": VInt(1)}


def test_fuel():
    fuel = Fuel(2)
    assert fuel.spend() and fuel.spend()
    assert not fuel.spend()
    assert fuel.used == 2
    with pytest.raises(ValueError):
        Fuel(-1)


def test_imp_evaluates_to_eight():
    [result] = run_evaluations(load("imp"))
    assert result.ok and result.value == VInt(8)
    assert [t.rule_label for t in result.tree.subtrees] == ["CONST", "VAR"]
    assert result.tree.rule_label == "ADD"
    # ADD is the third rule tried at the root; CONST then CONST, VAR below it
    assert result.fuel_used == 6


def test_conditional_takes_false_branch():
    [result] = run_evaluations(load("imp_conditionals"))
    env = result.value
    assert render_value(env) == "(\\x : Symbol . -|Int|)[`x` -> 0][`x` -> 2]"
    if_node = result.tree.subtrees[1]
    assert if_node.rule_label == "IF-FALSE"
    outcomes = [(e.rule_label, e.outcome) for e in if_node.trace]
    assert ("IF-TRUE", SIDE_CONDITION_FALSE) in outcomes
    assert outcomes[-1] == ("IF-FALSE", SUCCEEDED)
    assert "abandoned [IF-TRUE]" in render_tree(result.tree)


def test_order_matters():
    [stop] = run_evaluations(load("stop_first"))
    assert stop.value == VInt(0)
    [circ] = run_evaluations(load("circular_first"), max_fuel=50)
    assert isinstance(circ.error, FuelExhausted)
    assert circ.fuel_used == 50


SMALL = """
domain Env = Symbol -> Int;
syntax Exp = '#' Int | Symbol | Exp '+' Exp | 'abort';
let empty = \\x : Symbol . -|Int|;
system e : Env |- Exp ==> Int =
  [[ CONST ]]: s |- {'#' n} ==> n;
  [[ VAR ]]: s |- {x} ==> s(x);
  [[ ADD ]]: s |- {e1 '+' e2} ==> v1 + v2 \\\\ s |- e1 ==> v1, s |- e2 ==> v2;
end
"""


def test_no_rule_applies_keeps_full_trace():
    tspec = check(SMALL)
    with pytest.raises(NoRuleApplies) as info:
        derive(tspec, "e", _empty(tspec), VSyntax(("abort",), ()))
    trace = info.value.trace
    assert [(t.rule_label, t.outcome) for t in trace] == [
        ("CONST", PATTERN_MISMATCH), ("VAR", PATTERN_MISMATCH), ("ADD", PATTERN_MISMATCH)]


def _empty(tspec):
    from nasl.evaluator import evaluate_lets

    return evaluate_lets(tspec).lookup("empty")


def test_bottom_in_premise_fails_the_rule_softly():
    # looking up an unset variable evaluates bottom in the conclusion: that aborts
    tspec = check(SMALL + "evaluate empty |- {`y`} in e")
    [result] = run_evaluations(tspec)
    assert isinstance(result.error, EvaluationAborted)
    assert result.error.fault.code == "BottomEvaluated"


def test_bottom_inside_premise_expression_tries_next_rule():
    src = SMALL.replace("end", "") + """
  [[ FALLBACK ]]: s |- {x} ==> 0;
end
system t : Env |- Exp ==> Int =
  [[ LOOKUP ]]: s |- {x} ==> v \\\\ let v = s(x);
  [[ DEFAULT ]]: s |- e ==> 7;
end
evaluate empty |- {`y`} in t
"""
    tspec = check(src)
    assert tspec.ok, [d.render() for d in tspec.diagnostics]
    [result] = run_evaluations(tspec)
    assert result.value == VInt(7)
    assert result.tree.trace[0].rule_label == "LOOKUP"


def test_each_evaluation_is_independent():
    tspec = check(SMALL + "evaluate empty |- {'abort'} in e\nevaluate empty |- {'#' 4} in e")
    first, second = run_evaluations(tspec)
    assert isinstance(first.error, NoRuleApplies)
    assert second.value == VInt(4)


def test_deep_derivation_does_not_overflow_the_stack():
    depth = 3000
    term = "{'#' 1}"
    for _ in range(depth):
        term = "{" + term + " '+' {'#' 1}}"
    tspec = check(SMALL + f"evaluate empty |- {term} in e")
    [result] = run_evaluations(tspec, max_fuel=100_000)
    assert result.value == VInt(depth + 1)


def test_inhabits():
    tspec = load("imp")
    exp = m.TNamed("Exp")
    assert inhabits(tspec, VSyntax(("#", None), (VInt(1),)), exp)
    assert inhabits(tspec, VSyntax((None,), (VSymbol("x"),)), exp)
    assert not inhabits(tspec, VSyntax((None,), (VInt(1),)), exp)
    assert not inhabits(tspec, VInt(1), exp)
    assert inhabits(tspec, _empty(tspec), m.TNamed("Env"))
    assert not inhabits(tspec, VPair(VInt(1), VBool(True)), m.TProduct(m.INT, m.INT))
