import pytest

from nasl import model as m
from nasl.values import (
    FunctionComparison,
    UnboundPatternVariable,
    VBool,
    VClosure,
    VCtor,
    VInt,
    VPair,
    VString,
    VSymbol,
    VSyntax,
    VUpdated,
    instantiate,
    nest_values,
    render_value,
    value_equals,
)

IDENTITY = VClosure("x", m.INT, m.Var("x"), None)


def test_structural_equality():
    a = VSyntax((None, "+", None), (VInt(1), VSymbol("x")))
    b = VSyntax((None, "+", None), (VInt(1), VSymbol("x")))
    assert value_equals(a, b)
    assert not value_equals(a, VSyntax((None, "-", None), (VInt(1), VSymbol("x"))))
    assert not value_equals(VInt(1), VString("1"))
    assert value_equals(VCtor("Nil"), VCtor("Nil"))
    assert not value_equals(VCtor("C", VInt(1)), VCtor("C"))


def test_functions_cannot_be_compared():
    with pytest.raises(FunctionComparison):
        value_equals(IDENTITY, IDENTITY)
    with pytest.raises(FunctionComparison):
        value_equals(VPair(VInt(1), IDENTITY), VPair(VInt(1), IDENTITY))


def test_syntax_values_check_hole_count():
    with pytest.raises(ValueError):
        VSyntax(("#", None), ())


def test_nest_values():
    assert nest_values([]) is None
    assert nest_values([VInt(1)]) == VInt(1)
    assert nest_values([VInt(1), VInt(2), VInt(3)]) == VPair(VInt(1), VPair(VInt(2), VInt(3)))


def test_instantiate():
    pat = m.PSyntax((None, "+", None), (m.PVar("a"), m.PPair(m.PIntLit(1), m.PCtor("C", (m.PVar("b"),)))))
    v = instantiate(pat, {"a": VBool(True), "b": VString("s")})
    assert v == VSyntax((None, "+", None), (VBool(True), VPair(VInt(1), VCtor("C", VString("s")))))


def test_instantiate_unbound():
    with pytest.raises(UnboundPatternVariable):
        instantiate(m.PVar("q"), {})


@pytest.mark.parametrize("value, text", [
    (VInt(-3), "-3"),
    (VString('a"b'), '"a\\"b"'),
    (VBool(False), "false"),
    (VSymbol("x"), "`x`"),
    (VPair(VInt(1), VInt(2)), "(1, 2)"),
    (VCtor("Nil"), "Nil"),
    (VCtor("Num", VInt(4)), "Num(4)"),
    (VCtor("Two", VPair(VInt(1), VInt(2))), "Two(1, 2)"),
    (VSyntax(("#", None), (VInt(3),)), "{'#' 3}"),
    (IDENTITY, "(\\x : Int . x)"),
    (VUpdated(VUpdated(IDENTITY, VInt(1), VInt(2)), VInt(3), VInt(4)), "(\\x : Int . x)[1 -> 2][3 -> 4]"),
])
def test_render(value, text):
    assert render_value(value) == text
