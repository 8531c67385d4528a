import io

from conftest import fixture_path
from nasl.cli import main
from nasl.repl import Repl

IMP_EVAL = "evaluate empty[`x` -> 5] |- {{'#' 3} '+' {`x`}} in e"


def session(*lines):
    out = io.StringIO()
    code = Repl().loop(io.StringIO("\n".join(lines) + "\n"), out, interactive=False)
    return code, out.getvalue().splitlines()


def test_load_then_evaluate():
    code, out = session(f":load {fixture_path('imp')}", IMP_EVAL)
    assert code == 0
    assert out == ["8", "8"]


def test_load_matches_run(capsys):
    for name in ["imp", "imp_conditionals", "circular_first", "stop_first", "bur_block_fixed"]:
        main(["run", str(fixture_path(name))])
        expected = capsys.readouterr().out.splitlines()
        assert session(f":load {fixture_path(name)}")[1] == expected


def test_definitions_accumulate():
    repl = Repl()
    assert repl.feed("domain Env = Symbol -> Int;") == ["defined Env"]
    assert repl.feed("syntax Exp = '#' Int;") == ["defined Exp"]
    assert repl.feed("let empty = \\x : Symbol . -|Int|;") == ["defined empty"]
    assert repl.feed("system e : Env |- Exp ==> Int = [[ C ]]: s |- {'#' n} ==> n * 2; end") == ["defined e"]
    assert repl.feed("evaluate empty |- {'#' 21} in e") == ["42"]


def test_redefinition_is_rejected_and_state_kept():
    repl = Repl()
    repl.feed("domain Env = Symbol -> Int;")
    before = repl.spec
    out = repl.feed("domain Env = Int;")
    assert "duplicate definition" in out[0]
    assert repl.spec is before


def test_type_errors_leave_state_unchanged():
    repl = Repl()
    out = repl.feed("let a = 1 + true;")
    assert out and "error" in out[0]
    assert repl.feed("let a = 2;") == ["defined a"]


def test_multi_line_items_are_buffered():
    repl = Repl()
    assert repl.feed("domain Pair =") == []
    assert repl.prompt.strip() == "..."
    assert repl.feed("  Int * Int;") == ["defined Pair"]
    assert repl.prompt == "nasl> "


def test_syntax_error_resets_buffer():
    repl = Repl()
    repl.feed("let a = 1 +")
    out = repl.feed(")")
    assert "error" in out[0] and not repl.buffer


def test_unfinished_input_reported_at_end():
    code, out = session("let a =")
    assert code == 0 and "error" in out[-1]


def test_evaluation_errors_are_reported():
    repl = Repl()
    repl.feed(f":load {fixture_path('imp')}")
    assert "unknown variable" in repl.feed("evaluate nothing |- {'#' 1} in e")[0]


def test_commands(tmp_path):
    target = tmp_path / "out.tex"
    code, out = session(f":load {fixture_path('imp')}", f":latex {target}", ":bogus", ":quit", IMP_EVAL)
    assert code == 0
    assert out[1] == f"wrote {target}"
    assert "unknown command" in out[2]
    assert len(out) == 3  # nothing runs after :quit
    assert "\\Downarrow" in target.read_text()


def test_load_missing_file():
    assert Repl().feed(":load /definitely/missing.nsml")[0].startswith("error: cannot read")


def test_load_ill_typed_file_changes_nothing():
    repl = Repl()
    out = repl.feed(f":load {fixture_path('flan_pair')}")
    assert any("error" in line for line in out)
    assert repl.spec.systems == ()
