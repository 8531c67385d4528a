import random

from imp_programs import encode_program, random_program, reference_run
from nasl.values import render_value


def test_reference_run_by_hand():
    program = [("x", ("#", 3)), ("y", ("+", ("var", "x"), ("#", 4))), ("x", ("+", ("var", "y"), ("var", "y")))]
    assert reference_run(program) == {"x": 14, "y": 7}


def test_encoding():
    assert render_value(encode_program([("x", ("#", 1)), ("y", ("var", "x"))])) == \
        "{{`x` '=' {'#' 1}} ';' {`y` '=' {`x`}}}"


def test_generated_programs_respect_bounds():
    rng = random.Random(0)
    for _ in range(200):
        program = random_program(rng)
        assert 1 <= len(program) <= 10
        assert {name for name, _ in program} <= {"x", "y", "z"}
