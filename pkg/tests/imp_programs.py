"""Straight-line Imp programs, a reference interpreter for them, and their encoding
as syntax values for the derivation engine."""
import random

from hypothesis import strategies as st

from nasl.values import VInt, VPair, VSymbol, VSyntax

VARIABLES = ["x", "y", "z"]


# programs are lists of (variable, expression); expressions are nested tuples:
# ("#", n) | ("var", name) | ("+", left, right)


def reference_run(program):
    """Direct interpreter for assignments, sequencing and addition."""
    env = {}

    def value(e):
        if e[0] == "#":
            return e[1]
        if e[0] == "var":
            return env[e[1]]
        return value(e[1]) + value(e[2])

    for name, e in program:
        env[name] = value(e)
    return env


def random_expression(rng: random.Random, assigned, depth=3):
    choice = rng.random()
    if depth == 0 or choice < 0.3:
        return ("#", rng.randint(-50, 50))
    if choice < 0.6 and assigned:
        return ("var", rng.choice(sorted(assigned)))
    return ("+", random_expression(rng, assigned, depth - 1), random_expression(rng, assigned, depth - 1))


def random_program(rng: random.Random, max_statements=10):
    assigned, program = set(), []
    for _ in range(rng.randint(1, max_statements)):
        name = rng.choice(VARIABLES)
        program.append((name, random_expression(rng, assigned)))
        assigned.add(name)
    return program


def _expressions(assigned):
    leaves = [st.integers(-50, 50).map(lambda n: ("#", n))]
    if assigned:
        leaves.append(st.sampled_from(sorted(assigned)).map(lambda v: ("var", v)))
    return st.recursive(st.one_of(leaves), lambda sub: st.tuples(st.just("+"), sub, sub), max_leaves=6)


@st.composite
def programs(draw, max_statements=6, allow_unassigned=False):
    """Programs where variables are read only after assignment, unless `allow_unassigned`."""
    assigned, program = set(VARIABLES) if allow_unassigned else set(), []
    for _ in range(draw(st.integers(1, max_statements))):
        name = draw(st.sampled_from(VARIABLES))
        program.append((name, draw(_expressions(assigned))))
        if not allow_unassigned:
            assigned.add(name)
    return program


def encode_expression(e):
    if e[0] == "#":
        return VSyntax(("#", None), (VInt(e[1]),))
    if e[0] == "var":
        return VSyntax((None,), (VSymbol(e[1]),))
    return VSyntax((None, "+", None), (encode_expression(e[1]), encode_expression(e[2])))


def encode_program(program):
    statements = [VSyntax((None, "=", None), (VSymbol(name), encode_expression(e))) for name, e in program]
    result = statements[-1]
    for stm in reversed(statements[:-1]):
        result = VSyntax((None, ";", None), (stm, result))
    return result


def initial_configuration(program, empty_env):
    return VPair(encode_program(program), empty_env)
