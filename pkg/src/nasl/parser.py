"""Recursive-descent parser producing a `Specification`.

Patterns share the expression grammar. Rule patterns are parsed as
expressions and classified once the whole input has been read, because
only then is the full set of union constructors known.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional, Union

from . import model as m
from .deep import deep
from .diagnostics import Diagnostic, ParseError, SourceSpan, error, warning
from .lexer import Token, tokenize

DEF_KEYWORDS = ("domain", "syntax", "let", "system")
SYNC_KEYWORDS = ("domain", "syntax", "system", "evaluate")
COMPARE = m.COMPARE_OPS


class _Fail(Exception):
    def __init__(self, diag: Diagnostic):
        self.diag = diag


class Parser:
    def __init__(self, tokens: list[Token], known_constructors=frozenset()):
        self.toks = tokens
        self.pos = 0
        self.errors: list[Diagnostic] = []
        self.warnings: list[Diagnostic] = []
        self.known_constructors = set(known_constructors)
        self.current_system: Optional[str] = None
        self.in_syntax_expr = 0

    # -- token helpers ---------------------------------------------------

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    @property
    def last(self) -> Token:
        return self.toks[max(self.pos - 1, 0)]

    def at(self, *kinds: str) -> bool:
        return self.peek().kind in kinds

    def advance(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def accept(self, kind: str) -> Optional[Token]:
        return self.advance() if self.at(kind) else None

    def expect(self, kind: str, what: Optional[str] = None) -> Token:
        if self.at(kind):
            return self.advance()
        self.fail([what or f"'{kind}'"])

    def fail(self, expected: list[str]):
        tok = self.peek()
        code = "UnexpectedEOF" if tok.kind == "eof" else "UnexpectedToken"
        wanted = expected[0] if len(expected) == 1 else "one of " + ", ".join(expected)
        raise _Fail(error("parse", code, f"expected {wanted}, found {tok}", tok.span))

    def span(self, start: Token) -> SourceSpan:
        end = self.last if self.pos > 0 else start
        if (end.span.line_end, end.span.col_end) < (start.span.line_start, start.span.col_start):
            end = start
        return start.span.merge(end.span)

    def split_token(self, first: str):
        """Split a two-character token so that its first character is consumed alone."""
        tok = self.peek()
        rest = tok.lexeme[len(first):]
        s = tok.span
        head = Token(first, first, SourceSpan(s.file, s.line_start, s.col_start, s.line_start, s.col_start))
        tail_col = s.col_start + len(first)
        tail = Token(rest, rest, SourceSpan(s.file, s.line_start, tail_col, s.line_end, s.col_end))
        self.toks[self.pos:self.pos + 1] = [head, tail]

    # -- top level -------------------------------------------------------

    def specification(self) -> m.Specification:
        domains, syntaxes, lets, systems, evaluations = [], [], [], [], []
        while not self.at("eof"):
            start = self.pos
            try:
                if self.at("evaluate"):
                    evaluations.append(self.evaluation())
                elif self.at(*DEF_KEYWORDS):
                    misplaced = bool(evaluations)
                    node = self.definition()
                    if misplaced:
                        self.errors.append(error(
                            "parse", "DefinitionAfterEvaluation",
                            "definitions must precede all evaluations", node.span))
                    bucket = {m.DomainDef: domains, m.SyntaxDef: syntaxes, m.LetDef: lets,
                              m.TransitionSystem: systems}[type(node)]
                    bucket.append(node)
                else:
                    self.fail(["a definition", "'evaluate'"])
            except _Fail as exc:
                self.errors.append(exc.diag)
                self.synchronize(start)
        spec = m.Specification(tuple(domains), tuple(syntaxes), tuple(lets), tuple(systems), tuple(evaluations))
        return spec

    def synchronize(self, start: int):
        if self.pos == start:
            self.advance()
        while not self.at("eof"):
            if self.at(";", "end"):
                self.advance()
                return
            if self.at(*SYNC_KEYWORDS):
                return
            self.advance()

    def definition(self):
        if self.at("domain"):
            return self.domain_def()
        if self.at("syntax"):
            return self.syntax_def()
        if self.at("let"):
            return self.let_def()
        return self.system_def()

    # -- definitions -----------------------------------------------------

    def domain_def(self) -> m.DomainDef:
        start = self.expect("domain")
        name = self.expect("ident", "a domain name").lexeme
        self.expect("=")
        if self.at("{"):
            self.advance()
            ctors = [self.constructor()]
            while self.accept("+"):
                ctors.append(self.constructor())
            self.expect("}")
            body = tuple(ctors)
        else:
            body = self.type_()
        self.expect(";")
        return m.DomainDef(name, body, span=self.span(start))

    def constructor(self) -> m.Constructor:
        tok = self.expect("ident", "a constructor name")
        payload = self.type_() if self.accept(":") else None
        return m.Constructor(tok.lexeme, payload, span=self.span(tok))

    def syntax_def(self) -> m.SyntaxDef:
        start = self.expect("syntax")
        name = self.expect("ident", "a syntax category name").lexeme
        self.expect("=")
        prods = [self.production()]
        while self.accept("|"):
            prods.append(self.production())
        self.expect(";")
        return m.SyntaxDef(name, tuple(prods), span=self.span(start))

    def production(self) -> m.Production:
        start = self.peek()
        items = []
        while not self.at("|", ";", "eof"):
            tok = self.peek()
            if self.at("terminal"):
                self.advance()
                items.append(m.Terminal(tok.lexeme, span=tok.span))
            else:
                items.append(m.Hole(self.type_atom(), span=self.span(tok)))
        if not items:
            self.fail(["a terminal or a domain"])
        return m.Production(tuple(items), span=self.span(start))

    def let_def(self) -> m.LetDef:
        start = self.expect("let")
        name = self.expect("ident", "a name").lexeme
        self.expect("=")
        expr = self.expr()
        self.expect(";")
        return m.LetDef(name, expr, span=self.span(start))

    def system_def(self) -> m.TransitionSystem:
        start = self.expect("system")
        name = self.expect("ident", "a system name").lexeme
        self.expect(":")
        first = self.type_()
        antecedent = None
        if self.accept("|-"):
            antecedent, first = first, self.type_()
        self.expect("==>")
        final = self.type_()
        self.expect("=")
        rules = []
        self.current_system = name
        while not self.at("end"):
            if self.at("eof"):
                self.fail(["'[['", "'end'"])
            rule_start = self.pos
            try:
                rules.append(self.rule())
            except _Fail as exc:
                self.errors.append(exc.diag)
                if self.pos == rule_start:
                    self.advance()
                while not self.at(";", "end", "[[", "eof"):
                    self.advance()
                self.accept(";")
        self.expect("end")
        self.current_system = None
        return m.TransitionSystem(name, antecedent, first, final, tuple(rules), span=self.span(start))

    def rule(self) -> m.Rule:
        start = self.expect("[[", "a rule label '[['")
        label = self.expect("label").lexeme
        self.expect("]]")
        self.expect(":")
        initial = self.expr()
        antecedent = None
        if self.accept("|-"):
            antecedent, initial = initial, self.expr()
        self.expect("==>")
        final = self.expr()
        premises = []
        if self.accept("\\\\"):
            premises.append(self.premise())
            while self.accept(","):
                premises.append(self.premise())
        self.expect(";")
        # patterns are still expressions here; see _Resolver
        return m.Rule(label, antecedent, initial, final, tuple(premises), span=self.span(start))

    def premise(self) -> m.Premise:
        start = self.peek()
        if self.accept("if"):
            return m.SideCondition(self.expr(), span=self.span(start))
        if self.accept("let"):
            pat = self.expr()
            self.expect("=")
            return m.LocalDef(pat, self.expr(), span=self.span(start))
        initial = self.expr()
        antecedent = None
        if self.accept("|-"):
            antecedent, initial = initial, self.expr()
        if self.accept("==>"):
            target, explicit = self.current_system, False
        elif self.at("named_arrow"):
            target, explicit = self.advance().lexeme, True
        else:
            self.fail(["'|-'", "'==>'", "'=Name=>'"])
        final = self.expr()
        return m.Transition(target, antecedent, initial, final, explicit, span=self.span(start))

    def evaluation(self) -> m.Evaluation:
        start = self.expect("evaluate")
        initial = self.expr()
        antecedent = None
        if self.accept("|-"):
            antecedent, initial = initial, self.expr()
        self.expect("in")
        system = self.expect("ident", "a system name").lexeme
        self.accept(";")
        return m.Evaluation(antecedent, initial, system, span=self.span(start))

    # -- types -----------------------------------------------------------

    def type_(self) -> m.TypeExpr:
        start = self.peek()
        left = self.product_type()
        if self.accept("->"):
            return m.TArrow(left, self.type_(), span=self.span(start))
        return left

    def product_type(self) -> m.TypeExpr:
        start = self.peek()
        left = self.type_atom()
        if self.accept("*"):
            return m.TProduct(left, self.product_type(), span=self.span(start))
        return left

    def type_atom(self) -> m.TypeExpr:
        tok = self.peek()
        if self.accept("basic"):
            return m.TBasic(tok.lexeme, span=tok.span)
        if self.accept("ident"):
            return m.TNamed(tok.lexeme, span=tok.span)
        if self.accept("("):
            inner = self.type_()
            self.expect(")")
            return dataclasses.replace(inner, span=self.span(tok))
        if self.at("{"):
            raise _Fail(error("parse", "InlineUnion",
                              "union bodies may only appear in domain definitions; name it with 'domain'",
                              tok.span))
        self.fail(["a domain"])

    # -- expressions -----------------------------------------------------

    def expr(self) -> m.Expr:
        if self.at("\\"):
            start = self.advance()
            param = self.expect("ident", "a parameter name").lexeme
            self.expect(":")
            ptype = self.type_()
            self.expect(".")
            body = self.expr()
            return m.Lambda(param, ptype, body, span=self.span(start))
        return self.comparison()

    def comparison(self) -> m.Expr:
        start = self.peek()
        left = self.additive()
        if self.at(*COMPARE):
            op = self.advance().kind
            right = self.additive()
            return m.BinOp(op, left, right, span=self.span(start))
        return left

    def additive(self) -> m.Expr:
        start = self.peek()
        left = self.multiplicative()
        while self.at("+", "-"):
            op = self.advance().kind
            left = m.BinOp(op, left, self.multiplicative(), span=self.span(start))
        return left

    def multiplicative(self) -> m.Expr:
        start = self.peek()
        left = self.postfix()
        while self.at("*"):
            self.advance()
            left = m.BinOp("*", left, self.postfix(), span=self.span(start))
        return left

    def _adjacent(self) -> bool:
        # inside syntax braces juxtaposition separates items, so a call or
        # update must touch the expression it applies to
        if not self.in_syntax_expr:
            return True
        prev, nxt = self.last.span, self.peek().span
        return prev.line_end == nxt.line_start and prev.col_end + 1 == nxt.col_start

    def postfix(self) -> m.Expr:
        start = self.peek()
        node = self.atom()
        while True:
            if self.at("(") and self._adjacent():
                self.advance()
                arg = self.tuple_tail(self.last)
                node = m.Apply(node, arg, span=self.span(start))
            elif self.at("[") and self._adjacent():
                self.advance()
                saved, self.in_syntax_expr = self.in_syntax_expr, 0
                key = self.expr()
                self.expect("->")
                value = self.expr()
                self.in_syntax_expr = saved
                if self.at("]]"):
                    self.split_token("]")
                self.expect("]")
                node = m.Update(node, key, value, span=self.span(start))
            else:
                return node

    def tuple_tail(self, open_tok: Token) -> m.Expr:
        """Parse `e {, e} )` after an opening parenthesis; commas build right-nested pairs."""
        saved = self.in_syntax_expr
        self.in_syntax_expr = 0
        items = [self.expr()]
        while self.accept(","):
            items.append(self.expr())
        self.in_syntax_expr = saved
        self.expect(")")
        span = self.span(open_tok)
        if len(items) == 1:
            return dataclasses.replace(items[0], span=span)
        result = items[-1]
        for item in reversed(items[:-1]):
            result = m.Pair(item, result, span=item.span.merge(span))
        return dataclasses.replace(result, span=span)

    def atom(self) -> m.Expr:
        tok = self.peek()
        kind = tok.kind
        if kind == "int":
            self.advance()
            return m.IntLit(int(tok.lexeme), span=tok.span)
        if kind == "string":
            self.advance()
            return m.StringLit(tok.lexeme, span=tok.span)
        if kind == "symbol":
            self.advance()
            return m.SymbolLit(tok.lexeme, span=tok.span)
        if kind == "terminal":
            self.advance()
            self.warnings.append(warning(
                "parse", "SingleQuotedSymbol",
                f"'{tok.lexeme}' outside a syntax expression is read as the symbol `{tok.lexeme}`; "
                "write symbols with back-ticks", tok.span))
            return m.SymbolLit(tok.lexeme, span=tok.span)
        if kind in ("true", "false"):
            self.advance()
            return m.BoolLit(kind == "true", span=tok.span)
        if kind == "ident":
            self.advance()
            return m.Var(tok.lexeme, span=tok.span)
        if kind == "-|":
            self.advance()
            annotated = self.type_()
            self.expect("|", "'|' closing the bottom annotation")
            return m.Bottom(annotated, span=self.span(tok))
        if kind == "(":
            self.advance()
            return self.tuple_tail(tok)
        if kind == "{":
            return self.syntax_expr()
        if kind == "\\":
            return self.expr()
        self.fail(["an expression"])

    def syntax_expr(self) -> m.SyntaxExpr:
        start = self.expect("{")
        shape, args = [], []
        self.in_syntax_expr += 1
        while not self.at("}"):
            if self.at("terminal"):
                shape.append(self.advance().lexeme)
            elif self.at("eof", ";"):
                self.fail(["'}'"])
            else:
                shape.append(None)
                args.append(self.comparison() if not self.at("\\") else self.expr())
        self.in_syntax_expr -= 1
        self.advance()
        if not shape:
            raise _Fail(error("parse", "EmptySyntaxExpression", "empty syntax expression", self.span(start)))
        return m.SyntaxExpr(tuple(shape), tuple(args), span=self.span(start))


# -- post-parse resolution ---------------------------------------------------


def _flatten_pairs(e):
    items = []
    while isinstance(e, m.Pair):
        items.append(e.left)
        e = e.right
    items.append(e)
    return items


class _Resolver:
    """Turns constructor references into CtorApply and rule patterns into Patterns."""

    def __init__(self, constructors: set[str]):
        self.ctors = constructors
        self.errors: list[Diagnostic] = []

    def expr(self, e: m.Expr) -> m.Expr:
        if isinstance(e, m.Var):
            if e.name == "_":
                self.errors.append(error("parse", "WildcardInExpression",
                                         "the wildcard '_' may only appear in patterns", e.span))
            if e.name in self.ctors:
                return m.CtorApply(e.name, (), span=e.span)
            return e
        if isinstance(e, m.Apply):
            if isinstance(e.fn, m.Var) and e.fn.name in self.ctors:
                args = tuple(self.expr(a) for a in _flatten_pairs(e.arg))
                return m.CtorApply(e.fn.name, args, span=e.span)
            return m.Apply(self.expr(e.fn), self.expr(e.arg), span=e.span)
        if isinstance(e, m.Lambda):
            if e.param in self.ctors:
                self.errors.append(error("parse", "ConstructorAsVariable",
                                         f"constructor {e.param} cannot be used as a parameter name", e.span))
            return dataclasses.replace(e, body=self.expr(e.body))
        if isinstance(e, m.Update):
            return dataclasses.replace(e, fn=self.expr(e.fn), key=self.expr(e.key), value=self.expr(e.value))
        if isinstance(e, (m.Pair, m.BinOp)):
            return dataclasses.replace(e, left=self.expr(e.left), right=self.expr(e.right))
        if isinstance(e, (m.CtorApply, m.SyntaxExpr)):
            return dataclasses.replace(e, args=tuple(self.expr(a) for a in e.args))
        return e

    def pattern(self, e: m.Expr) -> m.Pattern:
        sp = e.span
        if isinstance(e, m.Var):
            if e.name == "_":
                return m.PWildcard(span=sp)
            if e.name in self.ctors:
                return m.PCtor(e.name, (), span=sp)
            return m.PVar(e.name, span=sp)
        if isinstance(e, m.IntLit):
            return m.PIntLit(e.value, span=sp)
        if isinstance(e, m.StringLit):
            return m.PStringLit(e.value, span=sp)
        if isinstance(e, m.BoolLit):
            return m.PBoolLit(e.value, span=sp)
        if isinstance(e, m.SymbolLit):
            return m.PSymbolLit(e.value, span=sp)
        if isinstance(e, m.Pair):
            return m.PPair(self.pattern(e.left), self.pattern(e.right), span=sp)
        if isinstance(e, m.Apply) and isinstance(e.fn, m.Var) and e.fn.name in self.ctors:
            return m.PCtor(e.fn.name, tuple(self.pattern(a) for a in _flatten_pairs(e.arg)), span=sp)
        if isinstance(e, m.CtorApply):
            return m.PCtor(e.name, tuple(self.pattern(a) for a in e.args), span=sp)
        if isinstance(e, m.SyntaxExpr):
            return m.PSyntax(e.shape, tuple(self.pattern(a) for a in e.args), span=sp)
        self.errors.append(error("parse", "InvalidPattern", "not a valid pattern", sp, [
            ("patterns are built from variables, constants, pairs, and constructors", None)]))
        return m.PWildcard(span=sp)

    def premise(self, p: m.Premise) -> m.Premise:
        if isinstance(p, m.Transition):
            ante = self.expr(p.antecedent) if p.antecedent is not None else None
            return dataclasses.replace(p, antecedent=ante, initial=self.expr(p.initial), final=self.pattern(p.final))
        if isinstance(p, m.SideCondition):
            return dataclasses.replace(p, cond=self.expr(p.cond))
        return dataclasses.replace(p, pattern=self.pattern(p.pattern), rhs=self.expr(p.rhs))

    def rule(self, r: m.Rule) -> m.Rule:
        ante = self.pattern(r.antecedent) if r.antecedent is not None else None
        return dataclasses.replace(
            r, antecedent=ante, initial=self.pattern(r.initial), final=self.expr(r.final),
            premises=tuple(self.premise(p) for p in r.premises))

    def specification(self, spec: m.Specification) -> m.Specification:
        return dataclasses.replace(
            spec,
            lets=tuple(dataclasses.replace(l, expr=self.expr(l.expr)) for l in spec.lets),
            systems=tuple(dataclasses.replace(s, rules=tuple(self.rule(r) for r in s.rules)) for s in spec.systems),
            evaluations=tuple(self.evaluation(ev) for ev in spec.evaluations),
        )

    def evaluation(self, ev: m.Evaluation) -> m.Evaluation:
        ante = self.expr(ev.antecedent) if ev.antecedent is not None else None
        return dataclasses.replace(ev, antecedent=ante, initial=self.expr(ev.initial))


@deep
def parse_specification(tokens: list[Token], known_constructors=frozenset()) -> m.Specification:
    """Parse a token list; raises ParseError listing every error found."""
    parser = Parser(tokens, known_constructors)
    spec = parser.specification()
    resolver = _Resolver(spec.constructor_names() | set(known_constructors))
    spec = resolver.specification(spec)
    errors = parser.errors + resolver.errors
    if errors:
        raise ParseError(errors)
    return dataclasses.replace(spec, warnings=tuple(parser.warnings))


def parse_source(source: str, file: str = "<input>", known_constructors=frozenset()) -> m.Specification:
    return parse_specification(tokenize(source, file), known_constructors)


# -- REPL items ----------------------------------------------------------------


@dataclass(frozen=True)
class ReplCommand:
    name: str  # "quit" | "load" | "latex"
    argument: str = ""


@dataclass(frozen=True)
class ReplDefinition:
    fragment: m.Specification

    @property
    def node(self):
        f = self.fragment
        return (f.domains + f.syntaxes + f.lets + f.systems)[0]


@dataclass(frozen=True)
class ReplEvaluation:
    evaluation: m.Evaluation
    fragment: m.Specification


ReplItem = Union[ReplCommand, ReplDefinition, ReplEvaluation]
REPL_COMMANDS = {"quit": False, "load": True, "latex": True}


def parse_repl_input(line: str, ctx: m.Specification, file: str = "<repl>") -> ReplItem:
    text = line.strip()
    if text.startswith(":"):
        name, _, arg = text[1:].partition(" ")
        arg = arg.strip()
        if name not in REPL_COMMANDS or REPL_COMMANDS[name] != bool(arg):
            span = SourceSpan(file, 1, 1, 1, max(len(text), 1))
            raise ParseError([error("parse", "UnknownCommand",
                                    f"unknown command {text!r}; try :quit, :load <file> or :latex <file>", span)])
        return ReplCommand(name, arg)
    fragment = parse_source(line, file, ctx.constructor_names())
    defs = fragment.domains + fragment.syntaxes + fragment.lets + fragment.systems
    count = len(defs) + len(fragment.evaluations)
    if count != 1:
        eof = tokenize(line, file)[-1].span
        raise ParseError([error("parse", "ExpectedSingleItem",
                                "expected exactly one definition or evaluation per input", eof)])
    if fragment.evaluations:
        return ReplEvaluation(fragment.evaluations[0], fragment)
    return ReplDefinition(fragment)
