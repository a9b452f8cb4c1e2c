"""Parser for the ASCII TLA+ subset, producing spec-core expression trees.

Layout drives the grammar in one place: a /\\ or \\/ token in operand
position opens a bulleted junction list whose column is the bullet's
column.  A later bullet of the same kind at exactly that column adds an
item; any token at or left of that column ends the list.  Items parse
at full expression level, so the enclosing column acts as a fence that
every operator and operand consumption respects.

Operator precedence, loosest first: =>, \\/, /\\, ~, comparisons,
.., + and -.  Quantifier and CHOOSE bodies extend maximally right.
"""

from __future__ import annotations

import dataclasses

from .. import spec as sp
from ..errors import (
    MissingDefinition,
    ParseError,
    PrimedInStateFormula,
    UnboundVariable,
    UnsupportedConstruct,
)
from ..values import BOOLEANS, FALSE, TRUE, IntVal
from .lexer import RESERVED, Token, tokenize

_COMPARISON_OPS = {
    "=": sp.Eq,
    "/=": sp.Neq,
    "#": sp.Neq,
    "<": sp.Lt,
    "<=": sp.Le,
    ">": sp.Gt,
    ">=": sp.Ge,
    "\\nless": sp.NotLt,
    "\\nleq": sp.NotLe,
    "\\ngtr": sp.NotGt,
    "\\ngeq": sp.NotGe,
    "\\ngeqslant": sp.NotGe,
    "\\in": sp.In,
}

_NO_FENCE = -1


@dataclasses.dataclass(frozen=True)
class Ref:
    """Reference to a prior definition; removed by expansion."""

    name: str


@dataclasses.dataclass(frozen=True)
class ParsedModule:
    """Declarations plus definitions in source order.

    Definition bodies may contain Ref nodes for uses of earlier
    definitions; definition_map() returns them fully expanded into
    plain spec-core expressions.
    """

    variables: tuple
    definitions: tuple  # (name, Expr-with-Refs) in source order
    diagnostics: tuple = ()

    def names(self) -> tuple:
        return tuple(name for name, _ in self.definitions)

    def raw(self, name: str):
        for key, body in self.definitions:
            if key == name:
                return body
        raise MissingDefinition(f"no definition named {name!r}")

    def expand(self, expr) -> "sp.Expr":
        return _expand(expr, dict(self.definitions), {})

    def definition_map(self) -> dict:
        memo: dict = {}
        raw = dict(self.definitions)
        return {name: _expand(body, raw, memo) for name, body in self.definitions}


def _expand(expr, raw: dict, memo: dict):
    if isinstance(expr, Ref):
        if expr.name not in memo:
            memo[expr.name] = _expand(raw[expr.name], raw, memo)
        return memo[expr.name]
    if isinstance(expr, (sp.Const, sp.Var, sp.Primed)):
        return expr
    if isinstance(expr, sp.Not):
        return sp.Not(_expand(expr.operand, raw, memo))
    if isinstance(expr, (sp.SetLit, sp.SeqLit)):
        items = tuple(_expand(item, raw, memo) for item in expr.items)
        return type(expr)(items)
    if isinstance(expr, sp.IntRange):
        return sp.IntRange(_expand(expr.low, raw, memo),
                           _expand(expr.high, raw, memo))
    if isinstance(expr, sp.In):
        return sp.In(_expand(expr.element, raw, memo),
                     _expand(expr.domain, raw, memo))
    if isinstance(expr, sp.QUANTIFIERS):
        return type(expr)(expr.var,
                          _expand(expr.domain, raw, memo),
                          _expand(expr.body, raw, memo))
    return type(expr)(_expand(expr.left, raw, memo),
                      _expand(expr.right, raw, memo))


class TokenStream:
    """Cursor over a token list that skips layout tokens transparently."""

    def __init__(self, tokens):
        self.tokens = [t for t in tokens if t.kind != "layout"]
        self.pos = 0
        if tokens:
            last = tokens[-1]
            self._end = (last.line, last.col + len(last.lexeme))
        else:
            self._end = (1, 0)

    def peek(self, ahead: int = 0):
        index = self.pos + ahead
        if index < len(self.tokens):
            return self.tokens[index]
        return None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", *self._end)
        self.pos += 1
        return tok

    def at_op(self, *lexemes: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "op" and tok.lexeme in lexemes

    def expect_op(self, lexeme: str) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != "op" or tok.lexeme != lexeme:
            found = str(tok) if tok else "end of input"
            line, col = (tok.line, tok.col) if tok else self._end
            raise ParseError(f"expected {lexeme!r}, found {found}", line, col)
        return self.next()

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        line, col = (tok.line, tok.col) if tok else self._end
        return ParseError(message, line, col)


class _ExprParser:
    """Recursive-descent expression grammar over a TokenStream.

    `resolve` maps a free identifier to an expression; module parsing
    passes a strict resolver, standalone expression parsing treats any
    identifier as a state variable.
    """

    def __init__(self, stream: TokenStream, resolve):
        self.stream = stream
        self.resolve = resolve
        self.bound: list = []

    # Each level consumes an operator token only when its column is
    # strictly right of the innermost enclosing bullet column.

    def expression(self, fence: int) -> sp.Expr:
        left = self.disjunction(fence)
        if self.stream.at_op("=>") and self.stream.peek().col > fence:
            self.stream.next()
            return sp.Implies(left, self.expression(fence))
        return left

    def disjunction(self, fence: int) -> sp.Expr:
        left = self.conjunction(fence)
        while self.stream.at_op("\\/") and self.stream.peek().col > fence:
            self.stream.next()
            left = sp.Or(left, self.conjunction(fence))
        return left

    def conjunction(self, fence: int) -> sp.Expr:
        left = self.unary(fence)
        while self.stream.at_op("/\\") and self.stream.peek().col > fence:
            self.stream.next()
            left = sp.And(left, self.unary(fence))
        return left

    def unary(self, fence: int) -> sp.Expr:
        guard = self.stream.peek()
        if guard is not None and guard.col <= fence:
            raise self.stream.error("expected an expression")
        if self.stream.at_op("~"):
            self.stream.next()
            return sp.Not(self.unary(fence))
        if self.stream.at_op("\\A", "\\E"):
            return self.quantified(fence)
        tok = self.stream.peek()
        if tok is not None and tok.kind == "keyword" and tok.lexeme == "CHOOSE":
            return self.quantified(fence)
        if self.stream.at_op("/\\", "\\/"):
            if tok.col <= fence:
                raise self.stream.error("expected an expression")
            return self.junction_list(tok.lexeme, tok.col)
        return self.comparison(fence)

    def junction_list(self, bullet: str, col: int) -> sp.Expr:
        items = []
        while self.stream.at_op(bullet) and self.stream.peek().col == col:
            self.stream.next()
            items.append(self.expression(col))
        combine = sp.conj if bullet == "/\\" else sp.disj
        return combine(*items)

    def quantified(self, fence: int) -> sp.Expr:
        head = self.stream.next()
        kinds = {"\\A": sp.Forall, "\\E": sp.Exists, "CHOOSE": sp.Choose}
        node = kinds[head.lexeme]
        name_tok = self.stream.peek()
        if name_tok is None or name_tok.kind != "ident":
            raise self.stream.error(f"expected a bound variable after {head.lexeme}")
        self.stream.next()
        self.stream.expect_op("\\in")
        domain = self.range_expr(fence)
        self.stream.expect_op(":")
        self.bound.append(name_tok.lexeme)
        try:
            body = self.expression(fence)
        finally:
            self.bound.pop()
        return node(name_tok.lexeme, domain, body)

    def comparison(self, fence: int) -> sp.Expr:
        left = self.range_expr(fence)
        tok = self.stream.peek()
        if (tok is not None and tok.kind == "op"
                and tok.lexeme in _COMPARISON_OPS and tok.col > fence):
            self.stream.next()
            right = self.range_expr(fence)
            return _COMPARISON_OPS[tok.lexeme](left, right)
        return left

    def range_expr(self, fence: int) -> sp.Expr:
        left = self.additive(fence)
        if self.stream.at_op("..") and self.stream.peek().col > fence:
            self.stream.next()
            return sp.IntRange(left, self.additive(fence))
        return left

    def additive(self, fence: int) -> sp.Expr:
        left = self.primary(fence)
        while self.stream.at_op("+", "-") and self.stream.peek().col > fence:
            op = self.stream.next()
            right = self.primary(fence)
            left = sp.Add(left, right) if op.lexeme == "+" else sp.Sub(left, right)
        return left

    def primary(self, fence: int) -> sp.Expr:
        tok = self.stream.peek()
        if tok is None or tok.col <= fence:
            raise self.stream.error("expected an expression")
        if tok.kind == "int":
            self.stream.next()
            return sp.Const(IntVal(int(tok.lexeme)))
        if tok.kind == "op" and tok.lexeme == "-":
            self.stream.next()
            number = self.stream.peek()
            if number is None or number.kind != "int":
                raise self.stream.error("expected an integer after unary '-'")
            self.stream.next()
            return sp.Const(IntVal(-int(number.lexeme)))
        if tok.kind == "keyword":
            self.stream.next()
            if tok.lexeme == "TRUE":
                return sp.Const(TRUE)
            if tok.lexeme == "FALSE":
                return sp.Const(FALSE)
            if tok.lexeme == "BOOLEAN":
                return sp.Const(BOOLEANS)
            raise ParseError(f"{tok.lexeme} cannot start an expression",
                             tok.line, tok.col)
        if tok.kind == "ident":
            self.stream.next()
            if tok.lexeme in RESERVED:
                msg = f"{tok.lexeme} is outside the supported subset"
                raise UnsupportedConstruct(msg, tok.line, tok.col)
            if self.stream.at_op("'"):
                self.stream.next()
                return sp.Primed(tok.lexeme)
            if tok.lexeme in self.bound:
                return sp.Var(tok.lexeme)
            return self.resolve(tok)
        if tok.kind == "op" and tok.lexeme == "(":
            self.stream.next()
            inner = self.expression(_NO_FENCE)
            self.stream.expect_op(")")
            return inner
        if tok.kind == "op" and tok.lexeme == "{":
            self.stream.next()
            return sp.SetLit(self.item_list("}"))
        if tok.kind == "op" and tok.lexeme == "<<":
            self.stream.next()
            return sp.SeqLit(self.item_list(">>"))
        raise self.stream.error(f"expected an expression, found {tok}")

    def item_list(self, closer: str) -> list:
        items: list = []
        if self.stream.at_op(closer):
            self.stream.next()
            return items
        items.append(self.expression(_NO_FENCE))
        while self.stream.at_op(","):
            self.stream.next()
            items.append(self.expression(_NO_FENCE))
        self.stream.expect_op(closer)
        return items


def parse_expression(source: str) -> sp.Expr:
    """Parse a standalone expression; free identifiers become variables."""
    stream = TokenStream(tokenize(source))
    parser = _ExprParser(stream, lambda tok: sp.Var(tok.lexeme))
    expr = parser.expression(_NO_FENCE)
    if stream.peek() is not None:
        raise stream.error(f"trailing input, found {stream.peek()}")
    return expr


def parse(tokens) -> ParsedModule:
    """Parse a module: VARIABLE declarations and `Name == body` definitions."""
    stream = TokenStream(tokens)
    variables: list = []
    definitions: list = []
    known = set()

    def resolve(tok: Token) -> sp.Expr:
        if tok.lexeme in variables:
            return sp.Var(tok.lexeme)
        if tok.lexeme in known:
            return Ref(tok.lexeme)
        msg = f"unknown identifier {tok.lexeme!r}"
        raise ParseError(msg, tok.line, tok.col)

    parser = _ExprParser(stream, resolve)
    while stream.peek() is not None:
        tok = stream.peek()
        if tok.kind == "keyword" and tok.lexeme in ("VARIABLE", "VARIABLES"):
            stream.next()
            while True:
                name = stream.peek()
                if name is None or name.kind != "ident":
                    raise stream.error("expected a variable name")
                stream.next()
                if name.lexeme in RESERVED:
                    msg = f"{name.lexeme} is outside the supported subset"
                    raise UnsupportedConstruct(msg, name.line, name.col)
                if name.lexeme in variables:
                    raise ParseError(f"variable {name.lexeme} declared twice",
                                     name.line, name.col)
                variables.append(name.lexeme)
                if not stream.at_op(","):
                    break
                stream.next()
            continue
        if tok.kind == "ident":
            if tok.lexeme in RESERVED:
                msg = f"{tok.lexeme} is outside the supported subset"
                raise UnsupportedConstruct(msg, tok.line, tok.col)
            after = stream.peek(1)
            if after is not None and after.kind == "op" and after.lexeme == "==":
                stream.next()
                stream.next()
                if tok.lexeme in known or tok.lexeme in variables:
                    raise ParseError(f"{tok.lexeme} is already defined",
                                     tok.line, tok.col)
                body = parser.expression(_NO_FENCE)
                known.add(tok.lexeme)
                definitions.append((tok.lexeme, body))
                continue
        raise stream.error(f"expected a declaration or definition, found {tok}")

    module = ParsedModule(tuple(variables), tuple(definitions))
    module.definition_map()  # force expansion so unresolved refs cannot escape
    return module


def parse_module(source: str) -> ParsedModule:
    return parse(tokenize(source))


def _spine(expr) -> list:
    """Disjuncts of the top-level \\/ structure, left to right."""
    if isinstance(expr, sp.Or):
        return _spine(expr.left) + _spine(expr.right)
    return [expr]


def to_spec(module: ParsedModule, name: str = "module",
            init_name: str = "Init", next_name: str = "Next",
            type_ok_name: str = "TypeOK",
            invariant_names: tuple = ()) -> sp.TemporalSpec:
    """Assemble a TemporalSpec from a parsed module.

    The top-level disjunction of the Next definition becomes the action
    list; a disjunct that is a bare reference keeps that definition's
    name, anything else is auto-named A1..An.  TypeOK (when defined)
    and every definition in invariant_names become named invariants.
    """
    defined = set(module.names())
    for required in (init_name, next_name):
        if required not in defined:
            raise MissingDefinition(f"no definition named {required!r}")

    actions = []
    for index, disjunct in enumerate(_spine(module.raw(next_name)), start=1):
        if isinstance(disjunct, Ref):
            actions.append(sp.NamedAction(disjunct.name, module.expand(disjunct)))
        else:
            actions.append(sp.NamedAction(f"A{index}", module.expand(disjunct)))

    invariants = []
    if type_ok_name in defined:
        invariants.append((type_ok_name, module.expand(module.raw(type_ok_name))))
    for inv_name in invariant_names:
        if inv_name not in defined:
            raise MissingDefinition(f"no definition named {inv_name!r}")
        if inv_name != type_ok_name:
            invariants.append((inv_name, module.expand(module.raw(inv_name))))

    spec = sp.TemporalSpec(
        name=name,
        variables=module.variables,
        init=module.expand(module.raw(init_name)),
        actions=actions,
        invariants=invariants,
    )
    problems = sp.well_formed(spec)
    if problems:
        first = problems[0]
        if first.code == "primed-in-state-formula":
            raise PrimedInStateFormula(str(first))
        if first.code == "unbound-variable":
            raise UnboundVariable(str(first))
        raise ParseError(str(first))
    return spec
