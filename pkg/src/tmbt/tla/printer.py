"""Render spec-core expressions and specs back to the ASCII TLA+ subset.

The contract is parse(pretty_print(x)) == x, structurally.  Parentheses
are inserted whenever a child binds no tighter than its context, and
comparisons are printed parenthesized under the logical connectives, so
a disjunction of equations comes out as "(b = 0) \\/ (b = 1)".
"""

from __future__ import annotations

from .. import spec as sp
from ..errors import TypeMismatch
from ..values import BOOLEANS, BoolVal, IntVal, SeqVal, SetVal, set_members

# Binding strength as the printer sees it.  Comparisons and quantified
# forms share the loosest level so they are parenthesized under every
# connective; that is safe for parsing (they bind tighter) and matches
# the conventional way these formulas are written.
_LOOSE, _OR, _AND, _NOT, _RANGE, _ADD, _ATOM = range(7)

_COMPARISON_LEXEMES = {
    sp.Eq: "=",
    sp.Neq: "#",
    sp.Lt: "<",
    sp.Le: "<=",
    sp.Gt: ">",
    sp.Ge: ">=",
    sp.NotLt: "\\nless",
    sp.NotLe: "\\nleq",
    sp.NotGt: "\\ngtr",
    sp.NotGe: "\\ngeq",
}

_QUANTIFIER_LEXEMES = {sp.Forall: "\\A", sp.Exists: "\\E", sp.Choose: "CHOOSE"}


def _value_text(v) -> str:
    if isinstance(v, IntVal):
        return str(v.value)
    if isinstance(v, BoolVal):
        return "TRUE" if v.value else "FALSE"
    if v == BOOLEANS:
        return "BOOLEAN"
    if isinstance(v, (SetVal, SeqVal)):
        msg = "only BOOLEAN has a literal form among container constants"
        raise TypeMismatch(msg)
    msg = f"not a value: {v!r}"
    raise TypeMismatch(msg)


def _wrap(text: str, level: int, context: int) -> str:
    return f"({text})" if level < context else text


def _print(expr, context: int) -> str:
    if isinstance(expr, sp.Const):
        return _value_text(expr.value)
    if isinstance(expr, sp.Var):
        return expr.name
    if isinstance(expr, sp.Primed):
        return expr.name + "'"
    if isinstance(expr, sp.Implies):
        text = f"{_print(expr.left, _OR)} => {_print(expr.right, _LOOSE)}"
        return _wrap(text, _LOOSE, context)
    if isinstance(expr, sp.Or):
        text = f"{_print(expr.left, _OR)} \\/ {_print(expr.right, _AND)}"
        return _wrap(text, _OR, context)
    if isinstance(expr, sp.And):
        text = f"{_print(expr.left, _AND)} /\\ {_print(expr.right, _NOT)}"
        return _wrap(text, _AND, context)
    if isinstance(expr, sp.Not):
        return _wrap("~" + _print(expr.operand, _ATOM), _NOT, context)
    if isinstance(expr, sp.In):
        text = f"{_print(expr.element, _RANGE)} \\in {_print(expr.domain, _RANGE)}"
        return _wrap(text, _LOOSE, context)
    if isinstance(expr, tuple(_COMPARISON_LEXEMES)):
        lexeme = _COMPARISON_LEXEMES[type(expr)]
        text = f"{_print(expr.left, _RANGE)} {lexeme} {_print(expr.right, _RANGE)}"
        return _wrap(text, _LOOSE, context)
    if isinstance(expr, sp.IntRange):
        text = f"{_print(expr.low, _ADD)}..{_print(expr.high, _ADD)}"
        return _wrap(text, _RANGE, context)
    if isinstance(expr, (sp.Add, sp.Sub)):
        lexeme = "+" if isinstance(expr, sp.Add) else "-"
        text = f"{_print(expr.left, _ADD)} {lexeme} {_print(expr.right, _ATOM)}"
        return _wrap(text, _ADD, context)
    if isinstance(expr, sp.QUANTIFIERS):
        lexeme = _QUANTIFIER_LEXEMES[type(expr)]
        text = (f"{lexeme} {expr.var} \\in {_print(expr.domain, _RANGE)} : "
                f"{_print(expr.body, _LOOSE)}")
        return _wrap(text, _LOOSE, context)
    if isinstance(expr, sp.SetLit):
        return "{" + ", ".join(_print(i, _LOOSE) for i in expr.items) + "}"
    if isinstance(expr, sp.SeqLit):
        return "<<" + ", ".join(_print(i, _LOOSE) for i in expr.items) + ">>"
    msg = f"not an expression: {expr!r}"
    raise TypeMismatch(msg)


def print_expression(expr) -> str:
    return _print(expr, _LOOSE)


def print_spec(spec: sp.TemporalSpec) -> str:
    """Render a whole spec as a module.

    Actions become their own definitions and Next a bulleted disjunction
    of their names, so to_spec on the reparse recovers the same action
    list.  Integer params have no textual form in the subset and are
    not emitted.
    """
    if not spec.actions:
        msg = "a printable spec needs at least one action"
        raise TypeMismatch(msg)
    lines = []
    if spec.variables:
        lines.append("VARIABLES " + ", ".join(spec.variables))
    for name, formula in spec.invariants:
        lines.append(f"{name} == {print_expression(formula)}")
    lines.append(f"Init == {print_expression(spec.init)}")
    for action in spec.actions:
        lines.append(f"{action.name} == {print_expression(action.formula)}")
    prefix = "Next == "
    bullets = [f"\\/ {action.name}" for action in spec.actions]
    lines.append(prefix + bullets[0])
    lines.extend(" " * len(prefix) + b for b in bullets[1:])
    return "\n".join(lines) + "\n"


def pretty_print(x) -> str:
    """Text form of an expression or a whole TemporalSpec."""
    if isinstance(x, sp.TemporalSpec):
        return print_spec(x)
    return print_expression(x)
