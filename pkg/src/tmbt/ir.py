"""Canonical JSON form of a TemporalSpec.

The layout is documented by the bundled JSON Schema (spec_ir.schema.json).
Serialization sorts object keys so output is bit-stable and suitable for
golden-file comparison.
"""

from __future__ import annotations

import json
from importlib import resources

from . import spec as sp
from .errors import TypeMismatch
from .values import value_from_json, value_to_json

SCHEMA_RESOURCE = "spec_ir.schema.json"

_BINARY_OPS = {
    sp.And: "and", sp.Or: "or", sp.Implies: "implies",
    sp.Eq: "eq", sp.Neq: "neq",
    sp.Lt: "lt", sp.Le: "le", sp.Gt: "gt", sp.Ge: "ge",
    sp.NotLt: "not_lt", sp.NotLe: "not_le",
    sp.NotGt: "not_gt", sp.NotGe: "not_ge",
    sp.Add: "add", sp.Sub: "sub",
}
_BINARY_TYPES = {name: cls for cls, name in _BINARY_OPS.items()}
_QUANTIFIER_OPS = {sp.Forall: "forall", sp.Exists: "exists", sp.Choose: "choose"}
_QUANTIFIER_TYPES = {name: cls for cls, name in _QUANTIFIER_OPS.items()}


def expr_to_json(expr) -> dict:
    if isinstance(expr, sp.Const):
        return {"op": "const", "value": value_to_json(expr.value)}
    if isinstance(expr, sp.Var):
        return {"op": "var", "name": expr.name}
    if isinstance(expr, sp.Primed):
        return {"op": "primed", "name": expr.name}
    if isinstance(expr, sp.Not):
        return {"op": "not", "args": [expr_to_json(expr.operand)]}
    if isinstance(expr, sp.In):
        return {"op": "in", "args": [expr_to_json(expr.element),
                                     expr_to_json(expr.domain)]}
    if isinstance(expr, sp.SetLit):
        return {"op": "set", "args": [expr_to_json(i) for i in expr.items]}
    if isinstance(expr, sp.SeqLit):
        return {"op": "seq", "args": [expr_to_json(i) for i in expr.items]}
    if isinstance(expr, sp.IntRange):
        return {"op": "range", "args": [expr_to_json(expr.low),
                                        expr_to_json(expr.high)]}
    if isinstance(expr, sp.QUANTIFIERS):
        return {
            "op": _QUANTIFIER_OPS[type(expr)],
            "var": expr.var,
            "args": [expr_to_json(expr.domain), expr_to_json(expr.body)],
        }
    op = _BINARY_OPS.get(type(expr))
    if op is None:
        msg = f"not an expression: {expr!r}"
        raise TypeMismatch(msg)
    return {"op": op, "args": [expr_to_json(expr.left), expr_to_json(expr.right)]}


def expr_from_json(data: dict):
    if not isinstance(data, dict) or "op" not in data:
        msg = f"malformed expression node: {data!r}"
        raise TypeMismatch(msg)
    op = data["op"]
    if op == "const":
        return sp.Const(value_from_json(data["value"]))
    if op == "var":
        return sp.Var(data["name"])
    if op == "primed":
        return sp.Primed(data["name"])
    args = [expr_from_json(a) for a in data.get("args", [])]
    if op == "not":
        return sp.Not(args[0])
    if op == "in":
        return sp.In(args[0], args[1])
    if op == "set":
        return sp.SetLit(args)
    if op == "seq":
        return sp.SeqLit(args)
    if op == "range":
        return sp.IntRange(args[0], args[1])
    if op in _QUANTIFIER_TYPES:
        return _QUANTIFIER_TYPES[op](data["var"], args[0], args[1])
    if op in _BINARY_TYPES:
        return _BINARY_TYPES[op](args[0], args[1])
    msg = f"unknown expression op {op!r}"
    raise TypeMismatch(msg)


def spec_to_json(spec: sp.TemporalSpec) -> dict:
    return {
        "name": spec.name,
        "variables": list(spec.variables),
        "params": {k: v for k, v in spec.params},
        "init": expr_to_json(spec.init),
        "actions": [{"name": a.name, "formula": expr_to_json(a.formula)}
                    for a in spec.actions],
        "invariants": [{"name": n, "formula": expr_to_json(f)}
                       for n, f in spec.invariants],
    }


def spec_from_json(data: dict) -> sp.TemporalSpec:
    return sp.TemporalSpec(
        name=data["name"],
        variables=data["variables"],
        init=expr_from_json(data["init"]),
        actions=[sp.NamedAction(a["name"], expr_from_json(a["formula"]))
                 for a in data["actions"]],
        invariants=[(i["name"], expr_from_json(i["formula"]))
                    for i in data.get("invariants", [])],
        params=data.get("params", {}),
    )


def dumps(data) -> str:
    """Canonical JSON text: sorted keys, no trailing whitespace."""
    return json.dumps(data, sort_keys=True, separators=(",", ": "))


def spec_to_text(spec: sp.TemporalSpec) -> str:
    return dumps(spec_to_json(spec)) + "\n"


def spec_from_text(text: str) -> sp.TemporalSpec:
    return spec_from_json(json.loads(text))


def schema() -> dict:
    """The bundled JSON Schema describing the spec IR document."""
    raw = resources.files(__package__).joinpath(SCHEMA_RESOURCE).read_text()
    return json.loads(raw)
