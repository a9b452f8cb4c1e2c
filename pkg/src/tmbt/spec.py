"""States, formulas and their evaluation.

A TemporalSpec is the executable form of an Init/Next-style temporal
specification: a variable list, an init state formula, named actions
(relations between a current and a primed state) and named invariants.
Formulas are immutable expression trees evaluated against one state
(state formulas) or a pair of states (action formulas).
"""

from __future__ import annotations

import dataclasses
import typing as t

from .errors import (
    EmptyChooseDomain,
    IntegerOverflow,
    PrimedInStateFormula,
    TypeMismatch,
    UnboundVariable,
)
from .values import (
    INT64_MAX,
    INT64_MIN,
    BoolVal,
    IntVal,
    SetVal,
    SeqVal,
    Value,
    canonical_key,
    describe,
    require_bool,
    require_int,
    require_set,
    set_members,
)


# ---------------------------------------------------------------------------
# States


@dataclasses.dataclass(frozen=True)
class State:
    """A total assignment of values to variable names. Immutable, hashable."""

    bindings: tuple

    def __init__(self, bindings):
        if isinstance(bindings, dict):
            items = tuple(sorted(bindings.items()))
        else:
            items = tuple(sorted(bindings))
        object.__setattr__(self, "bindings", items)

    def __getitem__(self, name: str) -> Value:
        for key, value in self.bindings:
            if key == name:
                return value
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(key == name for key, _ in self.bindings)

    def variables(self) -> tuple:
        return tuple(key for key, _ in self.bindings)

    def as_dict(self) -> dict:
        return dict(self.bindings)

    def replace(self, **changes: Value) -> "State":
        d = self.as_dict()
        d.update(changes)
        return State(d)


def state_key(s: State):
    """Canonical sort key over whole states (variable-name major)."""
    return tuple((name, canonical_key(value)) for name, value in s.bindings)


# ---------------------------------------------------------------------------
# Expression trees

@dataclasses.dataclass(frozen=True)
class Const:
    value: Value


@dataclasses.dataclass(frozen=True)
class Var:
    name: str


@dataclasses.dataclass(frozen=True)
class Primed:
    name: str


@dataclasses.dataclass(frozen=True)
class Not:
    operand: "Expr"


@dataclasses.dataclass(frozen=True)
class And:
    left: "Expr"
    right: "Expr"


@dataclasses.dataclass(frozen=True)
class Or:
    left: "Expr"
    right: "Expr"


@dataclasses.dataclass(frozen=True)
class Implies:
    left: "Expr"
    right: "Expr"


@dataclasses.dataclass(frozen=True)
class Eq:
    left: "Expr"
    right: "Expr"


@dataclasses.dataclass(frozen=True)
class Neq:
    left: "Expr"
    right: "Expr"


@dataclasses.dataclass(frozen=True)
class Lt:
    left: "Expr"
    right: "Expr"


@dataclasses.dataclass(frozen=True)
class Le:
    left: "Expr"
    right: "Expr"


@dataclasses.dataclass(frozen=True)
class Gt:
    left: "Expr"
    right: "Expr"


@dataclasses.dataclass(frozen=True)
class Ge:
    left: "Expr"
    right: "Expr"


@dataclasses.dataclass(frozen=True)
class NotLt:
    left: "Expr"
    right: "Expr"


@dataclasses.dataclass(frozen=True)
class NotLe:
    left: "Expr"
    right: "Expr"


@dataclasses.dataclass(frozen=True)
class NotGt:
    left: "Expr"
    right: "Expr"


@dataclasses.dataclass(frozen=True)
class NotGe:
    left: "Expr"
    right: "Expr"


@dataclasses.dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclasses.dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclasses.dataclass(frozen=True)
class In:
    element: "Expr"
    domain: "Expr"


@dataclasses.dataclass(frozen=True)
class SetLit:
    items: tuple

    def __init__(self, items=()):
        object.__setattr__(self, "items", tuple(items))


@dataclasses.dataclass(frozen=True)
class SeqLit:
    items: tuple

    def __init__(self, items=()):
        object.__setattr__(self, "items", tuple(items))


@dataclasses.dataclass(frozen=True)
class IntRange:
    low: "Expr"
    high: "Expr"


@dataclasses.dataclass(frozen=True)
class Forall:
    var: str
    domain: "Expr"
    body: "Expr"


@dataclasses.dataclass(frozen=True)
class Exists:
    var: str
    domain: "Expr"
    body: "Expr"


@dataclasses.dataclass(frozen=True)
class Choose:
    var: str
    domain: "Expr"
    body: "Expr"


Expr = t.Union[
    Const, Var, Primed, Not, And, Or, Implies,
    Eq, Neq, Lt, Le, Gt, Ge, NotLt, NotLe, NotGt, NotGe,
    Add, Sub, In, SetLit, SeqLit, IntRange, Forall, Exists, Choose,
]

BINARY_BOOL = (And, Or, Implies)
COMPARISONS = (Lt, Le, Gt, Ge, NotLt, NotLe, NotGt, NotGe)
QUANTIFIERS = (Forall, Exists, Choose)


def intval(n: int) -> Const:
    return Const(IntVal(n))


def boolval(b: bool) -> Const:
    return Const(BoolVal(b))


def conj(*parts: Expr) -> Expr:
    """Left-nested conjunction of one or more formulas."""
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(*parts: Expr) -> Expr:
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


# ---------------------------------------------------------------------------
# Specs and behaviors


@dataclasses.dataclass(frozen=True)
class NamedAction:
    name: str
    formula: Expr


@dataclasses.dataclass(frozen=True)
class TemporalSpec:
    name: str
    variables: tuple
    init: Expr
    actions: tuple
    invariants: tuple = ()
    params: tuple = ()

    def __init__(self, name, variables, init, actions, invariants=(), params=()):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "variables", tuple(variables))
        object.__setattr__(self, "init", init)
        object.__setattr__(self, "actions", tuple(actions))
        if isinstance(invariants, dict):
            invariants = tuple(invariants.items())
        object.__setattr__(self, "invariants", tuple(invariants))
        if isinstance(params, dict):
            params = tuple(sorted(params.items()))
        object.__setattr__(self, "params", tuple(params))

    def invariant_map(self) -> dict:
        return dict(self.invariants)

    def param_map(self) -> dict:
        return dict(self.params)


@dataclasses.dataclass(frozen=True)
class Behavior:
    """A finite sequence of states (a prefix of an infinite behavior)."""

    states: tuple

    def __init__(self, states):
        object.__setattr__(self, "states", tuple(states))

    def __len__(self) -> int:
        return len(self.states)


# ---------------------------------------------------------------------------
# Evaluation

def _checked_int(n: int) -> IntVal:
    if not INT64_MIN <= n <= INT64_MAX:
        msg = f"arithmetic result {n} outside signed 64-bit range"
        raise IntegerOverflow(msg)
    return IntVal(n)


def eval_expr(expr: Expr, current: State, nxt: State | None = None,
              env: dict | None = None) -> Value:
    """Evaluate a formula against a current state and optional next state.

    Pure: never mutates its arguments.  Bound variables (from quantifiers
    and CHOOSE) shadow state variables; primed variables read from `nxt`
    and raise PrimedInStateFormula when no next state was supplied.
    And/Or/Implies evaluate left to right and short-circuit.
    """
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        if env is not None and expr.name in env:
            return env[expr.name]
        if expr.name in current:
            return current[expr.name]
        msg = f"variable {expr.name} is not bound"
        raise UnboundVariable(msg)
    if isinstance(expr, Primed):
        if nxt is None:
            msg = f"{expr.name}' used in a state formula"
            raise PrimedInStateFormula(msg)
        if expr.name in nxt:
            return nxt[expr.name]
        msg = f"variable {expr.name} is not bound"
        raise UnboundVariable(msg)
    if isinstance(expr, Not):
        return BoolVal(not require_bool(eval_expr(expr.operand, current, nxt, env)))
    if isinstance(expr, And):
        if not require_bool(eval_expr(expr.left, current, nxt, env)):
            return BoolVal(False)
        return BoolVal(require_bool(eval_expr(expr.right, current, nxt, env)))
    if isinstance(expr, Or):
        if require_bool(eval_expr(expr.left, current, nxt, env)):
            return BoolVal(True)
        return BoolVal(require_bool(eval_expr(expr.right, current, nxt, env)))
    if isinstance(expr, Implies):
        if not require_bool(eval_expr(expr.left, current, nxt, env)):
            return BoolVal(True)
        return BoolVal(require_bool(eval_expr(expr.right, current, nxt, env)))
    if isinstance(expr, Eq):
        return BoolVal(eval_expr(expr.left, current, nxt, env)
                       == eval_expr(expr.right, current, nxt, env))
    if isinstance(expr, Neq):
        return BoolVal(eval_expr(expr.left, current, nxt, env)
                       != eval_expr(expr.right, current, nxt, env))
    if isinstance(expr, COMPARISONS):
        a = require_int(eval_expr(expr.left, current, nxt, env), "comparison operand")
        b = require_int(eval_expr(expr.right, current, nxt, env), "comparison operand")
        if isinstance(expr, Lt):
            return BoolVal(a < b)
        if isinstance(expr, Le):
            return BoolVal(a <= b)
        if isinstance(expr, Gt):
            return BoolVal(a > b)
        if isinstance(expr, Ge):
            return BoolVal(a >= b)
        if isinstance(expr, NotLt):
            return BoolVal(not a < b)
        if isinstance(expr, NotLe):
            return BoolVal(not a <= b)
        if isinstance(expr, NotGt):
            return BoolVal(not a > b)
        return BoolVal(not a >= b)
    if isinstance(expr, Add):
        a = require_int(eval_expr(expr.left, current, nxt, env))
        b = require_int(eval_expr(expr.right, current, nxt, env))
        return _checked_int(a + b)
    if isinstance(expr, Sub):
        a = require_int(eval_expr(expr.left, current, nxt, env))
        b = require_int(eval_expr(expr.right, current, nxt, env))
        return _checked_int(a - b)
    if isinstance(expr, In):
        element = eval_expr(expr.element, current, nxt, env)
        domain = require_set(eval_expr(expr.domain, current, nxt, env),
                             "right side of \\in")
        return BoolVal(element in domain.elements)
    if isinstance(expr, SetLit):
        return SetVal(eval_expr(item, current, nxt, env) for item in expr.items)
    if isinstance(expr, SeqLit):
        return SeqVal(eval_expr(item, current, nxt, env) for item in expr.items)
    if isinstance(expr, IntRange):
        low = require_int(eval_expr(expr.low, current, nxt, env), "range bound")
        high = require_int(eval_expr(expr.high, current, nxt, env), "range bound")
        return SetVal(IntVal(n) for n in range(low, high + 1))
    if isinstance(expr, QUANTIFIERS):
        domain = require_set(eval_expr(expr.domain, current, nxt, env),
                             "quantifier domain")
        members = set_members(domain)
        inner = dict(env) if env else {}
        if isinstance(expr, Forall):
            for member in members:
                inner[expr.var] = member
                if not require_bool(eval_expr(expr.body, current, nxt, inner)):
                    return BoolVal(False)
            return BoolVal(True)
        if isinstance(expr, Exists):
            for member in members:
                inner[expr.var] = member
                if require_bool(eval_expr(expr.body, current, nxt, inner)):
                    return BoolVal(True)
            return BoolVal(False)
        for member in members:
            inner[expr.var] = member
            if require_bool(eval_expr(expr.body, current, nxt, inner)):
                return member
        msg = f"CHOOSE {expr.var}: no element of {describe(domain)} satisfies the body"
        raise EmptyChooseDomain(msg)
    msg = f"not an expression: {expr!r}"
    raise TypeMismatch(msg)


def eval_state_formula(expr: Expr, state: State, env: dict | None = None) -> bool:
    """Evaluate a boolean formula over a single state."""
    return require_bool(eval_expr(expr, state, None, env), "state formula")


def eval_action_formula(expr: Expr, current: State, nxt: State) -> bool:
    """Evaluate an action formula over a (current, next) state pair."""
    return require_bool(eval_expr(expr, current, nxt), "action formula")


def choose(var: str, domain: SetVal, body: Expr, current: State,
           nxt: State | None = None) -> Value:
    """Deterministic CHOOSE: the canonically smallest satisfying element."""
    return eval_expr(Choose(var, Const(domain), body), current, nxt)


# ---------------------------------------------------------------------------
# Well-formedness


@dataclasses.dataclass(frozen=True)
class Diagnostic:
    code: str
    construct: str
    message: str

    def __str__(self) -> str:
        return f"{self.construct}: {self.code}: {self.message}"


def _scan(expr: Expr, declared: frozenset, bound: frozenset,
          construct: str, allow_primed: bool, out: list) -> None:
    if isinstance(expr, Const):
        return
    if isinstance(expr, Var):
        if expr.name not in bound and expr.name not in declared:
            out.append(Diagnostic("unbound-variable", construct,
                                  f"{expr.name} is not declared"))
        return
    if isinstance(expr, Primed):
        if not allow_primed:
            out.append(Diagnostic("primed-in-state-formula", construct,
                                  f"{expr.name}' is not allowed here"))
        elif expr.name not in declared:
            out.append(Diagnostic("unbound-variable", construct,
                                  f"{expr.name}' is not declared"))
        return
    if isinstance(expr, Not):
        _scan(expr.operand, declared, bound, construct, allow_primed, out)
        return
    if isinstance(expr, QUANTIFIERS):
        _scan(expr.domain, declared, bound, construct, allow_primed, out)
        _scan(expr.body, declared, bound | {expr.var}, construct, allow_primed, out)
        return
    if isinstance(expr, (SetLit, SeqLit)):
        for item in expr.items:
            _scan(item, declared, bound, construct, allow_primed, out)
        return
    if isinstance(expr, IntRange):
        _scan(expr.low, declared, bound, construct, allow_primed, out)
        _scan(expr.high, declared, bound, construct, allow_primed, out)
        return
    if isinstance(expr, In):
        _scan(expr.element, declared, bound, construct, allow_primed, out)
        _scan(expr.domain, declared, bound, construct, allow_primed, out)
        return
    # remaining nodes are binary left/right
    _scan(expr.left, declared, bound, construct, allow_primed, out)
    _scan(expr.right, declared, bound, construct, allow_primed, out)


def well_formed(spec: TemporalSpec) -> list:
    """Check a spec and return a list of Diagnostics (empty when clean).

    Init and invariants must be state formulas over declared variables;
    action formulas may prime declared variables only.
    """
    out: list = []
    declared = frozenset(spec.variables)
    seen = set()
    for name in spec.variables:
        if name in seen:
            out.append(Diagnostic("duplicate-variable", "variables",
                                  f"{name} declared twice"))
        seen.add(name)
    _scan(spec.init, declared, frozenset(), "init", False, out)
    for action in spec.actions:
        _scan(action.formula, declared, frozenset(),
              f"action {action.name}", True, out)
    for inv_name, formula in spec.invariants:
        _scan(formula, declared, frozenset(),
              f"invariant {inv_name}", False, out)
    return out
