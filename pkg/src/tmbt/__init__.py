"""Temporal-spec model tooling.

Executable Init/Next specifications with exhaustive breadth-first
exploration, a textual TLA+ subset front end, timed-stream component
specs, and model-guided stateful property-based testing.
"""

from .errors import TmbtError
from .explore import (
    Counterexample,
    ExplorationStats,
    StateGraph,
    behavior_satisfies,
    behaviors,
    explore,
    initial_states,
    successors,
)
from .ir import spec_from_text, spec_to_text
from .spec import (
    Behavior,
    NamedAction,
    State,
    TemporalSpec,
    eval_action_formula,
    eval_expr,
    eval_state_formula,
    well_formed,
)
from .tla import parse_expression, parse_module, pretty_print, to_spec
from .values import BoolVal, IntVal, SeqVal, SetVal, Value

__version__ = "0.1.0"

__all__ = [
    "Behavior",
    "BoolVal",
    "Counterexample",
    "ExplorationStats",
    "IntVal",
    "NamedAction",
    "SeqVal",
    "SetVal",
    "State",
    "StateGraph",
    "TemporalSpec",
    "TmbtError",
    "Value",
    "behavior_satisfies",
    "behaviors",
    "eval_action_formula",
    "eval_expr",
    "eval_state_formula",
    "explore",
    "initial_states",
    "parse_expression",
    "parse_module",
    "pretty_print",
    "spec_from_text",
    "spec_to_text",
    "successors",
    "to_spec",
    "well_formed",
    "__version__",
]
