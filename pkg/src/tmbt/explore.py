"""Breadth-first state-space exploration.

The transition relation is executed, not solved: candidate successor
states are drawn from finite per-variable domains and filtered by
evaluating the action formula over the (current, candidate) pair.
Domains come from the TypeOK invariant when one is declared, from
membership constraints in init otherwise, and as a last resort from
constants compared against the variable anywhere in the spec.

Counting contract:
  states_found    initial states plus every successor generated from a
                  dequeued state, duplicates included
  distinct_states size of the reachable node set
  diameter        1 + the deepest BFS level (in edges) of any node, so a
                  spec whose reachable states are all initial has diameter 1
"""

from __future__ import annotations

import dataclasses
import itertools
import random
from collections import deque

from . import spec as sp
from .errors import NoInitialStates, TmbtError, UnboundedDomain
from .values import SetVal, Value, sorted_values, value_to_json

TYPE_OK_NAME = "TypeOK"


# ---------------------------------------------------------------------------
# Result types


@dataclasses.dataclass(frozen=True)
class StateGraph:
    nodes: frozenset
    edges: frozenset
    initials: frozenset

    def outgoing(self, state: sp.State) -> list:
        return [(a, t) for (s, a, t) in self.edges if s == state]


@dataclasses.dataclass(frozen=True)
class ExplorationStats:
    diameter: int
    states_found: int
    distinct_states: int
    truncated: bool = False


@dataclasses.dataclass(frozen=True)
class Counterexample:
    invariant: str
    trace: sp.Behavior


def state_to_json(state: sp.State) -> dict:
    return {name: value_to_json(value) for name, value in state.bindings}


def stats_to_json(stats: ExplorationStats) -> dict:
    return {
        "diameter": stats.diameter,
        "states_found": stats.states_found,
        "distinct_states": stats.distinct_states,
        "truncated": stats.truncated,
    }


def behavior_to_json(behavior: sp.Behavior) -> dict:
    return {"states": [state_to_json(s) for s in behavior.states]}


def counterexample_to_json(cex: Counterexample) -> dict:
    return {
        "invariant": cex.invariant,
        "trace": [state_to_json(s) for s in cex.trace.states],
    }


# ---------------------------------------------------------------------------
# Domain derivation


def _conjuncts(expr) -> list:
    if isinstance(expr, sp.And):
        return _conjuncts(expr.left) + _conjuncts(expr.right)
    return [expr]


def _closed_eval(expr) -> Value | None:
    """Evaluate an expression with nothing in scope, or None if it needs one."""
    try:
        return sp.eval_expr(expr, sp.State({}), sp.State({}))
    except TmbtError:
        return None


def _membership_domains(expr, through_or: bool) -> dict:
    """Per-variable value sets from `v \\in D` constraints with constant D.

    Conjuncts intersect; disjunct branches union when `through_or` is set.
    """
    if isinstance(expr, sp.And):
        left = _membership_domains(expr.left, through_or)
        right = _membership_domains(expr.right, through_or)
        out = dict(left)
        for name, vals in right.items():
            out[name] = out[name] & vals if name in out else vals
        return out
    if through_or and isinstance(expr, sp.Or):
        left = _membership_domains(expr.left, through_or)
        right = _membership_domains(expr.right, through_or)
        # a variable unconstrained on either side stays unconstrained
        out = {}
        for name in left.keys() & right.keys():
            out[name] = left[name] | right[name]
        return out
    if isinstance(expr, sp.In) and isinstance(expr.element, sp.Var):
        domain = _closed_eval(expr.domain)
        if isinstance(domain, SetVal):
            return {expr.element.name: set(domain.elements)}
    return {}


def _mine_constants(expr, out: dict) -> None:
    """Collect constants equated with or containing a variable, any polarity."""
    if isinstance(expr, (sp.And, sp.Or, sp.Implies, sp.Eq, sp.Neq)):
        pairs = [(expr.left, expr.right), (expr.right, expr.left)]
        if isinstance(expr, (sp.Eq, sp.Neq)):
            for side, other in pairs:
                if isinstance(side, (sp.Var, sp.Primed)):
                    value = _closed_eval(other)
                    if value is not None:
                        out.setdefault(side.name, set()).add(value)
        _mine_constants(expr.left, out)
        _mine_constants(expr.right, out)
        return
    if isinstance(expr, sp.In) and isinstance(expr.element, (sp.Var, sp.Primed)):
        domain = _closed_eval(expr.domain)
        if isinstance(domain, SetVal):
            out.setdefault(expr.element.name, set()).update(domain.elements)
        return
    if isinstance(expr, sp.Not):
        _mine_constants(expr.operand, out)
    if isinstance(expr, sp.QUANTIFIERS):
        _mine_constants(expr.body, out)


def derive_domains(spec: sp.TemporalSpec) -> dict:
    """Finite candidate domain per variable, canonically sorted.

    Raises UnboundedDomain naming the first variable (in declaration
    order) for which no source yields any candidate values.
    """
    type_ok = spec.invariant_map().get(TYPE_OK_NAME)
    from_type_ok = _membership_domains(type_ok, False) if type_ok is not None else {}
    from_init = _membership_domains(spec.init, True)
    mined: dict = {}
    _mine_constants(spec.init, mined)
    for action in spec.actions:
        _mine_constants(action.formula, mined)

    domains = {}
    for name in spec.variables:
        values = from_type_ok.get(name) or from_init.get(name) or mined.get(name)
        if not values:
            msg = (f"no finite domain for variable {name}: not constrained by "
                   f"{TYPE_OK_NAME}, init membership, or literal comparisons")
            raise UnboundedDomain(msg)
        domains[name] = sorted_values(values)
    return domains


# ---------------------------------------------------------------------------
# Successor enumeration


def _primed_candidates(expr, current: sp.State) -> dict | None:
    """Candidate next values implied by the formula's structure.

    Returns a map variable -> set of values, where an absent variable is
    unconstrained.  None means the whole branch is uninformative.  Only a
    pruning aid: every returned candidate set is a superset of the values
    the full evaluation would accept for that conjunct.
    """
    if isinstance(expr, sp.And):
        left = _primed_candidates(expr.left, current)
        right = _primed_candidates(expr.right, current)
        if left is None:
            return right
        if right is None:
            return left
        out = dict(left)
        for name, vals in right.items():
            out[name] = out[name] & vals if name in out else vals
        return out
    if isinstance(expr, sp.Or):
        left = _primed_candidates(expr.left, current)
        right = _primed_candidates(expr.right, current)
        if left is None or right is None:
            return None
        out = {}
        for name in left.keys() & right.keys():
            out[name] = left[name] | right[name]
        return out or None
    if isinstance(expr, sp.Eq):
        for side, other in ((expr.left, expr.right), (expr.right, expr.left)):
            if isinstance(side, sp.Primed) and not _mentions_primed(other):
                value = _try_eval(other, current)
                if value is not None:
                    return {side.name: {value}}
        return None
    if isinstance(expr, sp.In):
        if isinstance(expr.element, sp.Primed) and not _mentions_primed(expr.domain):
            domain = _try_eval(expr.domain, current)
            if isinstance(domain, SetVal):
                return {expr.element.name: set(domain.elements)}
    return None


def _mentions_primed(expr) -> bool:
    if isinstance(expr, sp.Primed):
        return True
    if isinstance(expr, (sp.Const, sp.Var)):
        return False
    if isinstance(expr, sp.Not):
        return _mentions_primed(expr.operand)
    if isinstance(expr, (sp.SetLit, sp.SeqLit)):
        return any(_mentions_primed(i) for i in expr.items)
    if isinstance(expr, sp.IntRange):
        return _mentions_primed(expr.low) or _mentions_primed(expr.high)
    if isinstance(expr, sp.In):
        return _mentions_primed(expr.element) or _mentions_primed(expr.domain)
    if isinstance(expr, sp.QUANTIFIERS):
        return _mentions_primed(expr.domain) or _mentions_primed(expr.body)
    return _mentions_primed(expr.left) or _mentions_primed(expr.right)


def _try_eval(expr, current: sp.State) -> Value | None:
    try:
        return sp.eval_expr(expr, current, sp.State({}))
    except TmbtError:
        return None


def successors(spec: sp.TemporalSpec, state: sp.State,
               domains: dict | None = None) -> list:
    """All (actionName, nextState) steps enabled from `state`.

    Entries are ordered by action declaration order, then canonically by
    next state.  The same next state reached through two actions appears
    twice; a stuttering step appears only if some action admits it.
    """
    if domains is None:
        domains = derive_domains(spec)
    out = []
    for action in spec.actions:
        narrowed = _primed_candidates(action.formula, state) or {}
        per_var = []
        for name in spec.variables:
            candidates = domains[name]
            if name in narrowed:
                candidates = [v for v in candidates if v in narrowed[name]]
            per_var.append(candidates)
        accepted = []
        for combo in itertools.product(*per_var):
            candidate = sp.State(zip(spec.variables, combo))
            if sp.eval_action_formula(action.formula, state, candidate):
                accepted.append(candidate)
        accepted.sort(key=sp.state_key)
        out.extend((action.name, t) for t in accepted)
    return out


def initial_states(spec: sp.TemporalSpec, domains: dict | None = None) -> list:
    """States over the derived domains satisfying init, canonically sorted."""
    if domains is None:
        domains = derive_domains(spec)
    per_var = [domains[name] for name in spec.variables]
    found = []
    for combo in itertools.product(*per_var):
        candidate = sp.State(zip(spec.variables, combo))
        if sp.eval_state_formula(spec.init, candidate):
            found.append(candidate)
    found.sort(key=sp.state_key)
    return found


# ---------------------------------------------------------------------------
# Exploration


def explore(spec: sp.TemporalSpec, max_distinct: int | None = None,
            max_depth: int | None = None,
            shuffle: random.Random | None = None):
    """Explore the reachable state space breadth-first.

    Returns (StateGraph, ExplorationStats, counterexamples).  Results do
    not depend on frontier processing order; `shuffle` only exists so
    tests can permute each BFS level and check exactly that.  When a
    limit cuts the search short the stats carry truncated=True and count
    only what was actually generated.
    """
    domains = derive_domains(spec)
    inits = initial_states(spec, domains)

    depth = {s: 0 for s in inits}
    nodes = set(inits)
    edges = set()
    states_found = len(inits)
    truncated = False

    level = list(inits)
    while level:
        if shuffle is not None:
            shuffle.shuffle(level)
        if max_depth is not None and level and depth[level[0]] >= max_depth:
            truncated = True
            break
        next_level = []
        for state in level:
            succs = successors(spec, state, domains)
            states_found += len(succs)
            for action_name, target in succs:
                if target not in nodes:
                    if max_distinct is not None and len(nodes) >= max_distinct:
                        truncated = True
                        continue
                    nodes.add(target)
                    depth[target] = depth[state] + 1
                    next_level.append(target)
                edges.add((state, action_name, target))
        level = next_level

    graph = StateGraph(frozenset(nodes), frozenset(edges), frozenset(inits))
    diameter = 1 + max(depth.values()) if depth else 0
    stats = ExplorationStats(diameter, states_found, len(nodes), truncated)
    cexs = _counterexamples(spec, graph, depth)
    return graph, stats, cexs


def _counterexamples(spec: sp.TemporalSpec, graph: StateGraph,
                     depth: dict) -> list:
    """Shortest counterexample per violated invariant, deterministically.

    Recomputed from the finished graph so the result is independent of
    the order the frontier was processed in.
    """
    violated = []
    for inv_name, formula in spec.invariants:
        bad = [s for s in graph.nodes if not sp.eval_state_formula(formula, s)]
        if bad:
            target = min(bad, key=lambda s: (depth[s], sp.state_key(s)))
            violated.append((inv_name, target))
    if not violated:
        return []

    adjacency: dict = {}
    for source, _, target in graph.edges:
        adjacency.setdefault(source, set()).add(target)
    parent = {s: None for s in sorted(graph.initials, key=sp.state_key)}
    queue = deque(parent)
    while queue:
        state = queue.popleft()
        for target in sorted(adjacency.get(state, ()), key=sp.state_key):
            if target not in parent:
                parent[target] = state
                queue.append(target)

    out = []
    for inv_name, target in violated:
        path = []
        walk = target
        while walk is not None:
            path.append(walk)
            walk = parent[walk]
        out.append(Counterexample(inv_name, sp.Behavior(reversed(path))))
    return out


# ---------------------------------------------------------------------------
# Behaviors


def behaviors(spec: sp.TemporalSpec, count: int, max_len: int,
              seed: int) -> list:
    """Seeded random walks over the reachable graph.

    Each behavior starts in an initial state, follows action steps, and
    stops at max_len states or in a state with no successors.  The same
    seed always produces the same list.
    """
    graph, _, _ = explore(spec)
    inits = sorted(graph.initials, key=sp.state_key)
    if not inits:
        msg = f"spec {spec.name}: init is unsatisfiable over the derived domains"
        raise NoInitialStates(msg)
    action_order = {a.name: i for i, a in enumerate(spec.actions)}
    adjacency: dict = {}
    for source, action_name, target in graph.edges:
        adjacency.setdefault(source, []).append((action_name, target))
    for outs in adjacency.values():
        outs.sort(key=lambda at: (action_order[at[0]], sp.state_key(at[1])))

    rng = random.Random(seed)
    walks = []
    for _ in range(count):
        state = inits[rng.randrange(len(inits))]
        states = [state]
        while len(states) < max_len:
            outs = adjacency.get(state)
            if not outs:
                break
            _, state = outs[rng.randrange(len(outs))]
            states.append(state)
        walks.append(sp.Behavior(states))
    return walks


def behavior_satisfies(spec: sp.TemporalSpec, behavior: sp.Behavior) -> bool:
    """Init holds at the start and every step is an action step or stutter."""
    if not behavior.states:
        return False
    if not sp.eval_state_formula(spec.init, behavior.states[0]):
        return False
    for current, nxt in zip(behavior.states, behavior.states[1:]):
        if nxt == current:
            continue
        if not any(sp.eval_action_formula(a.formula, current, nxt)
                   for a in spec.actions):
            return False
    return True
