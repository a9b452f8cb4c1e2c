"""The value universe: integers, booleans, finite sets and sequences.

Values are immutable and hashable so states can live in hash-based
containers.  A single canonical total order covers all kinds (integers
before booleans before sets before sequences) and is what makes CHOOSE
and set iteration deterministic.
"""

from __future__ import annotations

import dataclasses
from typing import Union

from .errors import TypeMismatch

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


@dataclasses.dataclass(frozen=True)
class IntVal:
    value: int


@dataclasses.dataclass(frozen=True)
class BoolVal:
    value: bool


@dataclasses.dataclass(frozen=True)
class SetVal:
    elements: frozenset

    def __init__(self, elements=()):
        object.__setattr__(self, "elements", frozenset(elements))


@dataclasses.dataclass(frozen=True)
class SeqVal:
    items: tuple

    def __init__(self, items=()):
        object.__setattr__(self, "items", tuple(items))


Value = Union[IntVal, BoolVal, SetVal, SeqVal]

TRUE = BoolVal(True)
FALSE = BoolVal(False)
BOOLEANS = SetVal((FALSE, TRUE))

_KIND_RANK = {IntVal: 0, BoolVal: 1, SetVal: 2, SeqVal: 3}


def canonical_key(v: Value):
    """Sort key realizing the canonical order. Total over all values."""
    rank = _KIND_RANK[type(v)]
    if isinstance(v, IntVal):
        return (rank, v.value)
    if isinstance(v, BoolVal):
        return (rank, int(v.value))
    if isinstance(v, SetVal):
        return (rank, tuple(sorted(canonical_key(e) for e in v.elements)))
    return (rank, tuple(canonical_key(e) for e in v.items))


def sorted_values(values) -> list:
    return sorted(values, key=canonical_key)


def set_members(v: SetVal) -> list:
    """Members of a set in canonical order."""
    return sorted_values(v.elements)


def require_int(v: Value, what: str = "operand") -> int:
    if not isinstance(v, IntVal):
        msg = f"{what} must be an integer, got {describe(v)}"
        raise TypeMismatch(msg)
    return v.value


def require_bool(v: Value, what: str = "operand") -> bool:
    if not isinstance(v, BoolVal):
        msg = f"{what} must be a boolean, got {describe(v)}"
        raise TypeMismatch(msg)
    return v.value


def require_set(v: Value, what: str = "operand") -> SetVal:
    if not isinstance(v, SetVal):
        msg = f"{what} must be a set, got {describe(v)}"
        raise TypeMismatch(msg)
    return v


def describe(v: Value) -> str:
    if isinstance(v, IntVal):
        return f"integer {v.value}"
    if isinstance(v, BoolVal):
        return "TRUE" if v.value else "FALSE"
    if isinstance(v, SetVal):
        inner = ", ".join(describe(e) for e in set_members(v))
        return "{" + inner + "}"
    inner = ", ".join(describe(e) for e in v.items)
    return "<<" + inner + ">>"


def value_to_json(v: Value):
    """Encode a value as plain JSON data.

    Integers and booleans map to their JSON counterparts; sets and
    sequences become one-key objects so the two container kinds stay
    distinguishable.
    """
    if isinstance(v, IntVal):
        return v.value
    if isinstance(v, BoolVal):
        return v.value
    if isinstance(v, SetVal):
        return {"set": [value_to_json(e) for e in set_members(v)]}
    if isinstance(v, SeqVal):
        return {"seq": [value_to_json(e) for e in v.items]}
    msg = f"not a value: {v!r}"
    raise TypeMismatch(msg)


def value_from_json(data) -> Value:
    if isinstance(data, bool):
        return BoolVal(data)
    if isinstance(data, int):
        return IntVal(data)
    if isinstance(data, dict) and set(data) == {"set"}:
        return SetVal(value_from_json(e) for e in data["set"])
    if isinstance(data, dict) and set(data) == {"seq"}:
        return SeqVal(value_from_json(e) for e in data["seq"])
    msg = f"cannot decode value from {data!r}"
    raise TypeMismatch(msg)
