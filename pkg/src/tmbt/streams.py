"""Timed streams, assumption/guarantee checking, and the steam boiler.

A timed stream maps interval indices to finite message lists; components
are specified by assumptions over their input streams and guarantees
over everything observable.  The steam boiler closed loop (tank plus
pump plus threshold controller) lives here both as executable dynamics
and as a translation into a TemporalSpec for exhaustive exploration.

Boiler physics, per the problem statement: the pump adds 10 gallons per
interval while running; steam consumes up to 10 gallons per interval
while it is not.  A control signal emitted at interval t drives the
pump from interval t+1 on.
"""

from __future__ import annotations

import dataclasses
import random
import typing as t

from . import spec as sp
from .errors import ConsumptionOutOfRange, TypeMismatch
from .values import (
    BOOLEANS,
    FALSE,
    IntVal,
    Value,
    value_from_json,
    value_to_json,
)

SIGNAL_ON = IntVal(1)
SIGNAL_OFF = IntVal(0)

BAND_LOW = 200
BAND_HIGH = 800


# ---------------------------------------------------------------------------
# Timed streams


@dataclasses.dataclass(frozen=True)
class TimedStream:
    """A finite prefix of a timed stream: one message list per interval."""

    intervals: tuple

    def __init__(self, intervals=()):
        object.__setattr__(
            self, "intervals", tuple(tuple(msgs) for msgs in intervals))

    def __len__(self) -> int:
        return len(self.intervals)

    def at(self, interval: int) -> tuple:
        return self.intervals[interval]

    def to_json(self) -> list:
        return [[value_to_json(m) for m in msgs] for msgs in self.intervals]

    @classmethod
    def from_json(cls, data: list) -> "TimedStream":
        return cls([[value_from_json(m) for m in msgs] for msgs in data])


def ts(stream: TimedStream, up_to: int) -> bool:
    """True iff every interval in [0, up_to) carries exactly one message."""
    if up_to > len(stream):
        msg = f"stream prefix has {len(stream)} intervals, asked about {up_to}"
        raise ValueError(msg)
    return all(len(stream.at(i)) == 1 for i in range(up_to))


# ---------------------------------------------------------------------------
# Component specifications

_TYPE_TAGS = ("int", "bool", "signal")


@dataclasses.dataclass(frozen=True)
class StreamPredicate:
    """A named predicate form; `kind` selects the check, fields configure it.

    Supported kinds:
      ts                 stream carries exactly one message per interval
      each_in_range      every message on stream is an integer in [low, high]
      level_in_band      every message on stream stays in [low, high]
      signals_alternate  emitted on/off signals on stream strictly alternate
    """

    kind: str
    fields: tuple

    def __init__(self, kind, fields=()):
        object.__setattr__(self, "kind", kind)
        if isinstance(fields, dict):
            fields = tuple(sorted(fields.items()))
        object.__setattr__(self, "fields", tuple(fields))

    def field_map(self) -> dict:
        return dict(self.fields)

    def check_assumption(self, inputs: dict, up_to: int) -> bool:
        f = self.field_map()
        stream = inputs[f["stream"]]
        if self.kind == "ts":
            return ts(stream, up_to)
        if self.kind == "each_in_range":
            for i in range(up_to):
                for m in stream.at(i):
                    if not isinstance(m, IntVal):
                        return False
                    if not f["low"] <= m.value <= f["high"]:
                        return False
            return True
        msg = f"unknown assumption kind {self.kind!r}"
        raise TypeMismatch(msg)

    def check_guarantee(self, inputs: dict, outputs: dict,
                        local_state: dict, interval: int) -> bool:
        f = self.field_map()
        name = f["stream"]
        stream = outputs.get(name) or inputs.get(name)
        if stream is None:
            msg = f"guarantee references unknown stream {name!r}"
            raise TypeMismatch(msg)
        if self.kind == "level_in_band":
            return all(isinstance(m, IntVal) and f["low"] <= m.value <= f["high"]
                       for m in stream.at(interval))
        if self.kind == "signals_alternate":
            last = None
            for i in range(interval + 1):
                for m in stream.at(i):
                    if m == last:
                        return False
                    last = m
            return True
        msg = f"unknown guarantee kind {self.kind!r}"
        raise TypeMismatch(msg)

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        out.update({k: v for k, v in self.fields})
        return out

    @classmethod
    def from_json(cls, data: dict) -> "StreamPredicate":
        fields = {k: v for k, v in data.items() if k != "kind"}
        return cls(data["kind"], fields)


@dataclasses.dataclass(frozen=True)
class ComponentSpec:
    """Assumption/guarantee interface spec of a timed-stream component."""

    name: str
    inputs: tuple
    outputs: tuple
    local: tuple
    init: tuple
    asm: tuple
    gar: tuple
    advance: t.Optional[t.Callable] = None

    def __init__(self, name, inputs=(), outputs=(), local=(), init=(),
                 asm=(), gar=(), advance=None):
        def pairs(v):
            return tuple(sorted(v.items())) if isinstance(v, dict) else tuple(v)

        object.__setattr__(self, "name", name)
        object.__setattr__(self, "inputs", pairs(inputs))
        object.__setattr__(self, "outputs", pairs(outputs))
        object.__setattr__(self, "local", pairs(local))
        object.__setattr__(self, "init", pairs(init))
        object.__setattr__(self, "asm", tuple(asm))
        object.__setattr__(self, "gar", tuple(gar))
        object.__setattr__(self, "advance", advance)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "in": dict(self.inputs),
            "out": dict(self.outputs),
            "local": dict(self.local),
            "init": {k: value_to_json(v) for k, v in self.init},
            "asm": [p.to_json() for p in self.asm],
            "gar": [p.to_json() for p in self.gar],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ComponentSpec":
        return cls(
            name=data["name"],
            inputs=data.get("in", {}),
            outputs=data.get("out", {}),
            local=data.get("local", {}),
            init={k: value_from_json(v) for k, v in data.get("init", {}).items()},
            asm=[StreamPredicate.from_json(p) for p in data.get("asm", [])],
            gar=[StreamPredicate.from_json(p) for p in data.get("gar", [])],
        )


# Verdicts


@dataclasses.dataclass(frozen=True)
class Conforms:
    pass


@dataclasses.dataclass(frozen=True)
class AssumptionViolated:
    index: int


@dataclasses.dataclass(frozen=True)
class GuaranteeViolated:
    index: int
    interval: int


Verdict = t.Union[Conforms, AssumptionViolated, GuaranteeViolated]


def check_asm_gar(component: ComponentSpec, inputs: dict, outputs: dict,
                  up_to: int) -> Verdict:
    """Judge recorded streams against a component spec.

    A failed assumption short-circuits to AssumptionViolated (vacuous
    pass: guarantees are not judged).  Guarantees are checked interval
    by interval; the first failure wins.
    """
    for index, predicate in enumerate(component.asm):
        if not predicate.check_assumption(inputs, up_to):
            return AssumptionViolated(index)
    local_state = dict(component.init)
    for interval in range(up_to):
        for index, predicate in enumerate(component.gar):
            if not predicate.check_guarantee(inputs, outputs, local_state, interval):
                return GuaranteeViolated(index, interval)
        if component.advance is not None:
            local_state = component.advance(local_state, inputs, outputs, interval)
    return Conforms()


# ---------------------------------------------------------------------------
# Steam boiler dynamics


@dataclasses.dataclass(frozen=True)
class Thresholds:
    low: int = 300
    high: int = 700


@dataclasses.dataclass(frozen=True)
class ControllerState:
    water_level: int
    pump_on: bool
    last_signal: t.Optional[Value] = None


@dataclasses.dataclass(frozen=True)
class BoilerPlant:
    initial_level: int = 500
    fill_rate: int = 10
    max_consumption: int = 10
    tank_range: tuple = (0, 1000)


@dataclasses.dataclass(frozen=True)
class ClosedLoop:
    boiler: BoilerPlant = BoilerPlant()
    controller: ControllerState = ControllerState(500, False)
    thresholds: Thresholds = Thresholds()


def step_boiler(level: int, pump_on: bool, consumption: int) -> int:
    """One interval of tank physics: +10 with the pump, -consumption without."""
    if not 0 <= consumption <= 10:
        msg = f"consumption {consumption} outside 0..10"
        raise ConsumptionOutOfRange(msg)
    if pump_on:
        return level + 10
    return level - consumption


def controller_step(state: ControllerState, sensor_level: int,
                    thresholds: Thresholds = Thresholds()):
    """React to a sensor reading; emit a pump signal only on a crossing.

    Output stays sparse: nothing is emitted while the level sits between
    the thresholds, so consecutive emitted signals always alternate.
    """
    if not thresholds.low < thresholds.high:
        msg = f"thresholds {thresholds} are not ordered"
        raise ValueError(msg)
    signal = None
    pump_on = state.pump_on
    if not state.pump_on and sensor_level <= thresholds.low:
        signal = SIGNAL_ON
        pump_on = True
    elif state.pump_on and sensor_level >= thresholds.high:
        signal = SIGNAL_OFF
        pump_on = False
    last = signal if signal is not None else state.last_signal
    return ControllerState(sensor_level, pump_on, last), signal


def closed_loop_component_spec(band=(BAND_LOW, BAND_HIGH)) -> ComponentSpec:
    """Interface spec of the closed loop: steam in, sensor and signals out."""
    return ComponentSpec(
        name="steam-boiler-closed-loop",
        inputs={"steam": "int"},
        outputs={"sensor": "int", "ctrl": "signal"},
        asm=[
            StreamPredicate("ts", {"stream": "steam"}),
            StreamPredicate("each_in_range",
                            {"stream": "steam", "low": 0, "high": 10}),
        ],
        gar=[
            StreamPredicate("level_in_band",
                            {"stream": "sensor", "low": band[0], "high": band[1]}),
            StreamPredicate("signals_alternate", {"stream": "ctrl"}),
        ],
    )


def simulate_closed_loop(thresholds: Thresholds = Thresholds(),
                         intervals: int = 100, seed: int = 0):
    """Run boiler and controller together under random steam consumption.

    Returns (inputs, outputs) as named TimedStreams: steam in, sensor
    reading and control signals out.  Signals take effect one interval
    after they are emitted.
    """
    rng = random.Random(seed)
    level = 500
    pump_effective = False
    controller = ControllerState(level, pump_effective)
    steam, sensor, ctrl = [], [], []
    for _ in range(intervals):
        consumption = rng.randint(0, 10)
        steam.append([IntVal(consumption)])
        level = step_boiler(level, pump_effective, consumption)
        sensor.append([IntVal(level)])
        controller, signal = controller_step(controller, level, thresholds)
        ctrl.append([signal] if signal is not None else [])
        pump_effective = controller.pump_on
    inputs = {"steam": TimedStream(steam)}
    outputs = {"sensor": TimedStream(sensor), "ctrl": TimedStream(ctrl)}
    return inputs, outputs


# ---------------------------------------------------------------------------
# Translation to a temporal spec


def to_temporal_spec(loop: ClosedLoop = ClosedLoop()) -> sp.TemporalSpec:
    """Encode the closed loop as a TemporalSpec over {level, pumpOn}.

    One action per pump mode; each transition applies one interval of
    tank physics and then the controller's decision on the new reading,
    which drives the pump from the next transition on (the one-step
    signal latency of the stream semantics).
    """
    thresholds = loop.thresholds
    if not thresholds.low < thresholds.high:
        msg = f"thresholds {thresholds} are not ordered"
        raise ValueError(msg)
    plant = loop.boiler
    level = sp.Var("level")
    level_next = sp.Primed("level")
    pump = sp.Var("pumpOn")
    pump_next = sp.Primed("pumpOn")

    # decision on the new reading, given the current pump mode
    switches_off = sp.Or(
        sp.And(sp.Ge(level_next, sp.intval(thresholds.high)), sp.Not(pump_next)),
        sp.And(sp.Lt(level_next, sp.intval(thresholds.high)), pump_next))
    switches_on = sp.Or(
        sp.And(sp.Le(level_next, sp.intval(thresholds.low)), pump_next),
        sp.And(sp.Gt(level_next, sp.intval(thresholds.low)), sp.Not(pump_next)))

    pump_fills = sp.conj(
        pump,
        sp.Eq(level_next, sp.Add(level, sp.intval(plant.fill_rate))),
        switches_off)
    steam_drains = sp.conj(
        sp.Not(pump),
        sp.In(level_next,
              sp.IntRange(sp.Sub(level, sp.intval(plant.max_consumption)), level)),
        switches_on)

    lo, hi = plant.tank_range
    type_ok = sp.And(
        sp.In(level, sp.IntRange(sp.intval(lo), sp.intval(hi))),
        sp.In(pump, sp.Const(BOOLEANS)))
    in_band = sp.And(sp.Ge(level, sp.intval(BAND_LOW)),
                     sp.Le(level, sp.intval(BAND_HIGH)))

    return sp.TemporalSpec(
        name="steamboiler",
        variables=("level", "pumpOn"),
        init=sp.And(sp.Eq(level, sp.intval(plant.initial_level)),
                    sp.Eq(pump, sp.Const(FALSE))),
        actions=(
            sp.NamedAction("PumpFills", pump_fills),
            sp.NamedAction("SteamDrains", steam_drains),
        ),
        invariants=(
            ("TypeOK", type_ok),
            ("LevelInBand", in_band),
        ),
        params={"low": thresholds.low, "high": thresholds.high},
    )
