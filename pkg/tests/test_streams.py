"""Timed streams, assumption/guarantee checking, boiler dynamics."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

import tmbt.spec as sp
from tmbt.errors import ConsumptionOutOfRange, TypeMismatch
from tmbt.explore import explore, initial_states
from tmbt.streams import (
    SIGNAL_OFF,
    SIGNAL_ON,
    AssumptionViolated,
    BoilerPlant,
    ClosedLoop,
    ComponentSpec,
    Conforms,
    ControllerState,
    GuaranteeViolated,
    StreamPredicate,
    Thresholds,
    TimedStream,
    check_asm_gar,
    closed_loop_component_spec,
    controller_step,
    simulate_closed_loop,
    step_boiler,
    to_temporal_spec,
    ts,
)
from tmbt.values import FALSE, IntVal

ONE_PER_INTERVAL = TimedStream([[IntVal(3)], [IntVal(1)], [IntVal(4)]])
GAPPY = TimedStream([[IntVal(3)], [], [IntVal(4)]])
BURSTY = TimedStream([[IntVal(3)], [IntVal(1), IntVal(1)]])


class TestTimedStream:
    def test_intervals_are_normalized_to_tuples(self):
        s = TimedStream([[IntVal(1)], []])
        assert s.intervals == ((IntVal(1),), ())
        assert len(s) == 2
        assert s.at(0) == (IntVal(1),)

    def test_json_round_trip(self):
        data = ONE_PER_INTERVAL.to_json()
        assert data == [[3], [1], [4]]  # arrays of arrays, bare scalars
        assert TimedStream.from_json(data) == ONE_PER_INTERVAL

    def test_empty_stream(self):
        assert TimedStream().to_json() == []
        assert len(TimedStream()) == 0


class TestTs:
    def test_exactly_one_message_everywhere(self):
        assert ts(ONE_PER_INTERVAL, 3)

    def test_empty_interval_fails(self):
        assert not ts(GAPPY, 3)

    def test_two_messages_fail(self):
        assert not ts(BURSTY, 2)

    def test_prefix_shorter_than_the_gap_passes(self):
        assert ts(GAPPY, 1)  # the gap at interval 1 is out of range

    def test_asking_past_the_recorded_prefix_is_an_error(self):
        with pytest.raises(ValueError, match="3 intervals"):
            ts(ONE_PER_INTERVAL, 4)

    def test_zero_prefix_is_vacuously_true(self):
        assert ts(TimedStream(), 0)


class TestStreamPredicate:
    def test_ts_kind(self):
        p = StreamPredicate("ts", {"stream": "steam"})
        assert p.check_assumption({"steam": ONE_PER_INTERVAL}, 3)
        assert not p.check_assumption({"steam": GAPPY}, 3)

    def test_each_in_range(self):
        p = StreamPredicate("each_in_range", {"stream": "steam", "low": 0,
                                              "high": 10})
        assert p.check_assumption({"steam": ONE_PER_INTERVAL}, 3)
        bad = TimedStream([[IntVal(11)]])
        assert not p.check_assumption({"steam": bad}, 1)

    def test_level_in_band_is_per_interval(self):
        p = StreamPredicate("level_in_band", {"stream": "sensor", "low": 200,
                                              "high": 800})
        sensor = TimedStream([[IntVal(500)], [IntVal(199)]])
        assert p.check_guarantee({}, {"sensor": sensor}, {}, 0)
        assert not p.check_guarantee({}, {"sensor": sensor}, {}, 1)

    def test_signals_alternate(self):
        p = StreamPredicate("signals_alternate", {"stream": "ctrl"})
        good = TimedStream([[SIGNAL_ON], [], [SIGNAL_OFF], [SIGNAL_ON]])
        assert p.check_guarantee({}, {"ctrl": good}, {}, 3)
        stuck = TimedStream([[SIGNAL_ON], [SIGNAL_ON]])
        assert not p.check_guarantee({}, {"ctrl": stuck}, {}, 1)

    def test_unknown_kind_is_rejected(self):
        with pytest.raises(TypeMismatch, match="unknown assumption kind"):
            StreamPredicate("nope", {"stream": "s"}).check_assumption(
                {"s": ONE_PER_INTERVAL}, 1)

    def test_guarantee_may_reference_an_input_stream(self):
        p = StreamPredicate("level_in_band", {"stream": "steam", "low": 0,
                                              "high": 10})
        assert p.check_guarantee({"steam": ONE_PER_INTERVAL}, {}, {}, 0)

    def test_json_round_trip(self):
        p = StreamPredicate("each_in_range", {"stream": "steam", "low": 0,
                                              "high": 10})
        assert StreamPredicate.from_json(p.to_json()) == p
        assert p.to_json()["kind"] == "each_in_range"


class TestComponentSpec:
    def test_json_round_trip(self):
        comp = closed_loop_component_spec()
        again = ComponentSpec.from_json(comp.to_json())
        assert again == comp  # advance hook is None on both sides

    def test_json_sections(self):
        data = closed_loop_component_spec().to_json()
        assert data["in"] == {"steam": "int"}
        assert data["out"] == {"sensor": "int", "ctrl": "signal"}
        assert [p["kind"] for p in data["asm"]] == ["ts", "each_in_range"]
        assert [p["kind"] for p in data["gar"]] == ["level_in_band",
                                                    "signals_alternate"]


class TestCheckAsmGar:
    COMP = closed_loop_component_spec()

    def run(self, thresholds=Thresholds(), intervals=100, seed=0):
        ins, outs = simulate_closed_loop(thresholds, intervals, seed)
        return check_asm_gar(self.COMP, ins, outs, intervals)

    def test_reference_loop_conforms_for_100_intervals(self):
        assert self.run() == Conforms()

    def test_broken_assumption_short_circuits(self):
        ins = {"steam": GAPPY}
        outs = {"sensor": TimedStream([[IntVal(-1)]] * 3),  # band also broken
                "ctrl": TimedStream([[], [], []])}
        verdict = check_asm_gar(self.COMP, ins, outs, 3)
        assert verdict == AssumptionViolated(index=0)  # vacuous: gar unjudged

    def test_out_of_range_steam_is_the_second_assumption(self):
        ins = {"steam": TimedStream([[IntVal(99)]])}
        outs = {"sensor": TimedStream([[IntVal(500)]]),
                "ctrl": TimedStream([[]])}
        assert check_asm_gar(self.COMP, ins, outs, 1) == AssumptionViolated(1)

    def test_loose_thresholds_blow_the_band_guarantee(self):
        verdict = self.run(Thresholds(190, 810))
        assert verdict == GuaranteeViolated(index=0, interval=57)

    def test_guarantee_failure_reports_first_interval(self):
        ins = {"steam": TimedStream([[IntVal(5)], [IntVal(5)]])}
        outs = {"sensor": TimedStream([[IntVal(500)], [IntVal(100)]]),
                "ctrl": TimedStream([[], []])}
        assert check_asm_gar(self.COMP, ins, outs, 2) == GuaranteeViolated(0, 1)


class TestBoilerDynamics:
    def test_pump_adds_ten(self):
        assert step_boiler(500, True, 7) == 510  # consumption ignored

    def test_steam_drains_without_the_pump(self):
        assert step_boiler(500, False, 10) == 490
        assert step_boiler(500, False, 0) == 500

    def test_consumption_out_of_range(self):
        with pytest.raises(ConsumptionOutOfRange):
            step_boiler(500, False, 11)
        with pytest.raises(ConsumptionOutOfRange):
            step_boiler(500, False, -1)

    @given(st.integers(0, 1000), st.booleans(), st.integers(0, 10))
    def test_level_moves_at_most_ten(self, level, pump_on, consumption):
        assert abs(step_boiler(level, pump_on, consumption) - level) <= 10


class TestControllerStep:
    def test_low_crossing_switches_the_pump_on(self):
        state = ControllerState(500, False)
        state, signal = controller_step(state, 290)
        assert signal == SIGNAL_ON
        assert state.pump_on and state.water_level == 290

    def test_between_thresholds_emits_nothing(self):
        state, signal = controller_step(ControllerState(500, False), 500)
        assert signal is None
        assert not state.pump_on

    def test_high_crossing_switches_the_pump_off(self):
        state, signal = controller_step(ControllerState(690, True), 710)
        assert signal == SIGNAL_OFF
        assert not state.pump_on

    def test_no_repeat_signal_while_already_on(self):
        state, signal = controller_step(ControllerState(290, True), 280)
        assert signal is None  # already pumping, no second "on"

    def test_last_signal_is_remembered(self):
        state, _ = controller_step(ControllerState(500, False), 290)
        state, signal = controller_step(state, 400)
        assert signal is None
        assert state.last_signal == SIGNAL_ON

    def test_unordered_thresholds_are_rejected(self):
        with pytest.raises(ValueError):
            controller_step(ControllerState(500, False), 500, Thresholds(700, 300))

    @given(st.lists(st.integers(0, 1000), max_size=60))
    def test_emitted_signals_strictly_alternate(self, readings):
        state = ControllerState(500, False)
        emitted = []
        for reading in readings:
            state, signal = controller_step(state, reading)
            if signal is not None:
                emitted.append(signal)
        assert all(a != b for a, b in zip(emitted, emitted[1:]))


class TestSimulateClosedLoop:
    def test_deterministic_under_seed(self):
        assert simulate_closed_loop(seed=5) == simulate_closed_loop(seed=5)
        assert simulate_closed_loop(seed=5) != simulate_closed_loop(seed=6)

    def test_stream_shapes(self):
        ins, outs = simulate_closed_loop(intervals=30, seed=1)
        assert set(ins) == {"steam"} and set(outs) == {"sensor", "ctrl"}
        assert len(ins["steam"]) == len(outs["sensor"]) == len(outs["ctrl"]) == 30
        assert ts(ins["steam"], 30)  # exactly one consumption per interval
        assert ts(outs["sensor"], 30)


class TestToTemporalSpec:
    def test_initial_state_is_the_half_full_idle_tank(self):
        spec = to_temporal_spec()
        [init] = initial_states(spec)
        assert init["level"] == IntVal(500)
        assert init["pumpOn"] == FALSE

    def test_unordered_thresholds_are_rejected(self):
        with pytest.raises(ValueError):
            to_temporal_spec(ClosedLoop(thresholds=Thresholds(700, 300)))

    def test_every_transition_moves_the_level_at_most_ten(self):
        graph, _, _ = explore(to_temporal_spec())
        for source, action, target in graph.edges:
            delta = target["level"].value - source["level"].value
            if action == "PumpFills":
                assert delta == 10
            else:
                assert -10 <= delta <= 0

    def test_default_loop_is_safe(self):
        graph, stats, cexs = explore(to_temporal_spec())
        assert cexs == []
        assert stats.distinct_states == 818
        assert all(200 <= s["level"].value <= 800 for s in graph.nodes)

    def test_loose_loop_is_not(self):
        loop = ClosedLoop(thresholds=Thresholds(190, 810))
        _, _, cexs = explore(to_temporal_spec(loop))
        assert any(c.invariant == "LevelInBand" for c in cexs)

    def test_parameters_are_recorded(self):
        spec = to_temporal_spec(ClosedLoop(thresholds=Thresholds(250, 750)))
        assert spec.param_map() == {"low": 250, "high": 750}
