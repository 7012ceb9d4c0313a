import math
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from revkit.energy import EV, TechnologyParams, adiabatic_dissipation, non_adiabatic_dissipation, signal_energy
from revkit.errors import ParseError, ValidationError
from revkit.twolal import (
    DRIVE_FLOATING,
    TURN_OFF_MID_RAMP,
    TURN_ON,
    ClockSchedule,
    LevelConflictError,
    Simulator,
    TwoLALCircuit,
    build_or_element,
    build_shift_register,
    decompute_cycle,
    energy_summary,
    logic_value,
    or_element_circuit,
    parse_circuit,
    read_trace_totals,
    shift_register_output,
    simulate,
    trace_csv,
)

PARAMS = TechnologyParams()
E_AD = adiabatic_dissipation(PARAMS)
PATTERN = [1, 0, 1, 1, 0, 0, 1, 0]


def kinds(result):
    return [v.kind for v in result.ledger.violation_events]


# -- encoding and circuit description ------------------------------------

def test_dual_rail_convention():
    assert logic_value(0.0, 1.0) == 0
    assert logic_value(1.0, 0.0) == 1
    assert logic_value(1.0, 1.0) is None
    assert logic_value(0.5, 0.5) is None


def test_or_element_structure():
    c = TwoLALCircuit()
    c.signal("D")
    c.add_driver("D", [0, 1])
    el = build_or_element(c, "A", "B", "D", "Q")
    gates = {g.id: g for g in c.gates}
    assert len(el.gates) == 4
    n_half = [gates[g] for g in el.gates if ".n" in g]
    assert {(g.terminal_a, g.terminal_b) for g in n_half} == {("D.n", "Q.n")}
    assert sorted(str(g.controls[0]) for g in n_half) == ["A", "B"]
    assert c.transistor_count == 8


def test_and_element_is_series():
    c = TwoLALCircuit()
    c.signal("D")
    c.add_driver("D", [0, 1])
    el = build_or_element(c, "A", "B", "D", "Q", kind="and")
    assert len(el.gates) == 2
    assert all(len(g.controls) == 2 for g in c.gates)


def test_aliased_signals_rejected():
    c = TwoLALCircuit()
    c.signal("D")
    c.add_driver("D", [0, 1])
    with pytest.raises(ValidationError):
        build_or_element(c, "A", "A", "D", "Q")
    with pytest.raises(ValidationError):
        build_or_element(c, "A", "B", "D", "A")


def test_circuit_text_roundtrip():
    c = build_shift_register(2, [1, 0])
    again = parse_circuit(c.to_text())
    assert again.to_text() == c.to_text()
    assert again.transistor_count == c.transistor_count == 8 * 4 * 2 - 4


@pytest.mark.parametrize("text,line", [
    ("signal A\nwidget A\n", 2),
    ("signal A\ndriver A ramp 0102\n", 2),
    ("signal A\ndriver A ramp\n", 2),
    ("signal A B\ntgate g A B.x A.n\n", 2),
    ("signal A\nclock 4 4\n", 2),
    ("signal A Q\nelement or Q A A\n", 2),
    ("signal A D Q\ndriver D ramp 01\nelement xor Q D A A\n", 3),
    ("signal Q\nsink Q x\n", 2),
])
def test_circuit_parse_errors(text, line):
    with pytest.raises(ParseError) as exc:
        parse_circuit(text, source="c.ckt")
    assert exc.value.line == line


# -- OR element -----------------------------------------------------------

def test_or_element_a1_b0_q_rises():
    sim = Simulator(or_element_circuit(1, 0, full_cycle=False))
    sim.run(1)
    assert sim.signal_value("Q") == 1
    assert sim.ledger.violation_events == []


def test_or_element_a0_b0_no_path():
    sim = Simulator(or_element_circuit(0, 0, full_cycle=False))
    result = sim.run(1)
    assert sim.rail_level("Q.n") == 0.0 and sim.rail_level("Q.p") == 1.0
    assert result.ledger.violation_events == []
    assert result.ledger.adiabatic_events == []


def test_or_element_both_inputs_no_violation():
    result = simulate(or_element_circuit(1, 1), 1)
    assert result.ledger.violation_events == []


@pytest.mark.parametrize("a,b", [(0, 1), (1, 0), (1, 1)])
def test_full_cycle_one_charge_one_discharge_per_node(a, b):
    result = simulate(or_element_circuit(a, b), 1)
    events = [(e.node, e.direction) for e in result.ledger.adiabatic_events]
    assert sorted(events) == sorted([("Q.n", "charge"), ("Q.n", "discharge"),
                                     ("Q.p", "charge"), ("Q.p", "discharge")])
    for e in result.ledger.adiabatic_events:
        assert e.energy == E_AD  # full swing books exactly the closed-form value


# -- violation detection --------------------------------------------------------

def step_driver_circuit():
    c = TwoLALCircuit(clock=ClockSchedule(16, 2))
    for s in "ADQ":
        c.signal(s)
    c.add_driver("A", [1])
    c.add_driver("D", [0, 1], mode="step")
    c.add_element("buf", "Q", "D", ["A"])
    return c


def test_step_driver_costs_half_cv2():
    result = simulate(step_driver_circuit(), 1)
    assert kinds(result) == [TURN_ON, TURN_ON]
    for v in result.ledger.violation_events:
        assert v.dissipated == 0.5 * signal_energy(PARAMS)
        assert v.dissipated == non_adiabatic_dissipation(PARAMS, 1.0)


def test_latched_node_driven_from_opposite_level():
    c = TwoLALCircuit(clock=ClockSchedule(16, 5))
    for s in "ADQ":
        c.signal(s)
    c.add_driver("A", [1, 1, 0, 0, 1])
    c.add_driver("D", [0, 1, 1, 0, 0])
    c.add_element("buf", "Q", "D", ["A"])
    result = simulate(c, 2)
    assert set(kinds(result)) == {DRIVE_FLOATING}
    assert {v.node for v in result.ledger.violation_events} == {"Q.n", "Q.p"}


def test_turn_off_mid_ramp():
    # the input is withdrawn in the same interval the drive is still ramping
    c = TwoLALCircuit(clock=ClockSchedule(16, 2))
    for s in "ADQ":
        c.signal(s)
    c.add_driver("A", [1, 0])
    c.add_driver("D", [0, 1])
    c.add_element("buf", "Q", "D", ["A"])
    result = simulate(c, 1)
    assert TURN_OFF_MID_RAMP in kinds(result)
    v = next(v for v in result.ledger.violation_events if v.kind == TURN_OFF_MID_RAMP)
    # cut after one tick of sixteen: left 15/16 short of the end level
    assert v.dissipated == pytest.approx(non_adiabatic_dissipation(PARAMS, 15 / 16), rel=1e-12)


def test_level_conflict_is_hard_error():
    c = TwoLALCircuit(clock=ClockSchedule(16, 2))
    for s in ("C", "D1", "D2", "Q"):
        c.signal(s)
    c.add_driver("C", [1])
    c.add_driver("D1", [0, 1])
    c.add_driver("D2", [0, 0])
    c.add_gate("g1", ["C"], "D1.n", "Q.n")
    c.add_gate("g2", ["C"], "D2.n", "Q.n")
    with pytest.raises(LevelConflictError) as exc:
        simulate(c, 1)
    assert "D1.n" in exc.value.nodes and "D2.n" in exc.value.nodes


def test_equal_level_parallel_paths_no_conflict():
    c = TwoLALCircuit(clock=ClockSchedule(16, 2))
    for s in ("C", "D1", "D2", "Q"):
        c.signal(s)
    c.add_driver("C", [1])
    c.add_driver("D1", [0, 1])
    c.add_driver("D2", [0, 1])
    c.add_gate("g1", ["C"], "D1.n", "Q.n")
    c.add_gate("g2", ["C"], "D2.n", "Q.n")
    result = simulate(c, 1)
    assert result.ledger.violation_events == []


# -- decompute options ------------------------------------------------------------

def test_decompute_option_1_latches_q():
    c = or_element_circuit(1, 0, full_cycle=False)
    c1 = decompute_cycle(c, c.elements[0], 1)
    sim = Simulator(c1)
    result = sim.run(1)
    assert sim.signal_value("A") == 0
    assert sim.rail_level("Q.n") == 1.0 and sim.rail_mode("Q.n") == "floating"
    assert result.ledger.violation_events == []


def test_decompute_option_2_restores_q():
    c = or_element_circuit(1, 0, full_cycle=False)
    c2 = decompute_cycle(c, c.elements[0], 2)
    sim = Simulator(c2)
    result = sim.run(1)
    assert sim.signal_value("A") == 1
    assert sim.rail_level("Q.n") == 0.0
    assert result.ledger.violation_events == []


def test_decompute_option_2_with_live_downstream_flags_violation():
    c = TwoLALCircuit(clock=ClockSchedule(16, 3))
    for s in ("A", "D", "Q", "D2", "Q2"):
        c.signal(s)
    c.add_driver("A", [1, 1, 1])
    c.add_driver("D", [0, 1, 1])
    c.add_driver("D2", [0, 0, 1, 0])
    el = c.add_element("buf", "Q", "D", ["A"])
    c.add_element("buf", "Q2", "D2", ["Q"])
    result = simulate(decompute_cycle(c, el, 2), 1)
    assert TURN_OFF_MID_RAMP in kinds(result)
    assert {v.node for v in result.ledger.violation_events} == {"Q2.n", "Q2.p"}


def test_decompute_errors():
    c = or_element_circuit(1, 0, full_cycle=False)
    with pytest.raises(ValidationError):
        decompute_cycle(c, c.elements[0], 3)
    done = decompute_cycle(c, c.elements[0], 2)
    with pytest.raises(ValidationError):
        decompute_cycle(done, done.elements[0], 2)


# -- shift register --------------------------------------------------------------

def test_shift_register_single_stage():
    result = simulate(build_shift_register(1, [1]), 2)
    assert shift_register_output(result.outputs) == [0, 1]


def test_shift_register_eight_stages():
    cycles = 8 + len(PATTERN)
    result = simulate(build_shift_register(8, PATTERN), cycles)
    assert shift_register_output(result.outputs) == oracles.pure_delay(PATTERN, 8, cycles)
    assert result.ledger.violation_events == []
    assert result.invalid_signals == []


def test_shift_register_all_zero_is_leakage_only():
    result = simulate(build_shift_register(8, [0] * 8), 16)
    assert result.ledger.adiabatic_events == []
    assert result.ledger.violation_events == []
    assert result.ledger.total == result.ledger.leakage_total > 0


def test_shift_register_bad_args():
    with pytest.raises(ValidationError):
        build_shift_register(0)
    with pytest.raises(ValidationError):
        build_shift_register(1, [2])


def test_energy_closed_form():
    # oracle: each 1 that passes through n stages switches 4n cells x 2 rails x (up, down)
    n, cycles = 8, 8 + len(PATTERN) + 1
    result = simulate(build_shift_register(n, PATTERN), cycles)
    transitions = 16 * n * sum(PATTERN)
    assert len(result.ledger.adiabatic_events) == transitions
    s = energy_summary(result)
    per_transistor_cycle = E_AD * transitions / (s.transistors * s.cycles)
    assert s.adiabatic_J / (s.transistors * s.cycles) == pytest.approx(per_transistor_cycle, rel=1e-12)


def test_tau_doubling_halves_adiabatic():
    c = build_shift_register(8, PATTERN)
    a = simulate(c, 16, PARAMS).ledger.adiabatic_total
    b = simulate(c, 16, PARAMS.with_overrides(ramp_time=2 * PARAMS.ramp_time)).ledger.adiabatic_total
    assert b / a == pytest.approx(0.5, rel=0.05)


def test_energy_summary_fields():
    result = simulate(build_shift_register(2, [1, 1]), 4)
    s = energy_summary(result)
    assert s.total_J == result.ledger.total
    assert s.per_transistor_cycle_eV == pytest.approx(s.per_transistor_cycle_J / EV)
    assert s.ratio_to_signal == pytest.approx(s.per_transistor_cycle_J / signal_energy(PARAMS))
    assert s.as_dict()["violation_count"] == 0
    assert "eV/transistor/cycle" in s.to_text()


def test_energy_summary_needs_a_cycle():
    sim = Simulator(build_shift_register(1, [1]))
    sim.run_ticks(10)
    with pytest.raises(ValidationError):
        energy_summary(sim.result())
    with pytest.raises(ValidationError):
        sim.run(0)


# -- traces and determinism ----------------------------------------------------------

def test_trace_roundtrip_reproduces_totals():
    result = simulate(build_shift_register(2, [1, 0, 1]), 6, trace=True)
    totals = read_trace_totals(trace_csv(result))
    assert totals.adiabatic == result.ledger.adiabatic_total
    assert totals.violation == result.ledger.violation_total
    assert totals.leakage == result.ledger.leakage_total
    assert totals.total == result.ledger.total
    assert trace_csv(result).splitlines()[0] == "tick,node,level,mode,event_kind,energy_J"


def test_trace_roundtrip_with_violations():
    result = simulate(step_driver_circuit(), 1, trace=True)
    totals = read_trace_totals(trace_csv(result))
    assert totals.violation == result.ledger.violation_total > 0


def test_trace_parse_errors():
    with pytest.raises(ParseError):
        read_trace_totals("a,b\n")
    with pytest.raises(ParseError):
        read_trace_totals("tick,node,level,mode,event_kind,energy_J\n1,x,0,held,weird,1.0\n")


def test_determinism_bit_exact():
    c = build_shift_register(3, [1, 1, 0, 1])
    a = simulate(c, 8, trace=True)
    b = simulate(c, 8, trace=True)
    assert a.trace == b.trace
    assert a.ledger.adiabatic_events == b.ledger.adiabatic_events
    assert a.ledger.total == b.ledger.total


def test_simulation_does_not_mutate_circuit():
    c = build_shift_register(1, [1])
    before = c.to_text()
    simulate(c, 2)
    assert c.to_text() == before


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.lists(st.integers(0, 1), min_size=1, max_size=6),
       st.sampled_from([1, 2, 4]))
def test_shift_register_properties(n, pattern, ticks):
    cycles = n + len(pattern)
    result = simulate(build_shift_register(n, pattern, ticks), cycles)
    assert shift_register_output(result.outputs) == oracles.pure_delay(pattern, n, cycles)
    ledger = result.ledger
    assert ledger.violation_events == []
    assert result.invalid_signals == []
    assert all(e.energy >= 0 for e in ledger.adiabatic_events)
    assert ledger.leakage_total >= 0
    assert ledger.total == math.fsum([ledger.adiabatic_total, ledger.violation_total, ledger.leakage_total])


@settings(max_examples=25, deadline=None)
@given(st.randoms(use_true_random=False))
def test_random_circuits_never_negative(rng):
    # arbitrary driver waveforms on an OR element: violations allowed, negative energy never
    c = TwoLALCircuit(clock=ClockSchedule(4, 4))
    for s in ("A", "B", "D", "Q"):
        c.signal(s)
    for s in ("A", "B", "D"):
        c.add_driver(s, [rng.randint(0, 1) for _ in range(8)], mode=rng.choice(["ramp", "step"]))
    c.add_element("or", "Q", "D", ("A", "B"))
    result = simulate(c, 2)
    assert all(v.dissipated >= 0 for v in result.ledger.violation_events)
    assert all(e.energy >= 0 for e in result.ledger.adiabatic_events)
