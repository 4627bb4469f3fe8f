import itertools
import random

import pytest

from tritsim import golden
from tritsim.engine import (
    Oscillating, Simulator, Stable, Stimulus, format_stimulus, parse_stimulus, run, settle, step,
)
from tritsim.errors import BudgetExceeded, SimulationFault, StimulusError
from tritsim.logic import HALF, HIGH, LOW, UNKNOWN, GateKind, bit, level_of
from tritsim.netlist import CellDef, CellInstance, Direction, Port, elaborate


def latch_recurrence(s1, s2, q1, q2, n):
    # cross-coupled pair with one delay per gate: Q1' = S1.Q2, Q2' = S2 + Q1
    out = []
    for _ in range(n):
        q1, q2 = s1 and q2, s2 or q1
        out.append((q1, q2))
    return out


def test_oracle_agrees_with_golden_latch_steps():
    for (s1, s2), (q1, q2), expected in golden.LATCH_STEPS:
        assert latch_recurrence(s1, s2, q1, q2, 3) == expected


@pytest.mark.parametrize("row", range(16))
def test_latch_step_rows(flat, row):
    (s1, s2), (q1, q2), _ = golden.LATCH_STEPS[row]
    sim = Simulator(flat("tlatch"))
    stim = Stimulus(initial={"Q1": bit(q1), "Q2": bit(q2)}).at(0, "S1", bit(s1)).at(0, "S2", bit(s2))
    state = sim.initial_state(stim)
    for want in latch_recurrence(s1, s2, q1, q2, 3):
        state = sim.step(state)
        assert (state.values["Q1"], state.values["Q2"]) == tuple(map(bit, want))


def test_settle_stable_in_one_tick(flat):
    sim = Simulator(flat("tlatch"))
    stim = Stimulus(initial={"Q1": LOW, "Q2": LOW}).at(0, "S1", LOW).at(0, "S2", LOW)
    res = sim.settle(sim.initial_state(stim))
    # Q and the taps still need to propagate from the initial Unknowns
    assert isinstance(res, Stable)
    st = sim.initial_state(Stimulus(initial=res.state.values))
    again = sim.settle(st)
    assert isinstance(again, Stable) and again.ticks_used == 1


@pytest.mark.parametrize("q1, q2", [(LOW, HIGH), (HIGH, LOW)])
def test_unstable_input_oscillates(flat, q1, q2):
    sim = Simulator(flat("tlatch"))
    stim = Stimulus(initial={"Q1": q1, "Q2": q2}).at(0, "S1", HIGH).at(0, "S2", LOW)
    res = sim.settle(sim.initial_state(stim))
    assert isinstance(res, Oscillating) and res.period == 2


def test_budget_exceeded(flat):
    sim = Simulator(flat("tlatch"))
    stim = Stimulus(initial={"Q1": LOW, "Q2": HIGH}).at(0, "S1", HIGH).at(0, "S2", LOW)
    with pytest.raises(BudgetExceeded):
        sim.settle(sim.initial_state(stim), max_ticks=1)
    with pytest.raises(ValueError):
        sim.settle(sim.initial_state(stim), max_ticks=0)


def test_all_unknown_start_stays_unknown_in_latch_loop(flat):
    sim = Simulator(flat("tlatch"))
    state = sim.initial_state(Stimulus().at(0, "S1", HIGH).at(0, "S2", LOW))
    res = sim.settle(state)
    assert res.state.values["Q"] is UNKNOWN


def test_stimulus_validation(flat):
    sim = Simulator(flat("dfff"))
    with pytest.raises(StimulusError, match="not an input"):
        sim.initial_state(Stimulus().at(3, "Q", HIGH))
    with pytest.raises(StimulusError, match="binary"):
        sim.initial_state(Stimulus().at(0, "CLK", HALF))
    with pytest.raises(StimulusError, match="unknown net"):
        sim.initial_state(Stimulus().at(0, "nope", HIGH))
    with pytest.raises(StimulusError):
        sim.initial_state(Stimulus().at(-1, "D", HIGH))
    with pytest.raises(StimulusError, match="beyond"):
        sim.run(Stimulus().at(50, "D", HIGH), until=10)
    # internal nets may be seeded through initial values
    st = sim.initial_state(Stimulus(initial={"ff/Q1S": HIGH}))
    assert st.values["ff/Q1S"] is HIGH


def _half_into_and():
    cell = CellDef("leak", (Port("a", Direction.IN, ternary=True), Port("b", Direction.IN),
                            Port("y", Direction.OUT)), (
        CellInstance("pass", GateKind.BUF, ("a",), ("m",)),
        CellInstance("g", GateKind.AND2, ("m", "b"), ("y",)),
    ))
    return elaborate(cell)


def test_half_reaching_binary_pin_is_fault():
    flat = _half_into_and()
    with pytest.raises(SimulationFault) as info:
        Simulator(flat).run(Stimulus().at(0, "a", HALF).at(0, "b", HIGH), until=5)
    assert info.value.net == "m" and info.value.time == 1
    # binary levels on the same path are fine
    wave = Simulator(flat).run(Stimulus().at(0, "a", HIGH).at(0, "b", HIGH), until=5)
    assert wave.value_at("y", 2) is HIGH


def test_divider_into_binary_pin_is_fault():
    cell = CellDef("bad", (Port("a", Direction.IN), Port("b", Direction.IN), Port("y", Direction.OUT)), (
        CellInstance("avg", GateKind.AVERAGER2, ("a", "b"), ("m",)),
        CellInstance("inv", GateKind.NOT, ("m",), ("y",)),
    ))
    with pytest.raises(SimulationFault):
        run(elaborate(cell), Stimulus().at(0, "a", LOW).at(0, "b", HIGH), 4)


def test_shuffled_order_is_equivalent(flat):
    net = flat("dfff")
    sim = Simulator(net)
    rng = random.Random(5)
    stim = Stimulus().at(0, "CLK", LOW).at(0, "D", HALF).at(8, "CLK", HIGH).at(16, "D", HIGH)
    stim.at(24, "CLK", LOW).at(32, "CLK", HIGH)
    a = b = sim.initial_state(stim)
    for _ in range(40):
        a = sim.step(a)
        b = sim.step(b, shuffle=rng)
        assert a == b


def test_run_matches_stepping(flat):
    # run() skips idle stretches and re-evaluates fanout only; stepping does neither
    net = flat("edge_fff")
    sim = Simulator(net)
    stim = Stimulus().at(0, "CLK", LOW).at(0, "ZB1", HIGH).at(0, "ZB2", LOW)
    stim.at(20, "CLK", HIGH).at(45, "ZB1", LOW).at(60, "CLK", LOW).at(90, "CLK", HIGH)
    wave = sim.run(stim, 120)
    state = sim.initial_state(stim)
    for t in range(1, 121):
        state = sim.step(state)
        for n in net.nets:
            assert wave.value_at(n, t) is state.values[n], (n, t)


def test_data_at_edge_tick_is_not_sampled(flat):
    # the edge samples data from before the tick on which it lands
    net = flat("dfff")
    stim = Stimulus().at(0, "CLK", LOW).at(0, "D", LOW).at(8, "CLK", HIGH).at(16, "CLK", LOW)
    stim.at(30, "D", HIGH).at(30, "CLK", HIGH)
    wave = Simulator(net).run(stim, 50)
    assert wave.value_at("Q", 50) is not HIGH


def test_deterministic_runs(flat):
    net = flat("dfff_qb")
    stim = Stimulus().at(0, "CLK", LOW).at(0, "D", HIGH).at(10, "CLK", HIGH)
    assert run(net, stim, 30) == run(net, stim, 30)


def test_functional_wrappers(flat):
    net = flat("tlatch")
    state = Simulator(net).initial_state(Stimulus(initial={"Q1": LOW, "Q2": LOW}).at(0, "S1", LOW).at(0, "S2", HIGH))
    assert step(net, state).values["Q2"] is HIGH
    assert isinstance(settle(net, state), Stable)


@pytest.mark.parametrize("d", [0, 1, 2])
def test_dfff_rising_edge_writes_d(flat, d):
    net = flat("dfff")
    stim = Stimulus().at(0, "CLK", LOW).at(0, "D", level_of(d)).at(10, "CLK", HIGH)
    wave = Simulator(net).run(stim, 30)
    assert wave.value_at("Q", 14) is level_of(d)
    assert all(t <= 14 for t, _ in wave.changes("Q"))


def test_waveform_queries(flat):
    net = flat("dfff")
    stim = Stimulus().at(0, "CLK", LOW).at(0, "D", HIGH).at(10, "CLK", HIGH)
    wave = Simulator(net).run(stim, 30, record=["CLK", "Q"])
    assert wave.nets == ("CLK", "Q")
    assert wave.changes("CLK") == [(10, HIGH)]
    assert wave.value_at("CLK", 9) is LOW and wave.value_at("CLK", 10) is HIGH
    assert wave.value_at("Q", 0) is UNKNOWN


def test_stimulus_text_round_trip():
    text = ("# demo\ntime,net,value\n@init,ff/Q1S,0\n0,CLK,0\n0,D,H\n10,CLK,1\n"
            "20,D,2  # alias\n\n")
    stim = parse_stimulus(text)
    assert stim.initial == {"ff/Q1S": LOW}
    assert [(e.at, e.net, e.new_value) for e in stim.events] == [
        (0, "CLK", LOW), (0, "D", HALF), (10, "CLK", HIGH), (20, "D", HIGH)]
    again = parse_stimulus(format_stimulus(stim))
    assert again.initial == stim.initial
    assert [(e.at, e.net, e.new_value) for e in again.events] == [
        (e.at, e.net, e.new_value) for e in stim.events]


@pytest.mark.parametrize("bad", ["0,CLK", "x,CLK,1", "0,CLK,7"])
def test_stimulus_text_errors(bad):
    with pytest.raises(StimulusError, match="line 1"):
        parse_stimulus(bad)


def test_single_gate_delay():
    for kind in (GateKind.AND2, GateKind.OR2, GateKind.NAND2, GateKind.NOR2):
        cell = CellDef("g", (Port("a", Direction.IN), Port("b", Direction.IN), Port("y", Direction.OUT)),
                       (CellInstance("g", kind, ("a", "b"), ("y",)),))
        sim = Simulator(elaborate(cell))
        for a, b in itertools.product((LOW, HIGH), repeat=2):
            wave = sim.run(Stimulus().at(0, "a", a).at(0, "b", b), 3)
            assert wave.value_at("y", 0) is UNKNOWN
            assert wave.value_at("y", 1) is not UNKNOWN
