import json
import random

import pytest

from tritsim.conformance import PROFILES, random_sequence
from tritsim.engine import Simulator, Stimulus
from tritsim.errors import ConfigurationError
from tritsim.logic import HALF, HIGH, LOW
from tritsim.metrics import PowerReport, divider_nets, hold_scenario, measure


@pytest.mark.parametrize("cell, value, expected", [
    ("dfff", 0, 0), ("dfff", 1, 1), ("dfff", 2, 0),
    ("dfff_qb", 0, 0), ("dfff_qb", 1, 2), ("dfff_qb", 2, 0),
])
def test_hold_power(flat, cell, value, expected):
    net = flat(cell)
    wave, start = hold_scenario(net, value)
    rep = measure(net, wave, start=start)
    assert set(rep.per_tick_divisions) == {expected}
    assert rep.per_hold_value == {value: expected}
    assert rep.total_division_ticks == expected * len(rep.per_tick_divisions)


def test_division_tracks_half_output(flat):
    # the single divider in the D FFF conducts exactly when Q shows Half one tick later
    net = flat("dfff")
    stim, _, until = random_sequence(PROFILES["dff"], random.Random(4), 60)
    wave = Simulator(net).run(stim, until)
    rep = measure(net, wave, end=until - 1)
    for t, n in enumerate(rep.per_tick_divisions):
        assert n == (wave.value_at("Q", t + 1) is HALF), t


def test_hold_groups_average(flat):
    net = flat("dfff")
    stim = Stimulus().at(0, "CLK", LOW).at(0, "D", HALF).at(10, "CLK", HIGH).at(20, "CLK", LOW)
    stim.at(25, "D", HIGH).at(30, "CLK", HIGH)
    wave = Simulator(net).run(stim, 60)
    # settled windows only: the divider output lags its inputs by one tick
    assert measure(net, wave, start=16, end=30).per_hold_value == {1: 1.0}
    assert measure(net, wave, start=36).per_hold_value == {2: 0.0}
    whole = measure(net, wave, start=16)
    assert set(whole.per_hold_value) == {1, 2}


def test_measure_rejects_missing_nets(flat):
    net = flat("dfff")
    wave = Simulator(net).run(Stimulus().at(0, "CLK", LOW), 5, record=["CLK"])
    with pytest.raises(ConfigurationError, match="output net"):
        measure(net, wave)
    wave = Simulator(net).run(Stimulus().at(0, "CLK", LOW), 5, record=["CLK", "Q"])
    with pytest.raises(ConfigurationError, match="divider input"):
        measure(net, wave)


def test_divider_nets(flat):
    assert divider_nets(flat("dfff")) == [("ff/Q1S", "ff/Q2S")]
    assert len(divider_nets(flat("dfff_qb"))) == 2


def test_report_rendering(flat):
    net = flat("dfff")
    wave, start = hold_scenario(net, 1, hold_ticks=10)
    rep = measure(net, wave, start=start)
    records = [json.loads(line) for line in rep.to_jsonl().splitlines()]
    assert records[0] == {"output": "Q", "start": 30, "ticks": 11, "total_division_ticks": 11}
    assert records[1] == {"hold": 1, "divisions_per_tick": 1.0}
    assert "'1'   1" in rep.to_table()
    with pytest.raises(ValueError):
        PowerReport((1, 2), {}, 4)
