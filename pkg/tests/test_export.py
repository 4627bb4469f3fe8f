import csv
import io
import math
import random

import pytest

from tritsim.conformance import PROFILES, random_sequence
from tritsim.engine import Simulator, Stimulus
from tritsim.errors import ConfigurationError
from tritsim.export import (
    VcdConfig, export_csv, export_vcd, extract_truth_table, state_nets, truth_table_csv, vcd_id,
)
from tritsim.logic import HALF, HIGH, LOW, UNKNOWN

VEC = {"b00": LOW, "b01": HALF, "b10": HIGH, "bxx": UNKNOWN}
BIT = {"0": LOW, "1": HIGH, "x": UNKNOWN}


def read_vcd(data: bytes):
    """Minimal reader: returns ({path: [(t, level)]}, {path: [(t, float)]}, header lines)."""
    lines = data.decode("ascii").splitlines()
    scopes, ids, header = [], {}, []
    i = 0
    while not lines[i].startswith("$enddefinitions"):
        tok = lines[i].split()
        header.append(lines[i])
        if tok[0] == "$scope":
            scopes.append(tok[2])
        elif tok[0] == "$upscope":
            scopes.pop()
        elif tok[0] == "$var":
            path = "/".join(scopes[1:] + [tok[4]])
            ids[tok[3]] = (tok[1], path)
        i += 1
    levels, reals, t = {}, {}, 0
    for line in lines[i + 1:]:
        if line.startswith("#"):
            t = int(line[1:])
        elif line.startswith("$"):
            continue
        elif line[0] == "b":
            val, vid = line.split()
            levels.setdefault(ids[vid][1], []).append((t, VEC[val]))
        elif line[0] == "r":
            val, vid = line.split()
            reals.setdefault(ids[vid][1], []).append((t, float(val[1:])))
        else:
            levels.setdefault(ids[line[1:]][1], []).append((t, BIT[line[0]]))
    return levels, reals, header


@pytest.fixture
def dfff_wave(flat):
    net = flat("dfff")
    stim, _, until = random_sequence(PROFILES["dff"], random.Random(2), 30)
    return Simulator(net).run(stim, until)


def test_vcd_round_trip(dfff_wave):
    levels, reals, header = read_vcd(export_vcd(dfff_wave))
    assert set(levels) == set(dfff_wave.nets)
    for n in dfff_wave.nets:
        assert levels[n] == dfff_wave.traces[n]
    for t, v in reals["Q_v"] if "Q_v" in reals else reals["Q"]:
        lv = dfff_wave.value_at("Q", t)
        assert (math.isnan(v) and lv is UNKNOWN) or v == lv.voltage
    assert any("$var wire 2" in h and " Q [1:0]" in h for h in header)
    assert any("$var wire 1" in h and " CLK " in h for h in header)
    assert any("$scope module master" in h for h in header)


def test_vcd_constant_low_net(flat):
    net = flat("dfff")
    wave = Simulator(net).run(Stimulus().at(0, "CLK", LOW).at(0, "D", LOW), 40)
    text = export_vcd(wave, VcdConfig(net_selection=["CLK"])).decode()
    body = text.split("$enddefinitions $end\n", 1)[1]
    assert body == "#0\n$dumpvars\n0!\n$end\n"


def test_vcd_is_deterministic(dfff_wave):
    assert export_vcd(dfff_wave) == export_vcd(dfff_wave)


def test_vcd_empty_selection_warns(dfff_wave):
    with pytest.warns(UserWarning, match="only a header"):
        data = export_vcd(dfff_wave, VcdConfig(net_selection=[]))
    assert data.decode().endswith("$enddefinitions $end\n")
    assert "$var" not in data.decode()
    with pytest.warns(UserWarning, match="matches no net"):
        export_vcd(dfff_wave, VcdConfig(net_selection=["nothing*"]))


def test_vcd_selection_and_timescale(dfff_wave):
    data = export_vcd(dfff_wave, VcdConfig("10ps", ["ff/master/*", "Q"], "dut")).decode()
    levels, _, header = read_vcd(data.encode())
    assert header[1] == "$timescale 10ps $end"
    assert header[2] == "$scope module dut $end"
    assert "Q" in levels and all(n == "Q" or n.startswith("ff/master/") for n in levels)


def test_vcd_ids_unique():
    ids = [vcd_id(n) for n in range(20000)]
    assert len(set(ids)) == len(ids)
    assert all(33 <= ord(c) <= 126 for i in ids for c in i)


def test_csv_export(dfff_wave):
    rows = list(csv.reader(io.StringIO(export_csv(dfff_wave, ["CLK", "D", "Q"]))))
    assert rows[0] == ["time", "CLK", "D", "Q"]
    for r in rows[1:]:
        t = int(r[0])
        assert r[1:] == [dfff_wave.value_at(n, t).value for n in ("CLK", "D", "Q")]


def test_level_fff_extraction(flat):
    net = flat("level_fff")
    rows = extract_truth_table(net, ["Z1", "Z2"], ["Q"])
    got = [(r.input("Z1"), r.input("Z2"), r.output("Q")) for r in rows]
    assert got == [(LOW, LOW, LOW), (LOW, HIGH, HALF), (HIGH, LOW, HALF), (HIGH, HIGH, HIGH)]
    assert all(r.status == "ok" and r.settle_ticks <= 4 for r in rows)
    text = truth_table_csv(rows, net, "clocked", clock_label="High")
    assert text.splitlines() == [
        "CLK,Z1,Z2,Q,State",
        "High,Low,Low,0,Set '0'",
        "High,Low,High,1,Set '1'",
        "High,High,Low,1,Set '1'",
        "High,High,High,2,Set '2'",
    ]


def test_dfff_extraction(flat):
    net = flat("dfff")
    rows = extract_truth_table(net)
    assert [(r.input("D"), r.output("Q")) for r in rows] == [(LOW, LOW), (HALF, HALF), (HIGH, HIGH)]
    assert truth_table_csv(rows, net).splitlines()[1:] == [
        "↑,0,0,Set '0'", "↑,1,1,Set '1'", "↑,2,2,Set '2'"]


def test_latch_combinational_table(flat):
    net = flat("tlatch_noqb")
    assert set(state_nets(net)) == {"Q1", "Q2"}
    rows = extract_truth_table(net, mode="combinational")
    by_in = {(r.input("S1"), r.input("S2")): r for r in rows}
    assert by_in[(HIGH, LOW)].status == "OSC"
    assert by_in[(LOW, LOW)].output("Q") is LOW
    assert by_in[(LOW, HIGH)].output("Q") is HALF
    assert by_in[(HIGH, HIGH)].output("Q") is HIGH
    lines = truth_table_csv(rows, net, "combinational").splitlines()
    assert lines[0] == "S1,S2,Q,State"
    assert "High,Low,OSC,Oscillating" in lines


def test_feedback_free_cells_have_no_state_nets():
    from tritsim.logic import GateKind
    from tritsim.netlist import CellDef, CellInstance, Direction, Port, elaborate
    cell = CellDef("inv", (Port("a", Direction.IN), Port("y", Direction.OUT)),
                   (CellInstance("g", GateKind.NOT, ("a",), ("y",)),))
    net = elaborate(cell)
    assert state_nets(net) == []
    rows = extract_truth_table(net, mode="combinational")
    assert [(r.input("a"), r.output("y")) for r in rows] == [(LOW, HIGH), (HIGH, LOW)]


def test_extraction_errors(flat):
    with pytest.raises(ConfigurationError):
        extract_truth_table(flat("dfff"), mode="sideways")
    with pytest.raises(ConfigurationError):
        extract_truth_table(flat("dfff"), ["nope"])
    with pytest.raises(ConfigurationError):
        extract_truth_table(flat("tlatch"), ["S1"], mode="clocked")
