"""Waveform writers (VCD, CSV) and exhaustive truth-table extraction."""

from __future__ import annotations

import csv
import fnmatch
import io
import itertools
import warnings
from dataclasses import dataclass, field

import networkx as nx

from .engine import DEFAULT_MAX_TICKS, Oscillating, SimState, Simulator, Stimulus, Waveform
from .errors import BudgetExceeded, ConfigurationError
from .logic import HALF, HIGH, LOW, UNKNOWN, LogicLevel, trit_of
from .netlist import FlatNetlist

# -- VCD ----------------------------------------------------------------------------


@dataclass
class VcdConfig:
    timescale_label: str = "1ns"
    #: fnmatch patterns over net paths; ``None`` selects every net
    net_selection: list[str] | None = None
    top_scope: str = "top"


_VCD_BIT = {LOW: "0", HIGH: "1", UNKNOWN: "x"}
_VCD_VEC = {LOW: "b00", HALF: "b01", HIGH: "b10", UNKNOWN: "bxx"}
_VCD_REAL = {LOW: "r0", HALF: "r0.5", HIGH: "r1", UNKNOWN: "rnan"}


def vcd_id(n: int) -> str:
    """Compact identifier from the printable range ``!``..``~``."""
    chars = [chr(c) for c in range(33, 127)]
    out = []
    while True:
        n, r = divmod(n, len(chars))
        out.append(chars[r])
        if n == 0:
            return "".join(reversed(out))
        n -= 1


def select_nets(nets, patterns: list[str] | None) -> list[str]:
    if patterns is None:
        return list(nets)
    if not patterns:
        warnings.warn("empty net selection: VCD will contain only a header", stacklevel=3)
        return []
    chosen = []
    for pat in patterns:
        hits = [n for n in nets if fnmatch.fnmatchcase(n, pat)]
        if not hits:
            warnings.warn(f"net pattern {pat!r} matches no net", stacklevel=3)
        chosen.extend(hits)
    return list(dict.fromkeys(n for n in nets if n in set(chosen)))


def export_vcd(waveform: Waveform, config: VcdConfig | None = None) -> bytes:
    """Render a waveform as VCD.

    Binary nets are 1-bit wires. Nets that can carry Half become 2-bit
    vectors holding the trit (``b00``/``b01``/``b10``) plus a companion
    ``real`` variable named ``<net>_v`` with the voltage fraction.
    """
    config = config or VcdConfig()
    nets = select_nets(waveform.nets, config.net_selection)
    ternary = {n for n in nets if n in waveform.ternary
               or any(v is HALF for _, v in waveform.traces[n])}

    ids: dict[str, tuple[str, ...]] = {}
    k = 0
    for n in nets:
        width = 2 if n in ternary else 1
        ids[n] = tuple(vcd_id(k + j) for j in range(width))
        k += width

    out = io.StringIO()
    out.write("$comment tritsim unit-delay waveform $end\n")
    out.write(f"$timescale {config.timescale_label} $end\n")
    out.write(f"$scope module {config.top_scope} $end\n")

    # nested scopes follow the '/' hierarchy
    tree: dict = {}
    for n in nets:
        node = tree
        *scopes, leaf = n.split("/")
        for s in scopes:
            node = node.setdefault(("scope", s), {})
        node[("var", leaf)] = n

    def emit(node, depth):
        pad = "  " * depth
        for (kind, label), child in node.items():
            if kind == "var":
                if child in ternary:
                    out.write(f"{pad}$var wire 2 {ids[child][0]} {label} [1:0] $end\n")
                    out.write(f"{pad}$var real 64 {ids[child][1]} {label}_v $end\n")
                else:
                    out.write(f"{pad}$var wire 1 {ids[child][0]} {label} $end\n")
            else:
                out.write(f"{pad}$scope module {label} $end\n")
                emit(child, depth + 1)
                out.write(f"{pad}$upscope $end\n")

    emit(tree, 1)
    out.write("$upscope $end\n$enddefinitions $end\n")
    if not nets:
        return out.getvalue().encode("ascii")

    def value_lines(n, level):
        if n in ternary:
            vid, rid = ids[n]
            return [f"{_VCD_VEC[level]} {vid}", f"{_VCD_REAL[level]} {rid}"]
        return [f"{_VCD_BIT[level]}{ids[n][0]}"]

    out.write("#0\n$dumpvars\n")
    for n in nets:
        for line in value_lines(n, waveform.traces[n][0][1]):
            out.write(line + "\n")
    out.write("$end\n")

    changes: dict[int, list[tuple[str, LogicLevel]]] = {}
    for n in nets:
        for t, v in waveform.traces[n][1:]:
            changes.setdefault(t, []).append((n, v))
    for t in sorted(changes):
        out.write(f"#{t}\n")
        for n, v in changes[t]:
            for line in value_lines(n, v):
                out.write(line + "\n")
    return out.getvalue().encode("ascii")


def export_csv(waveform: Waveform, nets: list[str] | None = None) -> str:
    """One row per tick at which a selected net changes (plus time 0)."""
    nets = select_nets(waveform.nets, nets)
    times = sorted({0} | {t for n in nets for t, _ in waveform.traces[n]})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["time", *nets])
    for t in times:
        w.writerow([t, *(waveform.value_at(n, t).value for n in nets)])
    return buf.getvalue()


# -- truth tables ---------------------------------------------------------------------


@dataclass(frozen=True)
class TruthRow:
    inputs: tuple[tuple[str, LogicLevel], ...]
    outputs: tuple[tuple[str, LogicLevel], ...]
    #: "ok", "OSC" (oscillates or budget exceeded) or "MULTI" (state dependent)
    status: str = "ok"
    #: ticks from the clock edge (clocked) or from t=0 until outputs last changed
    settle_ticks: int | None = None

    def input(self, name: str) -> LogicLevel:
        return dict(self.inputs)[name]

    def output(self, name: str) -> LogicLevel:
        return dict(self.outputs)[name]


def state_nets(netlist: FlatNetlist) -> list[str]:
    """Nets lying on a combinational feedback loop, in netlist order."""
    g = nx.DiGraph()
    for gate in netlist.gates:
        for n in gate.inputs:
            g.add_edge(n, gate.output)
    loop = set()
    for comp in nx.strongly_connected_components(g):
        if len(comp) > 1:
            loop |= comp
    loop |= {n for n in g.nodes if g.has_edge(n, n)}
    return [n for n in netlist.nets if n in loop]


def _domain(netlist: FlatNetlist, port: str):
    return (LOW, HALF, HIGH) if port in netlist.ternary else (LOW, HIGH)


def _last_change(sim: Simulator, state: SimState, outputs, ticks: int) -> int:
    last = 0
    for k in range(1, ticks + 1):
        nxt = sim.step(state)
        if any(nxt.values[o] is not state.values[o] for o in outputs):
            last = k
        state = nxt
    return last


def extract_truth_table(netlist: FlatNetlist, input_ports=None, output_ports=None,
                        mode: str = "clocked", clock: str = "CLK",
                        max_ticks: int = DEFAULT_MAX_TICKS,
                        init_nets: list[str] | None = None) -> list[TruthRow]:
    """Enumerate every input vector and record the settled outputs.

    ``clocked``: each row starts from a fresh (all-Unknown) cell, applies
    the vector with the clock Low, settles, raises the clock and settles again.

    ``combinational``: each vector is settled from every binary assignment of
    ``init_nets`` (default: the nets on feedback loops). A row is ``OSC`` if any
    start oscillates and ``MULTI`` if stable results disagree.
    """
    if mode not in ("clocked", "combinational"):
        raise ConfigurationError(f"unknown mode {mode!r}")
    sim = Simulator(netlist)
    if input_ports is None:
        input_ports = [p for p in netlist.inputs if not (mode == "clocked" and p == clock)]
    if output_ports is None:
        output_ports = list(netlist.outputs)
    for p in list(input_ports) + list(output_ports):
        if p not in netlist.nets:
            raise ConfigurationError(f"no such net {p!r}")
    if mode == "clocked" and clock not in netlist.inputs:
        raise ConfigurationError(f"clock {clock!r} is not an input port")

    rows = []
    for vec in itertools.product(*(_domain(netlist, p) for p in input_ports)):
        assign = tuple(zip(input_ports, vec))
        if mode == "clocked":
            rows.append(_clocked_row(sim, assign, output_ports, clock, max_ticks))
        else:
            nets = state_nets(netlist) if init_nets is None else list(init_nets)
            if len(nets) > 16:
                raise ConfigurationError(f"{len(nets)} state nets is too many to enumerate")
            rows.append(_combinational_row(sim, assign, output_ports, nets, max_ticks))
    return rows


def _clocked_row(sim, assign, outputs, clock, max_ticks) -> TruthRow:
    stim = Stimulus().at(0, clock, LOW)
    for p, v in assign:
        stim.at(0, p, v)
    try:
        first = sim.settle(sim.initial_state(stim), max_ticks)
        if isinstance(first, Oscillating):
            return TruthRow(assign, (), "OSC")
        values = dict(first.state.values)
        values[clock] = HIGH
        edge = SimState(first.state.time, values)
        second = sim.settle(edge, max_ticks)
    except BudgetExceeded:
        return TruthRow(assign, (), "OSC")
    if isinstance(second, Oscillating):
        return TruthRow(assign, (), "OSC")
    ticks = _last_change(sim, edge, outputs, second.ticks_used)
    outs = tuple((o, second.state.values[o]) for o in outputs)
    return TruthRow(assign, outs, "ok", ticks)


def _combinational_row(sim, assign, outputs, nets, max_ticks) -> TruthRow:
    stim = Stimulus()
    for p, v in assign:
        stim.at(0, p, v)
    results = set()
    worst = 0
    for combo in itertools.product((LOW, HIGH), repeat=len(nets)):
        stim.initial = dict(zip(nets, combo))
        start = sim.initial_state(stim)
        try:
            res = sim.settle(start, max_ticks)
        except BudgetExceeded:
            return TruthRow(assign, (), "OSC")
        if isinstance(res, Oscillating):
            return TruthRow(assign, (), "OSC")
        results.add(tuple((o, res.state.values[o]) for o in outputs))
        worst = max(worst, _last_change(sim, start, outputs, res.ticks_used))
    if len(results) != 1:
        return TruthRow(assign, (), "MULTI", worst)
    return TruthRow(assign, results.pop(), "ok", worst)


def render_level(level: LogicLevel, ternary: bool) -> str:
    if level is UNKNOWN:
        return "X"
    if ternary:
        return str(trit_of(level))
    return "High" if level is HIGH else "Low"


def truth_table_csv(rows: list[TruthRow], netlist: FlatNetlist, mode: str = "clocked",
                    clock: str = "CLK", clock_label: str = "↑") -> str:
    """CSV with one row per input vector: ``CLK,<inputs>,<outputs>,State``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if not rows:
        return ""
    in_names = [p for p, _ in rows[0].inputs]
    out_names = [p for p, _ in next((r.outputs for r in rows if r.outputs), ())] or []
    if not out_names:
        out_names = list(netlist.outputs)
    head = ([clock] if mode == "clocked" else []) + in_names + out_names + ["State"]
    w.writerow(head)
    for r in rows:
        cells = [clock_label] if mode == "clocked" else []
        cells += [render_level(v, p in netlist.ternary) for p, v in r.inputs]
        if r.status == "ok":
            cells += [render_level(v, p in netlist.ternary) for p, v in r.outputs]
            first = r.outputs[0] if r.outputs else None
            if mode == "clocked" and first is not None and first[1] is not UNKNOWN:
                cells.append(f"Set '{trit_of(first[1])}'")
            else:
                cells.append("Stable")
        else:
            cells += [r.status] * len(out_names)
            cells.append("Hold" if r.status == "MULTI" else "Oscillating")
        w.writerow(cells)
    return buf.getvalue()
