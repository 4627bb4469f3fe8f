"""Static-power proxy: count voltage dividers that are actively dividing.

An averager whose two binary inputs differ bridges VDD and GND and conducts
static current for as long as that lasts. The proxy is the number of such
averagers per tick; it is ordinal only and carries no unit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .engine import Simulator, Stimulus, Waveform
from .errors import ConfigurationError
from .logic import HIGH, LOW, GateKind, level_of, trit_of, UNKNOWN
from .netlist import FlatNetlist


@dataclass(frozen=True)
class PowerReport:
    per_tick_divisions: tuple[int, ...]
    per_hold_value: dict[int, float]
    total_division_ticks: int
    start: int = 0
    output_net: str = "Q"

    def __post_init__(self):
        if self.total_division_ticks != sum(self.per_tick_divisions):
            raise ValueError("total_division_ticks must equal the per-tick sum")

    def to_jsonl(self) -> str:
        lines = [json.dumps({"output": self.output_net, "start": self.start,
                             "ticks": len(self.per_tick_divisions),
                             "total_division_ticks": self.total_division_ticks})]
        for trit in sorted(self.per_hold_value):
            lines.append(json.dumps({"hold": trit,
                                     "divisions_per_tick": self.per_hold_value[trit]}))
        return "\n".join(lines) + "\n"

    def to_table(self) -> str:
        n = len(self.per_tick_divisions)
        rows = [f"output net        {self.output_net}",
                f"ticks measured    {n} (from t={self.start})",
                f"division-ticks    {self.total_division_ticks}",
                "",
                "hold  divisions/tick"]
        for trit in sorted(self.per_hold_value):
            rows.append(f"'{trit}'   {self.per_hold_value[trit]:g}")
        return "\n".join(rows) + "\n"


def divider_nets(netlist: FlatNetlist) -> list[tuple[str, str]]:
    return [g.inputs for g in netlist.gates if g.kind is GateKind.AVERAGER2]


def measure(netlist: FlatNetlist, waveform: Waveform, output_net: str = "Q",
            start: int = 0, end: int | None = None) -> PowerReport:
    """Count dividing averagers per tick over ``[start, end]`` (inclusive).

    Ticks are grouped by the trit currently on ``output_net``; ticks where it
    is Unknown are counted in the total but not in any hold group.
    """
    if output_net not in waveform.traces:
        raise ConfigurationError(f"output net {output_net!r} is not in the waveform")
    dividers = divider_nets(netlist)
    for pair in dividers:
        for net in pair:
            if net not in waveform.traces:
                raise ConfigurationError(f"waveform does not cover divider input {net!r}")
    end = waveform.end if end is None else end
    per_tick = []
    groups: dict[int, list[int]] = {}
    for t in range(start, end + 1):
        n = 0
        for a, b in dividers:
            va, vb = waveform.value_at(a, t), waveform.value_at(b, t)
            if {va, vb} == {LOW, HIGH}:
                n += 1
        per_tick.append(n)
        out = waveform.value_at(output_net, t)
        if out is not UNKNOWN:
            groups.setdefault(trit_of(out), []).append(n)
    per_hold = {k: sum(v) / len(v) for k, v in sorted(groups.items())}
    return PowerReport(tuple(per_tick), per_hold, sum(per_tick), start, output_net)


def hold_scenario(netlist: FlatNetlist, value: int, *, clock: str = "CLK", data: str = "D",
                  half_period: int = 10, hold_ticks: int = 40) -> tuple[Waveform, int]:
    """Write ``value`` into a D FFF with one clock cycle, then hold it.

    Returns the waveform and the first tick of the hold window.
    """
    stim = Stimulus().at(0, clock, LOW).at(0, data, level_of(value))
    stim.at(half_period, clock, HIGH).at(2 * half_period, clock, LOW)
    hold_start = 3 * half_period
    wave = Simulator(netlist).run(stim, hold_start + hold_ticks)
    return wave, hold_start
