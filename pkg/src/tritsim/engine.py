"""Unit-delay, two-phase synchronous simulation of a :class:`FlatNetlist`.

Time is counted in ticks of one gate delay. Each :meth:`Simulator.step`
evaluates every gate from the values at ``t`` and commits all outputs at
``t + 1``; stimulus events scheduled for ``t + 1`` are applied after the
gates have sampled their inputs, so a data change landing on the same tick
as a clock edge is seen by the old edge.

Only gates whose fan-in changed on the previous tick are re-evaluated. This
is equivalent to evaluating all of them because outside the first step each
gate output already equals its function of the previous inputs.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .errors import BudgetExceeded, LogicDomainError, SimulationFault, StimulusError
from .logic import HALF, TRUTH_TABLES, UNKNOWN, LogicLevel, concrete_domain
from .netlist import FlatNetlist

DEFAULT_MAX_TICKS = 64


@dataclass(frozen=True, order=True)
class Event:
    at: int
    net: str
    new_value: LogicLevel = field(compare=False)


@dataclass
class Stimulus:
    """Ordered input changes plus initial values (which may touch any net)."""

    events: list[Event] = field(default_factory=list)
    initial: dict[str, LogicLevel] = field(default_factory=dict)

    def at(self, time: int, net: str, value: LogicLevel) -> "Stimulus":
        self.events.append(Event(time, net, value))
        return self

    def sorted_events(self) -> list[Event]:
        # stable: same-tick events keep insertion order
        return sorted(self.events, key=lambda e: e.at)


@dataclass(frozen=True)
class SimState:
    time: int
    values: Mapping[str, LogicLevel]
    pending: tuple[Event, ...] = ()


@dataclass(frozen=True)
class Stable:
    state: SimState
    ticks_used: int


@dataclass(frozen=True)
class Oscillating:
    period: int
    ticks_used: int
    state: SimState


SettleResult = Union[Stable, Oscillating]


class Waveform:
    """Per-net transition lists ``[(time, level), ...]`` starting at time 0."""

    def __init__(self, traces: dict[str, list[tuple[int, LogicLevel]]], end: int,
                 ternary: Iterable[str] = ()):
        self.traces = traces
        self.end = end
        self.ternary = frozenset(ternary)

    @property
    def nets(self) -> tuple[str, ...]:
        return tuple(self.traces)

    def value_at(self, net: str, time: int) -> LogicLevel:
        trace = self.traces[net]
        lo, hi = 0, len(trace)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if trace[mid][0] <= time:
                lo = mid
            else:
                hi = mid
        return trace[lo][1]

    def changes(self, net: str) -> list[tuple[int, LogicLevel]]:
        return list(self.traces[net][1:])

    def __eq__(self, other):
        if not isinstance(other, Waveform):
            return NotImplemented
        return self.traces == other.traces and self.end == other.end

    def __repr__(self):
        return f"Waveform({len(self.traces)} nets, end={self.end})"


class Simulator:
    """Compiled form of a flat netlist; holds no run state of its own."""

    def __init__(self, netlist: FlatNetlist):
        self.netlist = netlist
        self.nets = list(netlist.nets)
        self.index = {n: i for i, n in enumerate(self.nets)}
        self.inputs = frozenset(netlist.inputs)
        self.gates = [
            (g.path, TRUTH_TABLES[g.kind], tuple(self.index[n] for n in g.inputs),
             self.index[g.output], g.kind)
            for g in netlist.gates
        ]
        fanout: list[list[int]] = [[] for _ in self.nets]
        for gi, (_, _, ins, _, _) in enumerate(self.gates):
            for i in set(ins):
                fanout[i].append(gi)
        self.fanout = [tuple(f) for f in fanout]

    # -- state construction -------------------------------------------------

    def check_drive(self, net: str, value: LogicLevel, initial: bool = False):
        if net not in self.index:
            raise StimulusError(f"unknown net {net!r}")
        if not isinstance(value, LogicLevel):
            raise StimulusError(f"not a logic level: {value!r}")
        if not initial and net not in self.inputs:
            raise StimulusError(f"net {net!r} is not an input port; use an initial value")
        if value is HALF and net not in self.netlist.ternary:
            raise StimulusError(f"net {net!r} is binary and cannot be driven to Half")

    def initial_state(self, stimulus: Stimulus | None = None) -> SimState:
        """All nets Unknown, then initial values, then events at time 0."""
        stimulus = stimulus or Stimulus()
        values = dict.fromkeys(self.nets, UNKNOWN)
        for net, v in stimulus.initial.items():
            self.check_drive(net, v, initial=True)
            values[net] = v
        pending = []
        for ev in stimulus.sorted_events():
            self.check_drive(ev.net, ev.new_value)
            if ev.at < 0:
                raise StimulusError(f"event before time 0: {ev}")
            if ev.at == 0:
                values[ev.net] = ev.new_value
            else:
                pending.append(ev)
        return SimState(0, values, tuple(pending))

    # -- stepping -----------------------------------------------------------

    def _eval(self, gi: int, vals: list, time: int):
        path, table, ins, out, kind = self.gates[gi]
        key = tuple(vals[i] for i in ins)
        try:
            return table[key]
        except KeyError:
            bad = next(self.nets[i] for i in ins if vals[i] not in concrete_domain(kind) + (UNKNOWN,))
            raise SimulationFault(
                f"t={time}: Half delivered to binary pin of {path} via net {bad!r}",
                net=bad, time=time,
            ) from None

    def _advance(self, vals: list, dirty: Sequence[int] | None, time: int,
                 order: random.Random | None = None) -> list[int]:
        """Compute phase then commit phase; returns indices of changed nets."""
        if dirty is None:
            todo = list(range(len(self.gates)))
        else:
            todo = sorted({g for n in dirty for g in self.fanout[n]})
        if order is not None:
            order.shuffle(todo)
        updates = []
        for gi in todo:
            new = self._eval(gi, vals, time)
            out = self.gates[gi][3]
            if vals[out] is not new:
                updates.append((out, new))
        changed = []
        for out, new in updates:
            vals[out] = new
            changed.append(out)
        return changed

    def step(self, state: SimState, shuffle: random.Random | None = None) -> SimState:
        """One tick. ``shuffle`` randomizes gate evaluation order (results must not change)."""
        vals = [state.values[n] for n in self.nets]
        self._advance(vals, None, state.time, shuffle)
        t = state.time + 1
        rest = []
        for ev in state.pending:
            if ev.at == t:
                vals[self.index[ev.net]] = ev.new_value
            elif ev.at > t:
                rest.append(ev)
        return SimState(t, dict(zip(self.nets, vals)), tuple(rest))

    def settle(self, state: SimState, max_ticks: int = DEFAULT_MAX_TICKS) -> SettleResult:
        """Step until two consecutive states match or a state repeats.

        :raises BudgetExceeded: neither happened within ``max_ticks`` steps.
        """
        if max_ticks < 1:
            raise ValueError("max_ticks must be >= 1")
        seen = {}
        if not state.pending:
            seen[tuple(state.values[n] for n in self.nets)] = 0
        current = state
        for k in range(1, max_ticks + 1):
            nxt = self.step(current)
            key = tuple(nxt.values[n] for n in self.nets)
            if nxt.values == current.values and not current.pending:
                return Stable(nxt, k)
            if not nxt.pending:
                if key in seen:
                    return Oscillating(k - seen[key], k, nxt)
                seen[key] = k
            current = nxt
        raise BudgetExceeded(max_ticks)

    def run(self, stimulus: Stimulus, until: int, record: Iterable[str] | None = None) -> Waveform:
        """Simulate ticks ``0..until`` and record transitions.

        ``record`` restricts which nets are traced (all by default). Idle
        stretches with no pending activity are skipped without changing the
        result.
        """
        state = self.initial_state(stimulus)
        for ev in state.pending:
            if ev.at > until:
                raise StimulusError(f"event at {ev.at} is beyond until={until}")
        vals = [state.values[n] for n in self.nets]
        names = self.nets if record is None else list(record)
        rec_idx = [self.index[n] for n in names]
        traces = {n: [(0, vals[i])] for n, i in zip(names, rec_idx)}
        watched = {i: n for n, i in zip(names, rec_idx)}

        events = list(state.pending)
        ei = 0
        dirty: list[int] | None = None
        t = 0
        while t < until:
            if dirty is not None and not dirty:
                # quiescent: jump to the tick before the next event
                nxt = events[ei].at if ei < len(events) else until
                t = nxt - 1 if nxt - 1 > t else t
                if ei >= len(events):
                    break
            changed = self._advance(vals, dirty, t)
            t += 1
            while ei < len(events) and events[ei].at == t:
                ev = events[ei]
                i = self.index[ev.net]
                if vals[i] is not ev.new_value:
                    vals[i] = ev.new_value
                    changed.append(i)
                ei += 1
            for i in changed:
                n = watched.get(i)
                if n is not None and traces[n][-1][1] is not vals[i]:
                    traces[n].append((t, vals[i]))
            dirty = changed
        return Waveform(traces, until, self.netlist.ternary)


# -- functional wrappers ---------------------------------------------------------


def step(netlist: FlatNetlist, state: SimState) -> SimState:
    return Simulator(netlist).step(state)


def settle(netlist: FlatNetlist, state: SimState, max_ticks: int = DEFAULT_MAX_TICKS) -> SettleResult:
    return Simulator(netlist).settle(state, max_ticks)


def run(netlist: FlatNetlist, stimulus: Stimulus, until: int) -> Waveform:
    return Simulator(netlist).run(stimulus, until)


# -- stimulus files -------------------------------------------------------------


def parse_stimulus(text: str) -> Stimulus:
    """Parse ``time,net,value`` CSV; ``@init`` in the time column sets an initial value.

    Values are ``0``, ``H``, ``1``, ``X`` (``2`` is an alias for ``1``). Blank
    lines and ``#`` comments are ignored; a ``time,net,value`` header is optional.
    """
    stim = Stimulus()
    lines = [ln.split("#", 1)[0] for ln in text.splitlines()]
    for lineno, row in enumerate(csv.reader(lines), start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise StimulusError(f"line {lineno}: expected 3 fields, got {len(row)}")
        t, net, value = (c.strip() for c in row)
        if t.lower() == "time" and net.lower() == "net":
            continue
        try:
            level = LogicLevel.parse(value)
        except ValueError as exc:
            raise StimulusError(f"line {lineno}: {exc}") from None
        if t == "@init":
            stim.initial[net] = level
            continue
        try:
            at = int(t)
        except ValueError:
            raise StimulusError(f"line {lineno}: bad time {t!r}") from None
        stim.at(at, net, level)
    return stim


def format_stimulus(stim: Stimulus) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["time", "net", "value"])
    for net, v in stim.initial.items():
        w.writerow(["@init", net, v.value])
    for ev in stim.sorted_events():
        w.writerow([ev.at, ev.net, ev.new_value.value])
    return buf.getvalue()
