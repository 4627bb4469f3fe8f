"""Built-in conformance checks for the standard cells.

Each ``check_*`` function returns a list of :class:`CheckResult`. The random
stimulus generators used by the equivalence and edge checks are seeded and
respect a fixed event spacing so that data never changes inside a cell's
setup window.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable

from . import cells, golden
from .engine import Oscillating, Simulator, Stable, Stimulus, Waveform
from .errors import BudgetExceeded
from .export import extract_truth_table
from .logic import HALF, HIGH, LOW, UNKNOWN, LogicLevel, bit, level_of, trit_of
from .metrics import hold_scenario, measure
from .netlist import FlatNetlist

#: settling bound after a clock edge (ticks): control gate, two latch
#: iterations and the output divider
SETTLE_BOUND = 4
#: spacing between random stimulus events
EVENT_GAP = 8


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self, color: bool = False) -> str:
        tag = "PASS" if self.passed else "FAIL"
        if color:
            tag = f"\033[32m{tag}\033[0m" if self.passed else f"\033[31m{tag}\033[0m"
        return f"{tag} {self.name}" + (f": {self.detail}" if self.detail else "")


def _lv(flag: bool) -> LogicLevel:
    return HIGH if flag else LOW


def _fmt(pair) -> str:
    return "".join("V" if v else "0" for v in pair)


# -- latch ------------------------------------------------------------------------------


def latch_trace(sim: Simulator, s1: bool, s2: bool, q1: bool, q2: bool, steps: int = 3,
                q1_net: str = "Q1", q2_net: str = "Q2", s1_net: str = "S1", s2_net: str = "S2"):
    """(Q1, Q2) after each of ``steps`` ticks from the given initial pair."""
    stim = Stimulus(initial={q1_net: _lv(q1), q2_net: _lv(q2)})
    stim.at(0, s1_net, _lv(s1)).at(0, s2_net, _lv(s2))
    state = sim.initial_state(stim)
    out = []
    for _ in range(steps):
        state = sim.step(state)
        out.append((state.values[q1_net] is HIGH, state.values[q2_net] is HIGH))
    return out


def check_latch_steps(netlist: FlatNetlist) -> list[CheckResult]:
    sim = Simulator(netlist)
    results = []
    for k, ((s1, s2), (q1, q2), expected) in enumerate(golden.LATCH_STEPS, start=1):
        got = latch_trace(sim, s1, s2, q1, q2)
        ok = got == expected
        results.append(CheckResult(
            f"latch step row {k:2d} S={_fmt((s1, s2))} Q={_fmt((q1, q2))}", ok,
            "" if ok else f"expected {[_fmt(p) for p in expected]}, got {[_fmt(p) for p in got]}"))
    return results


def check_oscillation(netlist: FlatNetlist, max_ticks: int = 64) -> list[CheckResult]:
    sim = Simulator(netlist)
    results = []
    for q1, q2 in itertools.product((False, True), repeat=2):
        stim = Stimulus(initial={"Q1": _lv(q1), "Q2": _lv(q2)})
        stim.at(0, "S1", HIGH).at(0, "S2", LOW)
        name = f"unstable input S=V0 from Q={_fmt((q1, q2))}"
        try:
            res = sim.settle(sim.initial_state(stim), max_ticks)
        except BudgetExceeded as exc:
            results.append(CheckResult(name, False, str(exc)))
            continue
        if q1 != q2:
            ok = isinstance(res, Oscillating) and res.period == 2
            results.append(CheckResult(name + " oscillates with period 2", ok, repr(res)[:80] if not ok else ""))
        else:
            ok = (isinstance(res, Stable)
                  and (res.state.values["Q1"], res.state.values["Q2"]) == (_lv(q1), _lv(q2)))
            results.append(CheckResult(name + " is stable", ok, "" if ok else type(res).__name__))
    return results


def check_latch_combinational(netlist: FlatNetlist) -> list[CheckResult]:
    rows = extract_truth_table(netlist, ["S1", "S2"], ["Q"], mode="combinational")
    expected = {(LOW, LOW): 0, (LOW, HIGH): 1, (HIGH, HIGH): 2, (HIGH, LOW): "OSC"}
    results = []
    for r in rows:
        key = (r.input("S1"), r.input("S2"))
        want = expected[key]
        got = r.status if r.status != "ok" else trit_of(r.output("Q"))
        results.append(CheckResult(f"latch settles S={_fmt([v is HIGH for v in key])} -> {want}",
                                   got == want, "" if got == want else f"got {got}"))
    return results


# -- control equations ------------------------------------------------------------


def check_control_rows() -> list[CheckResult]:
    results = []
    for k, ((clk, stored, z1, z2), want) in enumerate(golden.CONTROL_ROWS, start=1):
        trits = (0, 1, 2) if stored is None else (stored,)
        zs1 = (False, True) if z1 is None else (z1,)
        zs2 = (False, True) if z2 is None else (z2,)
        bad = []
        for t, a, b in itertools.product(trits, zs1, zs2):
            q = cells.LatchBehavior.of_trit(t)
            for fn in (cells.control_eqs, cells.control_eqs_cmos):
                got = fn(_lv(clk), q.q1, q.q2, _lv(a), _lv(b))
                if got != (_lv(want[0]), _lv(want[1])):
                    bad.append((fn.__name__, t, a, b))
        results.append(CheckResult(f"control row {k}", not bad, f"mismatches {bad}" if bad else ""))
    return results


def check_simplification() -> list[CheckResult]:
    """Simplified equations agree with the full ones wherever (Z1, Z2) != (High, Low)."""
    agree_bad, differ = [], []
    for clk, q1, q2, z1, z2 in itertools.product((LOW, HIGH), repeat=5):
        full = cells.control_eqs(clk, q1, q2, z1, z2)
        simp = cells.control_eqs(clk, q1, q2, z1, z2, simplified=True)
        cmos = cells.control_eqs_cmos(clk, q1, q2, z1, z2, simplified=True)
        if simp != cmos:
            agree_bad.append(("cmos", clk, q1, q2, z1, z2))
        excluded = (z1, z2) == (HIGH, LOW)
        if not excluded and full != simp:
            agree_bad.append((clk, q1, q2, z1, z2))
        if full != simp:
            differ.append((clk, q1, q2, z1, z2))
    only_excluded = all((z1, z2) == (HIGH, LOW) for _, _, _, z1, z2 in differ)
    return [
        CheckResult("simplified equations match full form on the reachable set", not agree_bad,
                    f"{len(agree_bad)} mismatches" if agree_bad else ""),
        CheckResult("simplified equations differ only on the excluded input pair", only_excluded,
                    f"{len(differ)} differing cases"),
    ]


# -- clocked cells ----------------------------------------------------------------------


def check_level_fff_rows(netlist: FlatNetlist) -> list[CheckResult]:
    rows = extract_truth_table(netlist, ["Z1", "Z2"], ["Q"], mode="clocked")
    results = []
    for (z, want), r in zip(golden.LEVEL_FFF_ROWS, rows):
        name = f"level FFF Z1Z2={_fmt(z)} -> Q={want}"
        ok = (r.status == "ok" and r.output("Q") is level_of(want)
              and r.settle_ticks is not None and r.settle_ticks <= SETTLE_BOUND)
        results.append(CheckResult(name, ok, f"status={r.status} Q={r.outputs} ticks={r.settle_ticks}"))
    return results


def check_dfff_rows(netlist: FlatNetlist) -> list[CheckResult]:
    rows = extract_truth_table(netlist, ["D"], ["Q"], mode="clocked")
    results = []
    for (d, want), r in zip(golden.DFFF_ROWS, rows):
        ok = (r.status == "ok" and r.input("D") is level_of(d) and r.output("Q") is level_of(want)
              and r.settle_ticks is not None and r.settle_ticks <= SETTLE_BOUND)
        results.append(CheckResult(f"D FFF rising edge D={d} -> Q={want}", ok,
                                   f"status={r.status} ticks={r.settle_ticks}"))
    return results


@dataclass(frozen=True)
class CellProfile:
    """How to drive a clocked cell and predict its output behaviorally."""

    ports: tuple[str, ...]
    values: tuple
    encode: Callable[[object], list[tuple[str, LogicLevel]]]
    step: Callable[[cells.FffBehavior, LogicLevel, object], cells.FffBehavior]


_LEGAL_ZB = ((HIGH, HIGH), (HIGH, LOW), (LOW, LOW))

PROFILES = {
    "level": CellProfile(
        ("Z1", "Z2"), tuple(itertools.product((LOW, HIGH), repeat=2)),
        lambda v: [("Z1", v[0]), ("Z2", v[1])],
        lambda s, clk, v: cells.level_fff_step(s, clk, v[0], v[1])),
    "edge": CellProfile(
        ("ZB1", "ZB2"), _LEGAL_ZB,
        lambda v: [("ZB1", v[0]), ("ZB2", v[1])],
        lambda s, clk, v: cells.edge_fff_step(s, clk, v[0], v[1])),
    "dff": CellProfile(
        ("D",), (0, 1, 2),
        lambda v: [("D", level_of(v))],
        lambda s, clk, v: cells.d_fff_step(s, clk, v)),
}


def random_sequence(profile: CellProfile, rng: random.Random, length: int = 100,
                    gap: int = EVENT_GAP):
    """Random clock/data event sequence plus the behavioral prediction.

    A prologue writes a random initial value. Then ``length`` events follow,
    one every ``gap`` ticks, each either toggling CLK or loading new data.
    Returns ``(stimulus, samples, until)`` where ``samples`` is a list of
    ``(tick, expected_trit)`` taken just before each next event.
    """
    stim = Stimulus()
    v0 = rng.choice(profile.values)
    stim.at(0, "CLK", LOW)
    for port, lv in profile.encode(v0):
        stim.at(0, port, lv)
    state = cells.FffBehavior(0, LOW)
    state = profile.step(state, LOW, v0)
    state = profile.step(state, HIGH, v0)
    stim.at(gap, "CLK", HIGH).at(2 * gap, "CLK", LOW)
    state = profile.step(state, LOW, v0)
    clk, data = LOW, v0
    samples = [(3 * gap - 1, state.stored)]
    for k in range(3, length + 3):
        t = k * gap
        if rng.random() < 0.5:
            clk = HIGH if clk is LOW else LOW
            stim.at(t, "CLK", clk)
        else:
            data = rng.choice(profile.values)
            for port, lv in profile.encode(data):
                stim.at(t, port, lv)
        state = profile.step(state, clk, data)
        samples.append((t + gap - 1, state.stored))
    return stim, samples, (length + 3) * gap


def equivalence_mismatches(netlist: FlatNetlist, kind: str, n: int, length: int = 100,
                           seed: int = 0, output: str = "Q") -> list[tuple[int, int, object, int]]:
    """Structural-vs-behavioral mismatches ``(sequence, tick, got, expected)``."""
    profile = PROFILES[kind]
    sim = Simulator(netlist)
    rng = random.Random(seed)
    bad = []
    for i in range(n):
        stim, samples, until = random_sequence(profile, rng, length)
        wave = sim.run(stim, until, record=[output])
        for t, want in samples:
            got = wave.value_at(output, t)
            if got is UNKNOWN or trit_of(got) != want:
                bad.append((i, t, got, want))
    return bad


def check_equivalence(netlist: FlatNetlist, kind: str, n: int = 100, length: int = 100,
                      seed: int = 0) -> list[CheckResult]:
    bad = equivalence_mismatches(netlist, kind, n, length, seed)
    return [CheckResult(f"structural matches behavioral model on {n} random sequences (seed {seed})",
                        not bad, f"{len(bad)} mismatches, first {bad[0]}" if bad else "")]


def rising_edges(wave: Waveform, clock: str = "CLK") -> list[int]:
    return [t for t, v in wave.changes(clock) if v is HIGH]


def edge_window_violations(wave: Waveform, clock: str = "CLK", output: str = "Q",
                           bound: int = SETTLE_BOUND) -> list[int]:
    """Ticks at which ``output`` changed outside ``(rise, rise + bound]``."""
    rises = rising_edges(wave, clock)
    bad = []
    for t, _ in wave.changes(output):
        if not any(0 < t - r <= bound for r in rises):
            bad.append(t)
    return bad


def perturbation_run(netlist: FlatNetlist, kind: str, n: int, seed: int = 0):
    """Write a value, then perturb data ``n`` times with CLK Low, edge, ``n`` times with CLK High.

    Returns ``(waveform, low_window, high_window)``; windows are inclusive tick ranges
    during which the clock is constant.
    """
    profile = PROFILES[kind]
    rng = random.Random(seed)
    stim = Stimulus().at(0, "CLK", LOW)
    for port, lv in profile.encode(rng.choice(profile.values)):
        stim.at(0, port, lv)
    stim.at(EVENT_GAP, "CLK", HIGH).at(2 * EVENT_GAP, "CLK", LOW)
    t = 2 * EVENT_GAP
    low_start = t
    for _ in range(n):
        t += rng.randint(1, 3)
        for port, lv in profile.encode(rng.choice(profile.values)):
            stim.at(t, port, lv)
    low_end = t + EVENT_GAP - 1
    t += EVENT_GAP
    stim.at(t, "CLK", HIGH)
    high_start = t + SETTLE_BOUND + 1
    for _ in range(n):
        t += rng.randint(1, 3)
        for port, lv in profile.encode(rng.choice(profile.values)):
            stim.at(t, port, lv)
    high_end = t + EVENT_GAP
    wave = Simulator(netlist).run(stim, high_end)
    return wave, (low_start, low_end), (high_start, high_end)


def check_edge_property(netlist: FlatNetlist, kind: str, n: int = 1000, n_seq: int = 50,
                        seed: int = 0) -> list[CheckResult]:
    wave, low, high = perturbation_run(netlist, kind, n, seed)
    q_changes = [t for t, _ in wave.changes("Q")]
    in_low = [t for t in q_changes if low[0] <= t <= low[1]]
    in_high = [t for t in q_changes if high[0] <= t <= high[1]]
    profile = PROFILES[kind]
    sim = Simulator(netlist)
    rng = random.Random(seed + 1)
    falling_bad = 0
    for _ in range(n_seq):
        stim, _, until = random_sequence(profile, rng, 100)
        falling_bad += len(edge_window_violations(sim.run(stim, until)))
    return [
        CheckResult(f"{n} data perturbations with CLK Low leave Q unchanged", not in_low,
                    f"Q changed at {in_low[:5]}" if in_low else ""),
        CheckResult(f"{n} data perturbations with CLK High leave Q unchanged", not in_high,
                    f"Q changed at {in_high[:5]}" if in_high else ""),
        CheckResult(f"Q changes only within {SETTLE_BOUND} ticks after a rising edge "
                    f"({n_seq} random sequences)", falling_bad == 0,
                    f"{falling_bad} changes outside the window" if falling_bad else ""),
    ]


def check_level_hold(netlist: FlatNetlist, n: int = 1000, seed: int = 0) -> list[CheckResult]:
    wave, low, _ = perturbation_run(netlist, "level", n, seed)
    moved = [t for t, _ in wave.changes("Q") if low[0] <= t <= low[1]]
    return [CheckResult(f"{n} Z perturbations with CLK Low leave Q unchanged", not moved,
                        f"Q changed at {moved[:5]}" if moved else "")]


def set_pairs(netlist: FlatNetlist) -> list[tuple[str, str]]:
    nets = set(netlist.nets)
    return [(n, n[:-2] + "S2") for n in netlist.nets if n.endswith("S1") and n[:-2] + "S2" in nets]


def unstable_ticks(netlist: FlatNetlist, wave: Waveform) -> list[tuple[str, int]]:
    """Every (set-pair, tick) where (S1, S2) = (High, Low) in the waveform."""
    hits = []
    for s1, s2 in set_pairs(netlist):
        times = sorted({0} | {t for t, _ in wave.traces[s1]} | {t for t, _ in wave.traces[s2]})
        for t in times:
            if wave.value_at(s1, t) is HIGH and wave.value_at(s2, t) is LOW:
                hits.append((s1, t))
    return hits


def check_unstable_unreachable(netlist: FlatNetlist, kind: str, n_seq: int = 50,
                               seed: int = 0) -> list[CheckResult]:
    sim = Simulator(netlist)
    rng = random.Random(seed + 2)
    hits = []
    for _ in range(n_seq):
        stim, _, until = random_sequence(PROFILES[kind], rng, 100)
        hits += unstable_ticks(netlist, sim.run(stim, until))
    wave, _, _ = perturbation_run(netlist, kind, 200, seed)
    hits += unstable_ticks(netlist, wave)
    return [CheckResult("set inputs never reach (High, Low) under legal stimulus", not hits,
                        f"{len(hits)} occurrences, first {hits[:1]}" if hits else "")]


def check_power(netlist: FlatNetlist, expected: dict[int, int]) -> list[CheckResult]:
    results = []
    for value, want in expected.items():
        wave, start = hold_scenario(netlist, value)
        rep = measure(netlist, wave, "Q", start=start)
        per = set(rep.per_tick_divisions)
        ok = per == {want} and rep.per_hold_value.get(value) == want
        results.append(CheckResult(f"holding '{value}' divides {want} time(s) per tick", ok,
                                   f"observed {sorted(per)}"))
    return results


# -- dispatch ---------------------------------------------------------------------------


def run_checks(cell: str, netlist: FlatNetlist, seed: int = 0, n_random: int = 100) -> list[CheckResult]:
    """All checks applicable to standard cell ``cell`` on ``netlist``."""
    if cell in ("tlatch", "tlatch_noqb"):
        return check_latch_steps(netlist) + check_oscillation(netlist) + check_latch_combinational(netlist)
    if cell == "level_fff":
        return (check_control_rows() + check_level_fff_rows(netlist) + check_level_hold(netlist, seed=seed)
                + check_equivalence(netlist, "level", n_random, seed=seed))
    if cell == "edge_fff":
        return (check_simplification() + check_equivalence(netlist, "edge", n_random, seed=seed)
                + check_edge_property(netlist, "edge", seed=seed)
                + check_unstable_unreachable(netlist, "edge", seed=seed))
    if cell in ("dfff", "dfff_qb"):
        power = {0: 0, 1: 1, 2: 0} if cell == "dfff" else {0: 0, 1: 2, 2: 0}
        return (check_dfff_rows(netlist) + check_equivalence(netlist, "dff", n_random, seed=seed)
                + check_edge_property(netlist, "dff", seed=seed)
                + check_unstable_unreachable(netlist, "dff", seed=seed)
                + check_power(netlist, power))
    raise KeyError(f"no conformance suite for cell {cell!r}")
