"""Gate-level constructions of the ternary latch and Flip-Flap-Flop family.

Cell reference (port polarity matters):

``tlatch``       S1, S2 -> Q (ternary), QB (ternary)
``tlatch_noqb``  S1, S2 -> Q (ternary)
``level_fff``    CLK, Z1, Z2 -> Q (ternary); transparent while CLK is High
``edge_fff``     CLK, ZB1, ZB2 -> Q (ternary); ZB1/ZB2 are the *complemented*
                 data inputs, sampled on the rising CLK edge
``dfff``         CLK, D (ternary) -> Q (ternary); rising-edge D Flip-Flap-Flop
``dfff_qb``      CLK, D (ternary) -> Q, QB (ternary)

Internal building blocks: ``tlatch_core`` (the cross-coupled AND/OR pair with
its inverted taps Q1B/Q2B), ``fff_stage`` (control gates plus core, no
divider) and ``edge_fff_qb``.
"""

from __future__ import annotations

from enum import Enum
from functools import lru_cache

from .logic import GateKind
from .netlist import CellDef, CellInstance, Circuit, Direction, Port

G = GateKind


class StandardCell(Enum):
    TLATCH = "tlatch"
    TLATCH_NO_QBAR = "tlatch_noqb"
    LEVEL_FFF = "level_fff"
    EDGE_FFF = "edge_fff"
    DFFF = "dfff"
    DFFF_WITH_QBAR = "dfff_qb"


def _inp(name, ternary=False):
    return Port(name, Direction.IN, ternary)


def _out(name, ternary=False):
    return Port(name, Direction.OUT, ternary)


def _gate(name, kind, inputs, output):
    return CellInstance(name, kind, tuple(inputs), (output,))


def _sub(name, cell, inputs, outputs):
    return CellInstance(name, cell, tuple(inputs), tuple(outputs))


@lru_cache(maxsize=None)
def tlatch_core() -> CellDef:
    # Q1(t) = S1 . Q2(t - dt);  Q2(t) = S2 + Q1(t - dt)
    return CellDef(
        "tlatch_core",
        (_inp("S1"), _inp("S2"), _out("Q1"), _out("Q2"), _out("Q1B"), _out("Q2B")),
        (
            _gate("g_and", G.AND2, ["S1", "Q2"], "Q1"),
            _gate("g_or", G.OR2, ["S2", "Q1"], "Q2"),
            _gate("inv1", G.NOT, ["Q1"], "Q1B"),
            _gate("inv2", G.NOT, ["Q2"], "Q2B"),
        ),
    )


def _tlatch(with_qbar: bool) -> CellDef:
    ports = [_inp("S1"), _inp("S2"), _out("Q", True)]
    insts = [
        _sub("latch", tlatch_core(), ["S1", "S2"], ["Q1", "Q2", "Q1B", "Q2B"]),
        _gate("div_q", G.AVERAGER2, ["Q1", "Q2"], "Q"),
    ]
    if with_qbar:
        ports.append(_out("QB", True))
        insts.append(_gate("div_qb", G.AVERAGER2, ["Q1B", "Q2B"], "QB"))
    return CellDef("tlatch" if with_qbar else "tlatch_noqb", tuple(ports), tuple(insts))


def _level_fff() -> CellDef:
    return CellDef(
        "level_fff",
        (_inp("CLK"), _inp("Z1"), _inp("Z2"), _out("Q", True)),
        (
            _gate("inv_z1", G.NOT, ["Z1"], "ZB1"),
            _gate("inv_z2", G.NOT, ["Z2"], "ZB2"),
            _gate("ctl_s1", G.AOI_S1_3, ["CLK", "Q1B", "Q2B", "ZB1", "ZB2"], "S1"),
            _gate("ctl_s2", G.AOI_S2_3, ["CLK", "Q1B", "Q2B", "ZB1", "ZB2"], "S2"),
            _sub("latch", tlatch_core(), ["S1", "S2"], ["Q1", "Q2", "Q1B", "Q2B"]),
            _gate("div_q", G.AVERAGER2, ["Q1", "Q2"], "Q"),
        ),
    )


@lru_cache(maxsize=None)
def fff_stage() -> CellDef:
    """Level-sensitive binary stage using the simplified control gates.

    Transparent while ``A`` is High. No divider: the stage only exposes the
    binary pair and its complements.
    """
    return CellDef(
        "fff_stage",
        (_inp("A"), _inp("ZB1"), _inp("ZB2"),
         _out("Q1"), _out("Q2"), _out("Q1B"), _out("Q2B")),
        (
            _gate("ctl_s1", G.AOI_S1, ["A", "Q1B", "Q2B", "ZB1"], "S1"),
            _gate("ctl_s2", G.AOI_S2, ["A", "Q1B", "Q2B", "ZB2"], "S2"),
            _sub("latch", tlatch_core(), ["S1", "S2"], ["Q1", "Q2", "Q1B", "Q2B"]),
        ),
    )


def _edge_fff(with_qbar: bool) -> CellDef:
    ports = [_inp("CLK"), _inp("ZB1"), _inp("ZB2"), _out("Q", True)]
    insts = [
        _gate("clk_inv", G.NOT, ["CLK"], "CLKB"),
        _sub("master", fff_stage(), ["CLKB", "ZB1", "ZB2"], ["Q1M", "Q2M", "Q1BM", "Q2BM"]),
        # the master forwards its complemented pair, which is what the slave's
        # control gates consume directly
        _sub("slave", fff_stage(), ["CLK", "Q1BM", "Q2BM"], ["Q1S", "Q2S", "Q1BS", "Q2BS"]),
        _gate("div_q", G.AVERAGER2, ["Q1S", "Q2S"], "Q"),
    ]
    if with_qbar:
        ports.append(_out("QB", True))
        insts.append(_gate("div_qb", G.AVERAGER2, ["Q1BS", "Q2BS"], "QB"))
    return CellDef("edge_fff_qb" if with_qbar else "edge_fff", tuple(ports), tuple(insts))


def _dfff(with_qbar: bool) -> CellDef:
    ff = _edge_fff(with_qbar)
    ports = [_inp("CLK"), _inp("D", True), _out("Q", True)]
    outs = ["Q"]
    if with_qbar:
        ports.append(_out("QB", True))
        outs.append("QB")
    return CellDef(
        "dfff_qb" if with_qbar else "dfff",
        tuple(ports),
        (
            _gate("dec_p", G.PTI, ["D"], "DBP"),
            _gate("dec_n", G.NTI, ["D"], "DBN"),
            _sub("ff", ff, ["CLK", "DBP", "DBN"], outs),
        ),
    )


_BUILDERS = {
    StandardCell.TLATCH: lambda: _tlatch(True),
    StandardCell.TLATCH_NO_QBAR: lambda: _tlatch(False),
    StandardCell.LEVEL_FFF: _level_fff,
    StandardCell.EDGE_FFF: lambda: _edge_fff(False),
    StandardCell.DFFF: lambda: _dfff(False),
    StandardCell.DFFF_WITH_QBAR: lambda: _dfff(True),
}


@lru_cache(maxsize=None)
def _build(which: StandardCell) -> CellDef:
    return _BUILDERS[which]()


def build_standard_cell(which: StandardCell | str) -> CellDef:
    """Build one of the standard cells by enum member or ``.tnl`` name."""
    return _build(StandardCell(which))


def standard_circuit(which: StandardCell | str) -> Circuit:
    return Circuit.from_top(build_standard_cell(which))
