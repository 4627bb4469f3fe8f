"""Unit-delay simulation of ternary latches and Flip-Flap-Flops."""

__version__ = "0.1.0"

from .errors import (
    BudgetExceeded,
    ConfigurationError,
    ConversionError,
    LogicDomainError,
    NetlistSyntaxError,
    SimulationFault,
    StimulusError,
    StructuralError,
    TritsimError,
)
from .logic import GateKind, LogicLevel, eval_gate, level_of, trit_of
from .netlist import CellDef, CellInstance, Circuit, Direction, FlatNetlist, Port, elaborate
from .stdcells import StandardCell, build_standard_cell, standard_circuit
from .parser import parse, serialize
from .engine import Event, Oscillating, SimState, Simulator, Stable, Stimulus, Waveform, run, settle, step
from .metrics import PowerReport, measure
from .export import VcdConfig, export_csv, export_vcd, extract_truth_table

__all__ = [
    "BudgetExceeded", "CellDef", "CellInstance", "Circuit", "ConfigurationError",
    "ConversionError", "Direction", "Event", "FlatNetlist", "GateKind", "LogicDomainError",
    "LogicLevel", "NetlistSyntaxError", "Oscillating", "Port", "PowerReport", "SimState",
    "SimulationFault", "Simulator", "Stable", "StandardCell", "Stimulus", "StimulusError",
    "StructuralError", "TritsimError", "VcdConfig", "Waveform", "build_standard_cell",
    "elaborate", "eval_gate", "export_csv", "export_vcd", "extract_truth_table", "level_of",
    "measure", "parse", "run", "serialize", "settle", "standard_circuit", "step", "trit_of",
]
