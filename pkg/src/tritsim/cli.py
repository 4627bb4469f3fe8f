"""``tritsim`` command-line front end.

Exit codes: 0 success, 1 conformance failures, 2 usage errors, 3 invalid
netlist/stimulus input (diagnostics go to stderr).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .conformance import run_checks
from .engine import DEFAULT_MAX_TICKS, Simulator, parse_stimulus
from .errors import NetlistSyntaxError, TritsimError
from .export import VcdConfig, export_csv, export_vcd, extract_truth_table, truth_table_csv
from .metrics import hold_scenario, measure
from .netlist import Circuit, elaborate
from .parser import parse, serialize
from .stdcells import StandardCell, standard_circuit

CELL_NAMES = [c.value for c in StandardCell]


class UsageError(Exception):
    pass


def _color_enabled(stream) -> bool:
    if os.environ.get("TRITSIM_COLOR") == "0":
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def load_target(target: str) -> tuple[Circuit, str]:
    """A built-in cell name or a path to a ``.tnl`` file."""
    path = Path(target)
    if path.suffix == ".tnl" or path.exists():
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read {target}: {exc.strerror}") from None
        try:
            circuit = parse(text)
        except NetlistSyntaxError as exc:
            exc.path = target
            raise
        return circuit, circuit.top or ""
    if target in CELL_NAMES:
        return standard_circuit(target), target
    raise UsageError(f"{target!r} is neither a .tnl file nor a built-in cell ({', '.join(CELL_NAMES)})")


def _write(out_path: str | None, data: str | bytes):
    if out_path in (None, "-"):
        if isinstance(data, bytes):
            sys.stdout.flush()
            sys.stdout.buffer.write(data)
            sys.stdout.buffer.flush()
        else:
            sys.stdout.write(data)
    else:
        mode = "wb" if isinstance(data, bytes) else "w"
        with open(out_path, mode, **({} if mode == "wb" else {"newline": "\n", "encoding": "utf-8"})) as fh:
            fh.write(data)


def _csv_to_table(text: str) -> str:
    import csv

    rows = list(csv.reader(text.splitlines()))
    if not rows:
        return ""
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


# -- subcommands ------------------------------------------------------------------------


def cmd_cells(args) -> int:
    if args.name is None:
        _write(args.output, "".join(n + "\n" for n in CELL_NAMES))
        return 0
    if args.name not in CELL_NAMES:
        raise UsageError(f"unknown cell {args.name!r}; choose from {', '.join(CELL_NAMES)}")
    _write(args.output, serialize(standard_circuit(args.name)))
    return 0


def cmd_simulate(args) -> int:
    circuit, _ = load_target(args.netlist)
    netlist = elaborate(circuit)
    try:
        text = Path(args.stimulus).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {args.stimulus}: {exc.strerror}") from None
    stim = parse_stimulus(text)
    last = max((e.at for e in stim.events), default=0)
    until = args.until if args.until is not None else last + args.max_ticks
    wave = Simulator(netlist).run(stim, until)
    if args.format == "vcd":
        _write(args.output, export_vcd(wave, VcdConfig(net_selection=args.nets,
                                                       top_scope=netlist.name or "top")))
    else:
        text = export_csv(wave, args.nets)
        _write(args.output, text if args.format == "csv" else _csv_to_table(text))
    return 0


def cmd_truthtable(args) -> int:
    circuit, _ = load_target(args.target)
    netlist = elaborate(circuit)
    mode = args.mode or ("clocked" if args.clock in netlist.inputs else "combinational")
    rows = extract_truth_table(netlist, args.inputs, args.outputs, mode=mode,
                               clock=args.clock, max_ticks=args.max_ticks)
    label = args.clock_label
    if label is None:
        label = "High" if circuit.top == "level_fff" else "↑"
    text = truth_table_csv(rows, netlist, mode, args.clock, label)
    if args.format == "vcd":
        raise UsageError("truthtable supports --format csv or table")
    _write(args.output, text if args.format == "csv" else _csv_to_table(text))
    return 0


def cmd_check(args) -> int:
    circuit, top = load_target(args.target)
    cell = args.cell or top
    if cell not in CELL_NAMES:
        raise UsageError(f"no conformance suite for cell {cell!r}; pass --cell")
    netlist = elaborate(circuit)
    results = run_checks(cell, netlist, seed=args.seed, n_random=args.random)
    color = _color_enabled(sys.stdout)
    lines = [r.line(color) for r in results]
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed for {cell}")
    _write(args.output, "\n".join(lines) + "\n")
    return 1 if failed else 0


def cmd_power(args) -> int:
    circuit, _ = load_target(args.target)
    netlist = elaborate(circuit)
    for port in ("CLK", "D"):
        if port not in netlist.inputs:
            raise UsageError(f"power scenario needs a D FFF with CLK and D inputs; {port} missing")
    wave, start = hold_scenario(netlist, args.hold, hold_ticks=args.hold_ticks)
    report = measure(netlist, wave, args.output_net, start=start)
    _write(args.output, report.to_jsonl() if args.format == "jsonl" else report.to_table())
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-ticks", type=int, default=DEFAULT_MAX_TICKS, metavar="N",
                        help="settling budget in gate delays (default %(default)s)")
    common.add_argument("-o", "--output", metavar="PATH", help="write output here instead of stdout")

    p = argparse.ArgumentParser(prog="tritsim", description="Unit-delay ternary FFF simulator")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("cells", parents=[common], help="list built-in cells or emit one as .tnl")
    s.add_argument("name", nargs="?")
    s.set_defaults(func=cmd_cells)

    s = sub.add_parser("simulate", parents=[common], help="run a netlist against a stimulus CSV")
    s.add_argument("netlist")
    s.add_argument("stimulus")
    s.add_argument("--until", type=int)
    s.add_argument("--format", choices=["vcd", "csv", "table"], default="vcd")
    s.add_argument("--nets", nargs="+", metavar="PATTERN", help="fnmatch patterns of nets to dump")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("truthtable", parents=[common], help="exhaustive truth-table extraction")
    s.add_argument("target")
    s.add_argument("--mode", choices=["clocked", "combinational"])
    s.add_argument("--clock", default="CLK")
    s.add_argument("--clock-label")
    s.add_argument("--inputs", nargs="+")
    s.add_argument("--outputs", nargs="+")
    s.add_argument("--format", choices=["vcd", "csv", "table"], default="table")
    s.set_defaults(func=cmd_truthtable)

    s = sub.add_parser("check", parents=[common], help="run the conformance suite on a cell")
    s.add_argument("target")
    s.add_argument("--cell", choices=CELL_NAMES, help="suite to run (default: top cell name)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--random", type=int, default=100, metavar="N",
                   help="random sequences for the equivalence check (default %(default)s)")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("power", parents=[common], help="divider-count static power proxy")
    s.add_argument("target")
    s.add_argument("--hold", type=int, choices=[0, 1, 2], required=True)
    s.add_argument("--hold-ticks", type=int, default=40)
    s.add_argument("--output-net", default="Q")
    s.add_argument("--format", choices=["table", "jsonl"], default="table")
    s.set_defaults(func=cmd_power)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"tritsim: error: {exc}", file=sys.stderr)
        return 2
    except NetlistSyntaxError as exc:
        where = getattr(exc, "path", "<input>")
        for err in exc.errors:
            print(f"{where}:{err}", file=sys.stderr)
        return 3
    except TritsimError as exc:
        print(f"tritsim: error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
