"""Hierarchical netlist model and flattening.

A :class:`CellDef` owns ports and instances. Instances connect positionally:
first the target's inputs, then its outputs. A port is bound to the net of
the same name inside its cell. Flattening prefixes the internal nets of each
child with ``<instance>/`` so every net in a :class:`FlatNetlist` has a unique
hierarchical path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Union

from .errors import StructuralError
from .logic import GateKind


class Direction(Enum):
    IN = "input"
    OUT = "output"


@dataclass(frozen=True)
class Port:
    name: str
    direction: Direction
    ternary: bool = False


@dataclass(frozen=True)
class CellInstance:
    inst_name: str
    target: Union[GateKind, "CellDef"]
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]

    @property
    def target_name(self) -> str:
        return self.target.value if isinstance(self.target, GateKind) else self.target.name

    @property
    def pin_map(self) -> dict[str, str]:
        """Formal pin name -> connected net."""
        if isinstance(self.target, GateKind):
            names = [f"i{k}" for k in range(self.target.arity)] + ["y"]
        else:
            names = [p.name for p in self.target.input_ports] + [
                p.name for p in self.target.output_ports
            ]
        return dict(zip(names, self.inputs + self.outputs))


def _target_arity(target) -> tuple[int, int]:
    if isinstance(target, GateKind):
        return target.arity, 1
    return len(target.input_ports), len(target.output_ports)


@dataclass(frozen=True)
class CellDef:
    """A cell definition. Construction validates ports, pins and drivers."""

    name: str
    ports: tuple[Port, ...] = ()
    instances: tuple[CellInstance, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ports", tuple(self.ports))
        object.__setattr__(self, "instances", tuple(self.instances))
        seen = set()
        for p in self.ports:
            if p.name in seen:
                raise StructuralError(f"cell {self.name}: duplicate port {p.name!r}")
            seen.add(p.name)
        names = set()
        for inst in self.instances:
            if inst.inst_name in names:
                raise StructuralError(
                    f"cell {self.name}: duplicate instance {inst.inst_name!r}"
                )
            names.add(inst.inst_name)
            n_in, n_out = _target_arity(inst.target)
            if len(inst.inputs) != n_in or len(inst.outputs) != n_out:
                raise StructuralError(
                    f"cell {self.name}: instance {inst.inst_name} of {inst.target_name} "
                    f"needs {n_in} inputs and {n_out} outputs, got "
                    f"{len(inst.inputs)} and {len(inst.outputs)} (dangling or extra pin)"
                )
        drivers: dict[str, str] = {}
        for p in self.input_ports:
            drivers[p.name] = f"input port {p.name}"
        for inst in self.instances:
            for net in inst.outputs:
                if net in drivers:
                    raise StructuralError(
                        f"cell {self.name}: net {net!r} has multiple drivers "
                        f"({drivers[net]} and instance {inst.inst_name})"
                    )
                drivers[net] = f"instance {inst.inst_name}"

    @property
    def input_ports(self) -> tuple[Port, ...]:
        return tuple(p for p in self.ports if p.direction is Direction.IN)

    @property
    def output_ports(self) -> tuple[Port, ...]:
        return tuple(p for p in self.ports if p.direction is Direction.OUT)

    def port(self, name: str) -> Port:
        for p in self.ports:
            if p.name == name:
                return p
        raise KeyError(name)

    @property
    def nets(self) -> tuple[str, ...]:
        """All nets in first-appearance order (ports first)."""
        order = dict.fromkeys(p.name for p in self.ports)
        for inst in self.instances:
            order.update(dict.fromkeys(inst.inputs + inst.outputs))
        return tuple(order)

    def subcells(self) -> list["CellDef"]:
        """Transitively referenced cells, children before parents (excludes self)."""
        out: list[CellDef] = []
        seen: set[str] = set()

        def visit(cell: CellDef):
            for inst in cell.instances:
                if isinstance(inst.target, CellDef) and inst.target.name not in seen:
                    visit(inst.target)
                    seen.add(inst.target.name)
                    out.append(inst.target)

        visit(self)
        return out


@dataclass(frozen=True)
class Circuit:
    """A set of named cell definitions plus the name of the top cell."""

    defs: dict[str, CellDef] = field(default_factory=dict)
    top: str | None = None

    def __post_init__(self):
        if self.top is None:
            if self.defs:
                raise StructuralError("circuit has definitions but no top cell")
            return
        if self.top not in self.defs:
            raise StructuralError(f"top cell {self.top!r} is not defined")
        for cell in self.defs.values():
            for inst in cell.instances:
                if isinstance(inst.target, CellDef):
                    ref = self.defs.get(inst.target.name)
                    if ref is None or ref != inst.target:
                        raise StructuralError(
                            f"cell {cell.name}: instance {inst.inst_name} references "
                            f"unresolved cell {inst.target.name!r}"
                        )

    @classmethod
    def from_top(cls, top: CellDef) -> "Circuit":
        defs = {c.name: c for c in top.subcells()}
        if top.name in defs:
            raise StructuralError(f"cell {top.name!r} instantiates itself")
        defs[top.name] = top
        return cls(defs, top.name)

    @property
    def top_cell(self) -> CellDef | None:
        return self.defs[self.top] if self.top is not None else None


@dataclass(frozen=True)
class FlatGate:
    path: str
    kind: GateKind
    inputs: tuple[str, ...]
    output: str


@dataclass(frozen=True)
class FlatNetlist:
    """Primitive gates only, with ``/``-separated hierarchical net names."""

    name: str
    gates: tuple[FlatGate, ...]
    nets: tuple[str, ...]
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    ternary: frozenset[str]

    def count(self, kind: GateKind) -> int:
        return sum(1 for g in self.gates if g.kind is kind)

    def driver(self, net: str) -> FlatGate | None:
        for g in self.gates:
            if g.output == net:
                return g
        return None

    def to_cell(self, name: str | None = None) -> CellDef:
        """Re-wrap the flat graph as a single cell of primitive instances."""
        ports = [Port(n, Direction.IN, n in self.ternary) for n in self.inputs]
        ports += [Port(n, Direction.OUT, n in self.ternary) for n in self.outputs]
        insts = [CellInstance(g.path, g.kind, g.inputs, (g.output,)) for g in self.gates]
        return CellDef(name or self.name, tuple(ports), tuple(insts))


def elaborate(circuit: Circuit | CellDef) -> FlatNetlist:
    """Flatten a circuit (or a standalone top cell) into primitive gates.

    :raises StructuralError: multi-driver nets after flattening.
    """
    if isinstance(circuit, CellDef):
        top = circuit
    else:
        top = circuit.top_cell
        if top is None:
            return FlatNetlist("", (), (), (), (), frozenset())

    gates: list[FlatGate] = []
    nets: dict[str, None] = {}
    ternary: set[str] = {p.name for p in top.ports if p.ternary}

    def flatten(cell: CellDef, prefix: str, binding: dict[str, str], stack: tuple[str, ...]):
        if cell.name in stack:
            raise StructuralError(f"recursive hierarchy: {' -> '.join(stack + (cell.name,))}")

        def q(net: str) -> str:
            return binding[net] if net in binding else prefix + net

        for net in cell.nets:
            nets.setdefault(q(net), None)
        for inst in cell.instances:
            if isinstance(inst.target, GateKind):
                out = q(inst.outputs[0])
                gates.append(
                    FlatGate(prefix + inst.inst_name, inst.target,
                             tuple(q(n) for n in inst.inputs), out)
                )
                if inst.target.ternary_output:
                    ternary.add(out)
            else:
                child = inst.target
                formals = [p.name for p in child.input_ports] + [p.name for p in child.output_ports]
                actuals = [q(n) for n in inst.inputs + inst.outputs]
                child_binding = dict(zip(formals, actuals))
                for p in child.ports:
                    if p.ternary:
                        ternary.add(child_binding[p.name])
                flatten(child, prefix + inst.inst_name + "/", child_binding, stack + (cell.name,))

    flatten(top, "", {}, ())

    drivers: dict[str, str] = {p.name: "top input" for p in top.input_ports}
    for g in gates:
        if g.output in drivers:
            raise StructuralError(
                f"net {g.output!r} has multiple drivers ({drivers[g.output]} and {g.path})"
            )
        drivers[g.output] = g.path

    return FlatNetlist(
        name=top.name,
        gates=tuple(gates),
        nets=tuple(nets),
        inputs=tuple(p.name for p in top.input_ports),
        outputs=tuple(p.name for p in top.output_ports),
        ternary=frozenset(ternary),
    )
