"""Reader and writer for the ``.tnl`` textual netlist format.

Grammar::

    file     := cell* ;
    cell     := "cell" IDENT "{" item* "}" ;
    item     := portdecl | instdecl ;
    portdecl := ("input" | "output") IDENT ["ternary"] ";" ;
    instdecl := "inst" IDENT ":" IDENT "(" nets ")" "->" nets ";" ;
    nets     := IDENT ("," IDENT)* ;

``#`` starts a comment running to the end of the line. Instance targets are
either primitive gate keywords (``and2``, ``avg2``, ...) or cell names, which
may be defined later in the file. The last cell in the file is the top cell.

The parser recovers after errors and reports every diagnostic it finds via
:class:`~tritsim.errors.NetlistSyntaxError`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import NetlistSyntaxError, StructuralError
from .logic import GateKind
from .netlist import CellDef, CellInstance, Circuit, Direction, Port

KEYWORDS = {"cell", "input", "output", "ternary", "inst"}
HEADER = "# tritsim netlist\n"


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1

    def __post_init__(self):
        if self.line < 1 or self.column < 1:
            raise ValueError("spans are 1-based")


class ErrorKind(Enum):
    LEX = "lex"
    SYNTAX = "syntax"
    SEMANTIC = "semantic"


@dataclass(frozen=True)
class ParseError:
    span: SourceSpan
    message: str
    kind: ErrorKind

    def __str__(self):
        return f"{self.span.line}:{self.span.column}: {self.kind.value} error: {self.message}"


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, KW, PUNCT, EOF
    text: str
    span: SourceSpan


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\f\v]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<arrow>->)|(?P<punct>[{}();:,])"
)


def tokenize(text: str) -> tuple[list[Token], list[ParseError]]:
    tokens: list[Token] = []
    errors: list[ParseError] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            errors.append(ParseError(SourceSpan(line, col, 1),
                                     f"unexpected character {text[pos]!r}", ErrorKind.LEX))
            pos += 1
            continue
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "ident":
            tokens.append(Token("KW" if lexeme in KEYWORDS else "IDENT", lexeme,
                                SourceSpan(line, col, len(lexeme))))
        elif kind in ("arrow", "punct"):
            tokens.append(Token("PUNCT", lexeme, SourceSpan(line, col, len(lexeme))))
        pos = m.end()
    tokens.append(Token("EOF", "", SourceSpan(line, pos - line_start + 1, 1)))
    return tokens, errors


# -- syntax tree ------------------------------------------------------------------


@dataclass
class _PortAst:
    name: Token
    direction: Direction
    ternary: bool


@dataclass
class _InstAst:
    name: Token
    target: Token
    inputs: list[Token]
    outputs: list[Token]


@dataclass
class _CellAst:
    name: Token
    ports: list[_PortAst] = field(default_factory=list)
    insts: list[_InstAst] = field(default_factory=list)


class _Recover(Exception):
    pass


class _Parser:
    def __init__(self, tokens: list[Token], errors: list[ParseError]):
        self.toks = tokens
        self.i = 0
        self.errors = errors

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "EOF":
            self.i += 1
        return t

    def error(self, tok: Token, message: str):
        self.errors.append(ParseError(tok.span, message, ErrorKind.SYNTAX))
        raise _Recover

    def _describe(self, tok: Token) -> str:
        return "end of file" if tok.kind == "EOF" else repr(tok.text)

    def expect_punct(self, text: str) -> Token:
        if self.tok.kind == "PUNCT" and self.tok.text == text:
            return self.advance()
        self.error(self.tok, f"expected {text!r}, found {self._describe(self.tok)}")

    def expect_ident(self, what: str) -> Token:
        if self.tok.kind == "IDENT":
            return self.advance()
        if self.tok.kind == "KW":
            self.error(self.tok, f"keyword {self.tok.text!r} cannot be used as {what}")
        self.error(self.tok, f"expected {what}, found {self._describe(self.tok)}")

    def at_kw(self, word: str) -> bool:
        return self.tok.kind == "KW" and self.tok.text == word

    def parse_file(self) -> list[_CellAst]:
        cells = []
        while self.tok.kind != "EOF":
            if not self.at_kw("cell"):
                self.errors.append(ParseError(self.tok.span,
                                              f"expected 'cell', found {self._describe(self.tok)}",
                                              ErrorKind.SYNTAX))
                self.advance()
                while self.tok.kind != "EOF" and not self.at_kw("cell"):
                    self.advance()
                continue
            cell = self.parse_cell()
            if cell is not None:
                cells.append(cell)
        return cells

    def parse_cell(self) -> _CellAst | None:
        self.advance()  # 'cell'
        try:
            name = self.expect_ident("a cell name")
        except _Recover:
            name = None
        try:
            self.expect_punct("{")
        except _Recover:
            while not (self.tok.kind == "PUNCT" and self.tok.text == "{"):
                if self.tok.kind == "EOF" or self.at_kw("cell"):
                    return None
                self.advance()
            self.advance()
        # a nameless cell is still parsed for diagnostics, then dropped
        cell = _CellAst(name) if name is not None else None
        while True:
            if self.tok.kind == "PUNCT" and self.tok.text == "}":
                self.advance()
                return cell
            if self.tok.kind == "EOF":
                self.errors.append(ParseError(self.tok.span, "expected '}' before end of file",
                                              ErrorKind.SYNTAX))
                return cell
            if self.at_kw("cell"):
                self.errors.append(ParseError(self.tok.span, "missing '}' before next cell",
                                              ErrorKind.SYNTAX))
                return cell
            try:
                self.parse_item(cell)
            except _Recover:
                self.sync()

    def sync(self):
        """Skip to just past the next ';', or stop before '}' / 'cell'."""
        while self.tok.kind != "EOF":
            if self.tok.kind == "PUNCT" and self.tok.text == ";":
                self.advance()
                return
            if (self.tok.kind == "PUNCT" and self.tok.text == "}") or self.at_kw("cell"):
                return
            self.advance()

    def parse_item(self, cell: _CellAst | None):
        tok = self.tok
        if self.at_kw("input") or self.at_kw("output"):
            self.advance()
            name = self.expect_ident("a port name")
            ternary = False
            if self.at_kw("ternary"):
                self.advance()
                ternary = True
            self.expect_punct(";")
            if cell is not None:
                direction = Direction.IN if tok.text == "input" else Direction.OUT
                cell.ports.append(_PortAst(name, direction, ternary))
        elif self.at_kw("inst"):
            self.advance()
            name = self.expect_ident("an instance name")
            self.expect_punct(":")
            target = self.expect_ident("a gate or cell name")
            self.expect_punct("(")
            inputs = self.parse_nets()
            self.expect_punct(")")
            self.expect_punct("->")
            outputs = self.parse_nets()
            self.expect_punct(";")
            if cell is not None:
                cell.insts.append(_InstAst(name, target, inputs, outputs))
        else:
            self.error(tok, f"expected 'input', 'output' or 'inst', found {self._describe(tok)}")

    def parse_nets(self) -> list[Token]:
        nets = [self.expect_ident("a net name")]
        while self.tok.kind == "PUNCT" and self.tok.text == ",":
            self.advance()
            nets.append(self.expect_ident("a net name"))
        return nets


# -- semantic analysis ------------------------------------------------------------


def _gate_kind(word: str) -> GateKind | None:
    try:
        return GateKind(word)
    except ValueError:
        return None


class _Elaborator:
    def __init__(self, cells: list[_CellAst], errors: list[ParseError]):
        self.errors = errors
        self.asts: dict[str, _CellAst] = {}
        self.order: list[str] = []
        for c in cells:
            if _gate_kind(c.name.text) is not None:
                self.semantic(c.name, f"cell name {c.name.text!r} clashes with a primitive gate")
                continue
            if c.name.text in self.asts:
                self.semantic(c.name, f"duplicate cell {c.name.text!r}")
                continue
            self.asts[c.name.text] = c
            self.order.append(c.name.text)
        self.built: dict[str, CellDef | None] = {}
        self.active: list[str] = []

    def semantic(self, tok: Token, message: str):
        self.errors.append(ParseError(tok.span, message, ErrorKind.SEMANTIC))

    def build(self, name: str) -> CellDef | None:
        if name in self.built:
            return self.built[name]
        self.active.append(name)
        ast = self.asts[name]
        ok = True

        ports: list[Port] = []
        port_names: set[str] = set()
        for p in ast.ports:
            if p.name.text in port_names:
                self.semantic(p.name, f"duplicate port {p.name.text!r} in cell {name}")
                ok = False
                continue
            port_names.add(p.name.text)
            ports.append(Port(p.name.text, p.direction, p.ternary))

        drivers: dict[str, Token] = {p.name.text: p.name for p in ast.ports
                                     if p.direction is Direction.IN}
        insts: list[CellInstance] = []
        inst_names: set[str] = set()
        for inst in ast.insts:
            if inst.name.text in inst_names:
                self.semantic(inst.name, f"duplicate instance {inst.name.text!r} in cell {name}")
                ok = False
            inst_names.add(inst.name.text)

            target = self.resolve(inst.target)
            if target is None:
                ok = False
            else:
                n_in, n_out, pins = self._pins(target)
                if not self._check_pins(inst, target, n_in, n_out, pins):
                    ok = False
            for net in inst.outputs:
                prev = drivers.get(net.text)
                if prev is not None:
                    self.semantic(net, f"net {net.text!r} has multiple drivers "
                                       f"(already driven at {prev.span.line}:{prev.span.column})")
                    ok = False
                else:
                    drivers[net.text] = net
            if target is not None and ok:
                insts.append(CellInstance(inst.name.text, target,
                                          tuple(t.text for t in inst.inputs),
                                          tuple(t.text for t in inst.outputs)))
        self.active.pop()
        cell = None
        if ok:
            try:
                cell = CellDef(name, tuple(ports), tuple(insts))
            except StructuralError as exc:
                self.semantic(ast.name, str(exc))
        self.built[name] = cell
        return cell

    def _pins(self, target):
        if isinstance(target, GateKind):
            return target.arity, 1, [f"i{k}" for k in range(target.arity)] + ["y"]
        ins = [p.name for p in target.input_ports]
        outs = [p.name for p in target.output_ports]
        return len(ins), len(outs), ins + outs

    def _check_pins(self, inst: _InstAst, target, n_in: int, n_out: int, pins) -> bool:
        label = target.value if isinstance(target, GateKind) else target.name
        ok = True
        if len(inst.inputs) < n_in:
            self.semantic(inst.target, f"instance {inst.name.text!r} of {label}: dangling pin "
                                       f"{pins[len(inst.inputs)]!r} (expects {n_in} inputs, "
                                       f"got {len(inst.inputs)})")
            ok = False
        elif len(inst.inputs) > n_in:
            self.semantic(inst.inputs[n_in], f"instance {inst.name.text!r} of {label}: "
                                             f"too many inputs (expects {n_in})")
            ok = False
        if len(inst.outputs) < n_out:
            self.semantic(inst.target, f"instance {inst.name.text!r} of {label}: dangling pin "
                                       f"{pins[n_in + len(inst.outputs)]!r} (expects {n_out} "
                                       f"outputs, got {len(inst.outputs)})")
            ok = False
        elif len(inst.outputs) > n_out:
            self.semantic(inst.outputs[n_out], f"instance {inst.name.text!r} of {label}: "
                                               f"too many outputs (expects {n_out})")
            ok = False
        return ok

    def resolve(self, tok: Token):
        kind = _gate_kind(tok.text)
        if kind is not None:
            return kind
        if tok.text not in self.asts:
            self.semantic(tok, f"unknown gate or cell {tok.text!r}")
            return None
        if tok.text in self.active:
            cycle = " -> ".join(self.active[self.active.index(tok.text):] + [tok.text])
            self.semantic(tok, f"recursive instantiation: {cycle}")
            return None
        cell = self.build(tok.text)
        if cell is None and tok.text in self.built:
            # the referenced cell already produced its own diagnostics
            return None
        return cell


def parse(text: str) -> Circuit:
    """Parse ``.tnl`` source into a :class:`Circuit`.

    :raises NetlistSyntaxError: with every lexical, syntax and semantic
        diagnostic found (``exc.errors``, sorted by position).
    """
    tokens, errors = tokenize(text)
    cells = _Parser(tokens, errors).parse_file()
    elab = _Elaborator(cells, errors)
    defs = {}
    for name in elab.order:
        cell = elab.build(name)
        if cell is not None:
            defs[name] = cell
    if errors:
        errors.sort(key=lambda e: (e.span.line, e.span.column))
        raise NetlistSyntaxError(errors)
    top = elab.order[-1] if elab.order else None
    return Circuit(defs, top)


def diagnose(text: str) -> list[ParseError]:
    """All diagnostics for ``text`` (empty when it parses cleanly)."""
    try:
        parse(text)
    except NetlistSyntaxError as exc:
        return exc.errors
    return []


def _format_cell(cell: CellDef) -> str:
    lines = [f"cell {cell.name} {{"]
    for p in cell.ports:
        suffix = " ternary" if p.ternary else ""
        lines.append(f"  {p.direction.value} {p.name}{suffix};")
    for inst in cell.instances:
        lines.append(f"  inst {inst.inst_name}: {inst.target_name}"
                     f"({', '.join(inst.inputs)}) -> {', '.join(inst.outputs)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def serialize(circuit: Circuit | CellDef) -> str:
    """Render a circuit as ``.tnl`` text (LF line endings, top cell last)."""
    if isinstance(circuit, CellDef):
        circuit = Circuit.from_top(circuit)
    names = [n for n in circuit.defs if n != circuit.top]
    if circuit.top is not None:
        names.append(circuit.top)
    return HEADER + "".join("\n" + _format_cell(circuit.defs[n]) for n in names)
