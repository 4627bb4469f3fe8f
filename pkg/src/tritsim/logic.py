"""Signal alphabet and primitive gate truth functions.

Every node carries one of four :class:`LogicLevel` values. Binary gates only
accept ``LOW``/``HIGH``/``UNKNOWN``; the averager and the ternary inverters are
the only primitives that touch ``HALF``.

Unknown inputs are resolved exactly: a gate's output is the common value over
every concrete completion of its unknown pins, or ``UNKNOWN`` when the
completions disagree.
"""

from __future__ import annotations

import itertools
from enum import Enum
from typing import Callable, Sequence

from .errors import ConversionError, LogicDomainError, StructuralError


class LogicLevel(Enum):
    """Node voltage: 0, VDD/2, VDD, or not (yet) known."""

    LOW = "0"
    HALF = "H"
    HIGH = "1"
    UNKNOWN = "X"

    @property
    def voltage(self) -> float | None:
        return _VOLTAGE[self]

    @property
    def is_binary(self) -> bool:
        return self is LogicLevel.LOW or self is LogicLevel.HIGH

    @classmethod
    def parse(cls, text: str) -> "LogicLevel":
        """Parse ``0``/``H``/``1``/``X`` (``2`` is accepted as ``HIGH``)."""
        key = text.strip().upper()
        if key == "2":
            return cls.HIGH
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"not a logic level: {text!r}") from None

    def __str__(self) -> str:
        return self.value


LOW = LogicLevel.LOW
HALF = LogicLevel.HALF
HIGH = LogicLevel.HIGH
UNKNOWN = LogicLevel.UNKNOWN

_VOLTAGE = {LOW: 0.0, HALF: 0.5, HIGH: 1.0, UNKNOWN: None}
_TRIT_LEVELS = (LOW, HALF, HIGH)


def trit_of(level: LogicLevel) -> int:
    """Ternary digit stored by a node at ``level`` (LOW=0, HALF=1, HIGH=2)."""
    if level is UNKNOWN:
        raise ConversionError("Unknown has no trit value")
    return _TRIT_LEVELS.index(level)


def level_of(trit: int) -> LogicLevel:
    if trit not in (0, 1, 2):
        raise ConversionError(f"not a trit: {trit!r}")
    return _TRIT_LEVELS[trit]


def bit(value: bool) -> LogicLevel:
    return HIGH if value else LOW


# Binary truth functions work on bools; ``a`` is always the clock-polarity pin
# of the complex control gates, and its complement is formed inside the gate.
def _aoi_s1(a, b, c, d):
    return not ((a or b or c) and ((not a) or d))


def _aoi_s2(a, b, c, d):
    return not ((a or (b and c)) and ((not a) or d))


def _aoi_s1_3(a, b, c, d, e):
    return not ((a or b or c) and ((not a) or d or e))


def _aoi_s2_3(a, b, c, d, e):
    return not ((a or (b and c)) and ((not a) or (d and e)))


class GateKind(Enum):
    """Primitive gate kinds; the value is the keyword used in ``.tnl`` files.

    The four ``AOI_*`` kinds are the complex CMOS gates that generate a
    latch's set inputs. Pin order is ``(clk, q1b, q2b, zb1[, zb2])`` where
    ``*b`` are complemented signals:

    * ``AOI_S1``   = not((clk + q1b + q2b) . (~clk + zb1))
    * ``AOI_S2``   = not((clk + q1b . q2b) . (~clk + zb2))
    * ``AOI_S1_3`` = not((clk + q1b + q2b) . (~clk + zb1 + zb2))
    * ``AOI_S2_3`` = not((clk + q1b . q2b) . (~clk + zb1 . zb2))
    """

    AND2 = "and2"
    OR2 = "or2"
    NOT = "not"
    NAND2 = "nand2"
    NOR2 = "nor2"
    AOI_S1 = "aoi_s1"
    AOI_S2 = "aoi_s2"
    AOI_S1_3 = "aoi_s1_3"
    AOI_S2_3 = "aoi_s2_3"
    PTI = "pti"
    NTI = "nti"
    AVERAGER2 = "avg2"
    BUF = "buf"

    @property
    def arity(self) -> int:
        return _SPECS[self][0]

    @property
    def ternary_inputs(self) -> bool:
        """True when the input pins accept HALF."""
        return _SPECS[self][1]

    @property
    def ternary_output(self) -> bool:
        """True when the output may be HALF."""
        return _SPECS[self][2]

    @classmethod
    def from_keyword(cls, word: str) -> "GateKind":
        return cls(word.lower())


def _binary(fn: Callable[..., bool]) -> Callable[..., LogicLevel]:
    def wrapped(*levels):
        return bit(fn(*(lv is HIGH for lv in levels)))

    return wrapped


def _pti(x):
    return HIGH if x is not HIGH else LOW


def _nti(x):
    return HIGH if x is LOW else LOW


def _averager(a, b):
    if a is b:
        return a
    return HALF


def _buf(x):
    return x


# kind -> (arity, ternary_inputs, ternary_output, concrete truth function)
_SPECS: dict = {
    GateKind.AND2: (2, False, False, _binary(lambda a, b: a and b)),
    GateKind.OR2: (2, False, False, _binary(lambda a, b: a or b)),
    GateKind.NOT: (1, False, False, _binary(lambda a: not a)),
    GateKind.NAND2: (2, False, False, _binary(lambda a, b: not (a and b))),
    GateKind.NOR2: (2, False, False, _binary(lambda a, b: not (a or b))),
    GateKind.AOI_S1: (4, False, False, _binary(_aoi_s1)),
    GateKind.AOI_S2: (4, False, False, _binary(_aoi_s2)),
    GateKind.AOI_S1_3: (5, False, False, _binary(_aoi_s1_3)),
    GateKind.AOI_S2_3: (5, False, False, _binary(_aoi_s2_3)),
    GateKind.PTI: (1, True, False, _pti),
    GateKind.NTI: (1, True, False, _nti),
    GateKind.AVERAGER2: (2, False, True, _averager),
    GateKind.BUF: (1, True, True, _buf),
}


def concrete_domain(kind: GateKind) -> tuple[LogicLevel, ...]:
    """Concrete (non-Unknown) levels a pin of ``kind`` accepts."""
    return _TRIT_LEVELS if kind.ternary_inputs else (LOW, HIGH)


def _resolve(kind: GateKind, inputs: Sequence[LogicLevel]) -> LogicLevel:
    fn = _SPECS[kind][3]
    dom = concrete_domain(kind)
    choices = [dom if lv is UNKNOWN else (lv,) for lv in inputs]
    outs = {fn(*combo) for combo in itertools.product(*choices)}
    return outs.pop() if len(outs) == 1 else UNKNOWN


def _build_table(kind: GateKind) -> dict[tuple[LogicLevel, ...], LogicLevel]:
    dom = concrete_domain(kind) + (UNKNOWN,)
    return {ins: _resolve(kind, ins) for ins in itertools.product(dom, repeat=kind.arity)}


#: Precomputed truth tables over every legal input vector, Unknown included.
#: A vector missing from a table carries HALF on a binary-only pin.
TRUTH_TABLES: dict[GateKind, dict[tuple[LogicLevel, ...], LogicLevel]] = {
    kind: _build_table(kind) for kind in GateKind
}


def eval_gate(kind: GateKind, inputs: Sequence[LogicLevel]) -> LogicLevel:
    """Evaluate one primitive gate.

    :raises StructuralError: wrong number of inputs.
    :raises LogicDomainError: HALF on a binary-only pin.
    """
    inputs = tuple(inputs)
    if len(inputs) != kind.arity:
        raise StructuralError(
            f"{kind.value} takes {kind.arity} inputs, got {len(inputs)}"
        )
    try:
        return TRUTH_TABLES[kind][inputs]
    except KeyError:
        pin = next(i for i, lv in enumerate(inputs) if lv not in concrete_domain(kind) + (UNKNOWN,))
        raise LogicDomainError(
            f"{kind.value} pin {pin} is binary-only but received {inputs[pin].name}"
        ) from None
