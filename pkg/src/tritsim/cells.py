"""Behavioral reference models used as oracles for the structural cells.

All binary arguments are :class:`~tritsim.logic.LogicLevel` values restricted
to ``LOW``/``HIGH``. The models describe the externally visible contract
only; the master stage of the edge-triggered cell has no observable state
here.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import LogicDomainError
from .logic import HIGH, LOW, LogicLevel, bit

_SETTLED = {(LOW, LOW): 0, (LOW, HIGH): 1, (HIGH, HIGH): 2}


def _b(level: LogicLevel) -> bool:
    if level is HIGH:
        return True
    if level is LOW:
        return False
    raise LogicDomainError(f"expected a binary level, got {level.name}")


@dataclass(frozen=True)
class LatchBehavior:
    """Settled (Q1, Q2) pair of the ternary latch."""

    q1: LogicLevel
    q2: LogicLevel

    def __post_init__(self):
        _b(self.q1), _b(self.q2)
        if (self.q1, self.q2) == (HIGH, LOW):
            raise LogicDomainError("(Q1, Q2) = (High, Low) is not a settled latch state")

    @property
    def trit(self) -> int:
        return _SETTLED[(self.q1, self.q2)]

    @classmethod
    def of_trit(cls, trit: int) -> "LatchBehavior":
        q1, q2 = next(k for k, v in _SETTLED.items() if v == trit)
        return cls(q1, q2)


def latch_settled(s1: LogicLevel, s2: LogicLevel) -> int:
    """Trit held by the latch once its set inputs (s1, s2) have propagated."""
    _b(s1), _b(s2)
    if (s1, s2) == (HIGH, LOW):
        raise LogicDomainError("(S1, S2) = (High, Low) makes the latch oscillate")
    return _SETTLED[(s1, s2)]


@dataclass(frozen=True)
class FffBehavior:
    stored: int
    last_clk: LogicLevel = LOW

    def __post_init__(self):
        if self.stored not in (0, 1, 2):
            raise ValueError(f"stored must be a trit, got {self.stored!r}")
        _b(self.last_clk)


def level_fff_value(z1: LogicLevel, z2: LogicLevel) -> int:
    """Trit written by a transparent level FFF: mixed inputs store '1'."""
    a, b = _b(z1), _b(z2)
    return a + b


def level_fff_step(state: FffBehavior, clk: LogicLevel, z1: LogicLevel, z2: LogicLevel) -> FffBehavior:
    if _b(clk):
        return FffBehavior(level_fff_value(z1, z2), clk)
    _b(z1), _b(z2)
    return replace(state, last_clk=clk)


def edge_fff_step(state: FffBehavior, clk: LogicLevel, zb1: LogicLevel, zb2: LogicLevel) -> FffBehavior:
    """Rising-edge FFF fed with complemented data inputs.

    ``(zb1, zb2) = (Low, High)`` is the combination the simplified control
    gates assume never occurs; it is rejected here.
    """
    if (zb1, zb2) == (LOW, HIGH):
        raise LogicDomainError("(ZB1, ZB2) = (Low, High) is outside the edge FFF's input domain")
    z1, z2 = bit(not _b(zb1)), bit(not _b(zb2))
    if _b(clk) and not _b(state.last_clk):
        return FffBehavior(level_fff_value(z1, z2), clk)
    return replace(state, last_clk=clk)


def d_fff_step(state: FffBehavior, clk: LogicLevel, d: int) -> FffBehavior:
    if d not in (0, 1, 2):
        raise ValueError(f"d must be a trit, got {d!r}")
    if _b(clk) and not _b(state.last_clk):
        return FffBehavior(d, clk)
    return replace(state, last_clk=clk)


def decode(d: int) -> tuple[LogicLevel, LogicLevel]:
    """Ideal PTI/NTI decoder: returns (D+ complement, D- complement)."""
    if d not in (0, 1, 2):
        raise ValueError(f"d must be a trit, got {d!r}")
    return bit(d != 2), bit(d == 0)


def control_eqs(clk: LogicLevel, q1: LogicLevel, q2: LogicLevel, z1: LogicLevel,
                z2: LogicLevel, simplified: bool = False) -> tuple[LogicLevel, LogicLevel]:
    """Set-input equations of the FFF control logic.

    Full form::

        S1 = ~CLK.Q1.Q2 + CLK.Z1.Z2
        S2 = ~CLK.(Q1 + Q2) + CLK.(Z1 + Z2)

    Simplified form (valid when (Z1, Z2) = (High, Low) cannot occur)::

        S1 = ~CLK.Q1.Q2 + CLK.Z1
        S2 = ~CLK.(Q1 + Q2) + CLK.Z2
    """
    c, a, b, x, y = (_b(v) for v in (clk, q1, q2, z1, z2))
    hold1 = not c and a and b
    hold2 = not c and (a or b)
    if simplified:
        return bit(hold1 or (c and x)), bit(hold2 or (c and y))
    return bit(hold1 or (c and x and y)), bit(hold2 or (c and (x or y)))


def control_eqs_cmos(clk: LogicLevel, q1: LogicLevel, q2: LogicLevel, z1: LogicLevel,
                     z2: LogicLevel, simplified: bool = False) -> tuple[LogicLevel, LogicLevel]:
    """The same equations in inverted complex-gate form, over complemented signals."""
    c, a, b, x, y = (_b(v) for v in (clk, q1, q2, z1, z2))
    qb1, qb2, zb1, zb2 = not a, not b, not x, not y
    if simplified:
        s1 = not ((c or qb1 or qb2) and (not c or zb1))
        s2 = not ((c or (qb1 and qb2)) and (not c or zb2))
    else:
        s1 = not ((c or qb1 or qb2) and (not c or zb1 or zb2))
        s2 = not ((c or (qb1 and qb2)) and (not c or (zb1 and zb2)))
    return bit(s1), bit(s2)
