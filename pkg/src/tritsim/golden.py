"""Golden tables for the latch and Flip-Flap-Flop family, compiled in for ``check``.

Binary levels are written ``0``/``V`` (0 and VDD); trits as digits.
"""

# S1 S2 | Q1 Q2 | Q1+dt Q2+dt | Q1+2dt Q2+2dt | Q1+3dt Q2+3dt
_LATCH_STEPS = """
0 0  0 0  0 0  0 0  0 0
0 0  0 V  0 0  0 0  0 0
0 0  V 0  0 V  0 0  0 0
0 0  V V  0 V  0 0  0 0
0 V  0 0  0 V  0 V  0 V
0 V  0 V  0 V  0 V  0 V
0 V  V 0  0 V  0 V  0 V
0 V  V V  0 V  0 V  0 V
V 0  0 0  0 0  0 0  0 0
V 0  0 V  V 0  0 V  V 0
V 0  V 0  0 V  V 0  0 V
V 0  V V  V V  V V  V V
V V  0 0  0 V  V V  V V
V V  0 V  V V  V V  V V
V V  V 0  0 V  V V  V V
V V  V V  V V  V V  V V
"""


def _bits(fields):
    return tuple(f == "V" for f in fields)


#: rows of ((s1, s2), (q1, q2), [(q1, q2) at +1, +2, +3 ticks]) as bools
LATCH_STEPS = [
    (_bits(r[0:2]), _bits(r[2:4]), [_bits(r[4:6]), _bits(r[6:8]), _bits(r[8:10])])
    for r in (line.split() for line in _LATCH_STEPS.strip().splitlines())
]

#: (clk, stored trit or None, z1, z2) -> (s1, s2); None marks a don't-care
CONTROL_ROWS = [
    ((False, 0, None, None), (False, False)),
    ((False, 1, None, None), (False, True)),
    ((False, 2, None, None), (True, True)),
    ((True, None, False, False), (False, False)),
    ((True, None, False, True), (False, True)),
    ((True, None, True, False), (False, True)),
    ((True, None, True, True), (True, True)),
]

#: level-triggered FFF with CLK High: (z1, z2) -> Q
LEVEL_FFF_ROWS = [((False, False), 0), ((False, True), 1), ((True, False), 1), ((True, True), 2)]

#: D FFF on a rising edge: D -> Q
DFFF_ROWS = [(0, 0), (1, 1), (2, 2)]
