import itertools

import pytest

from tritsim.errors import ConversionError, LogicDomainError, StructuralError
from tritsim.logic import (
    HALF, HIGH, LOW, UNKNOWN, GateKind, LogicLevel, concrete_domain, eval_gate, level_of, trit_of,
)

BINARY = (LOW, HIGH)


def legal_inputs(kind):
    dom = concrete_domain(kind) + (UNKNOWN,)
    return itertools.product(dom, repeat=kind.arity)


def test_exactly_four_levels():
    assert {lv.name for lv in LogicLevel} == {"LOW", "HALF", "HIGH", "UNKNOWN"}


@pytest.mark.parametrize("kind, inputs, expected", [
    (GateKind.AND2, [HIGH, HIGH], HIGH),
    (GateKind.AVERAGER2, [LOW, HIGH], HALF),
    (GateKind.AVERAGER2, [HIGH, HIGH], HIGH),
    (GateKind.OR2, [HIGH, UNKNOWN], HIGH),
    (GateKind.AND2, [LOW, UNKNOWN], LOW),
    (GateKind.PTI, [HALF], HIGH),
    (GateKind.NTI, [HALF], LOW),
])
def test_gate_examples(kind, inputs, expected):
    assert eval_gate(kind, inputs) is expected


def test_averager_table():
    assert eval_gate(GateKind.AVERAGER2, [LOW, LOW]) is LOW
    assert eval_gate(GateKind.AVERAGER2, [HIGH, HIGH]) is HIGH
    assert eval_gate(GateKind.AVERAGER2, [LOW, HIGH]) is HALF
    assert eval_gate(GateKind.AVERAGER2, [HIGH, LOW]) is HALF


def test_ternary_inverters():
    assert [eval_gate(GateKind.PTI, [level_of(t)]) for t in range(3)] == [HIGH, HIGH, LOW]
    assert [eval_gate(GateKind.NTI, [level_of(t)]) for t in range(3)] == [HIGH, LOW, LOW]
    assert eval_gate(GateKind.PTI, [UNKNOWN]) is UNKNOWN


@pytest.mark.parametrize("kind", list(GateKind))
def test_totality(kind):
    for ins in legal_inputs(kind):
        assert isinstance(eval_gate(kind, ins), LogicLevel)


@pytest.mark.parametrize("kind", list(GateKind))
def test_binary_gates_never_output_half(kind):
    if kind.ternary_output:
        pytest.skip("ternary-output primitive")
    for ins in legal_inputs(kind):
        assert eval_gate(kind, ins) is not HALF


@pytest.mark.parametrize("kind", list(GateKind))
def test_unknown_propagation_is_exact(kind):
    # for every vector and every Unknown pin, the output equals the common value of
    # the completions of that pin when they agree, and is Unknown otherwise
    dom = concrete_domain(kind)
    for ins in legal_inputs(kind):
        for pin, lv in enumerate(ins):
            if lv is not UNKNOWN:
                continue
            outs = {eval_gate(kind, ins[:pin] + (c,) + ins[pin + 1:]) for c in dom}
            got = eval_gate(kind, ins)
            if len(outs) == 1 and UNKNOWN not in outs:
                assert got is outs.pop()
            elif UNKNOWN not in outs:
                assert got is UNKNOWN


def _nor(*xs):
    # NOR from primitive OR2/NOT, never from the complex gate under test
    acc = xs[0]
    for x in xs[1:]:
        acc = eval_gate(GateKind.OR2, [acc, x])
    return eval_gate(GateKind.NOT, [acc])


def _or(*xs):
    return eval_gate(GateKind.NOT, [_nor(*xs)])


def _and(a, b):
    return eval_gate(GateKind.AND2, [a, b])


def _nand(a, b):
    return eval_gate(GateKind.NAND2, [a, b])


def test_aoi_s1_matches_expansion():
    for a, b, c, d in itertools.product(BINARY, repeat=4):
        na = eval_gate(GateKind.NOT, [a])
        expected = _nand(_or(a, b, c), _or(na, d))
        assert eval_gate(GateKind.AOI_S1, [a, b, c, d]) is expected


def test_aoi_s2_matches_expansion():
    for a, b, c, d in itertools.product(BINARY, repeat=4):
        na = eval_gate(GateKind.NOT, [a])
        expected = _nand(_or(a, _and(b, c)), _or(na, d))
        assert eval_gate(GateKind.AOI_S2, [a, b, c, d]) is expected


def test_three_literal_variants_match_expansion():
    for a, b, c, d, e in itertools.product(BINARY, repeat=5):
        na = eval_gate(GateKind.NOT, [a])
        assert eval_gate(GateKind.AOI_S1_3, [a, b, c, d, e]) is _nand(_or(a, b, c), _or(na, d, e))
        assert eval_gate(GateKind.AOI_S2_3, [a, b, c, d, e]) is _nand(_or(a, _and(b, c)), _or(na, _and(d, e)))


def test_arity_mismatch():
    with pytest.raises(StructuralError):
        eval_gate(GateKind.AND2, [HIGH])


@pytest.mark.parametrize("kind", [k for k in GateKind if not k.ternary_inputs])
def test_half_on_binary_pin_is_domain_error(kind):
    with pytest.raises(LogicDomainError):
        eval_gate(kind, [HALF] + [LOW] * (kind.arity - 1))


def test_trit_conversions():
    assert trit_of(HALF) == 1
    assert level_of(0) is LOW
    assert level_of(2) is HIGH
    for lv in (LOW, HALF, HIGH):
        assert level_of(trit_of(lv)) is lv
    with pytest.raises(ConversionError):
        trit_of(UNKNOWN)
    with pytest.raises(ConversionError):
        level_of(3)


def test_level_parse():
    assert [LogicLevel.parse(s) for s in "0H1X"] == [LOW, HALF, HIGH, UNKNOWN]
    assert LogicLevel.parse("2") is HIGH
    with pytest.raises(ValueError):
        LogicLevel.parse("z")
