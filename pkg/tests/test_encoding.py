import pytest

from encoding import (
    XOR_GATE_ID,
    EncodingScheme,
    EncodingVariant,
    InputPattern,
    all_gates,
    all_patterns,
    default_scheme,
    encode,
    gate_by_id,
    last_event_time,
    parse_encoding_variant,
    scheme_from_dict,
    validate_scheme,
)
from spike_core import EMPTY_TRAIN


def test_seven_gates_with_xor_last():
    gates = all_gates()
    assert len(gates) == 7
    assert gates[XOR_GATE_ID].class_a == frozenset({InputPattern(0, 0), InputPattern(1, 1)})


def test_every_gate_partitions_the_patterns():
    patterns = set(all_patterns())
    for gate in all_gates():
        assert gate.class_a | gate.class_b == patterns
        assert not gate.class_a & gate.class_b
        assert gate.class_a and gate.class_b


def test_gates_are_distinct_up_to_swapping():
    seen = set()
    for gate in all_gates():
        key = frozenset({gate.class_a, gate.class_b})
        assert key not in seen
        seen.add(key)


def test_gate_by_id_bounds():
    assert gate_by_id(0).label() == "{(0,0)}"
    with pytest.raises(ValueError):
        gate_by_id(7)


@pytest.mark.parametrize(
    "variant,pattern,expected",
    [
        ("B", (0, 0), [(0, -1.0), (2, -1.0)]),
        ("A", (0, 0), []),
        ("A", (1, 0), [(0, 1.0)]),
        ("A'", (0, 1), [(2, 1.0), (4, 1.0)]),
        ("C", (1, 0), [(0, 1.0), (2, -1.0), (4, 1.0), (6, 1.0)]),
    ],
)
def test_encode_defaults(variant, pattern, expected):
    assert encode(default_scheme(variant), InputPattern(*pattern)).pairs() == expected


def test_encoding_a_of_zero_pattern_is_empty():
    assert encode(default_scheme("A"), InputPattern(0, 0)) == EMPTY_TRAIN


@pytest.mark.parametrize("variant", ["A", "A'", "B", "C"])
def test_encode_is_injective(variant):
    scheme = default_scheme(variant)
    trains = [encode(scheme, p) for p in all_patterns()]
    assert len(set(trains)) == 4


@pytest.mark.parametrize("variant,limit", [("A'", 3), ("B", 2), ("C", 4)])
def test_event_counts_and_bounds(variant, limit):
    scheme = default_scheme(variant)
    allowed = set(scheme.spike_times) | {t for t, _ in scheme.reference_spikes}
    for pattern in all_patterns():
        train = encode(scheme, pattern)
        assert len(train) <= limit
        assert set(train.times()) <= allowed
        if variant == "C":
            assert len(train) == 4


def test_encoding_b_flip_negates():
    scheme = default_scheme("B")
    for pattern in all_patterns():
        assert encode(scheme, pattern.flipped()) == -encode(scheme, pattern)


def test_parse_encoding_variant_aliases():
    assert parse_encoding_variant("A′") == EncodingVariant.A_PRIME
    assert parse_encoding_variant("Ap") == EncodingVariant.A_PRIME
    assert parse_encoding_variant("c") == EncodingVariant.C
    with pytest.raises(ValueError):
        parse_encoding_variant("D")


def test_default_schemes_are_valid():
    for variant in EncodingVariant:
        assert validate_scheme(default_scheme(variant)) == []


@pytest.mark.parametrize(
    "scheme,fragment",
    [
        (EncodingScheme(EncodingVariant.B, (0, 0), -1.0, 1.0), "distinct"),
        (EncodingScheme(EncodingVariant.B, (0, 2), 0.0, 1.0), "nonzero"),
        (EncodingScheme(EncodingVariant.C, (0, 2), -1.0, 1.0, ((4, 1.0),)), "exactly 2"),
        (EncodingScheme(EncodingVariant.A, (0, 2), 0.0, 1.0, ((2, 1.0),)), "Reference spike times"),
        (EncodingScheme(EncodingVariant.A, (0, 2), 1.0, 1.0), "must differ"),
    ],
)
def test_validate_scheme_reports_problems(scheme, fragment):
    errors = validate_scheme(scheme)
    assert any(fragment in e for e in errors), errors


def test_scheme_from_dict_overrides_and_round_trips():
    scheme = scheme_from_dict({"variant": "C", "times": [1, 3], "refs": [[5, 0.5], [7, 2.0]]})
    assert scheme.spike_times == (1, 3)
    assert scheme.reference_spikes == ((5, 0.5), (7, 2.0))
    assert scheme.amp_for_zero == -1.0
    assert scheme_from_dict(scheme.to_dict()) == scheme
    assert last_event_time(scheme) == 7
