"""Binary gate partitions and temporal spike encodings of 2-bit inputs.

The four input patterns are encoded on a single input channel. Each bit
occupies a slot time; variant-dependent amplitudes stand for 0 and 1, and
some variants append fixed reference spikes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, List, Tuple

try:
    from .lif_neuron import _parse_enum, _StrEnum
    from .spike_core import SpikeTrain
except ImportError:
    from lif_neuron import _parse_enum, _StrEnum  # type: ignore[no-redef]
    from spike_core import SpikeTrain  # type: ignore[no-redef]


@dataclass(frozen=True, order=True)
class InputPattern:
    b1: int
    b2: int

    def __post_init__(self) -> None:
        if self.b1 not in (0, 1) or self.b2 not in (0, 1):
            raise ValueError(f"pattern bits must be 0/1, got ({self.b1}, {self.b2})")

    def bits(self) -> Tuple[int, int]:
        return (self.b1, self.b2)

    def flipped(self) -> "InputPattern":
        return InputPattern(1 - self.b1, 1 - self.b2)

    def __str__(self) -> str:
        return f"({self.b1},{self.b2})"


def all_patterns() -> List[InputPattern]:
    return [InputPattern(0, 0), InputPattern(0, 1), InputPattern(1, 0), InputPattern(1, 1)]


@dataclass(frozen=True)
class GatePartition:
    id: int
    class_a: FrozenSet[InputPattern]
    class_b: FrozenSet[InputPattern]

    def __post_init__(self) -> None:
        every = frozenset(all_patterns())
        if self.class_a | self.class_b != every or self.class_a & self.class_b:
            raise ValueError(f"gate {self.id} is not a partition of the 4 patterns")
        if not self.class_a or not self.class_b:
            raise ValueError(f"gate {self.id} has an empty side")

    def label(self) -> str:
        return "{" + ",".join(str(p) for p in sorted(self.class_a)) + "}"

    def swapped(self) -> "GatePartition":
        return GatePartition(self.id, self.class_b, self.class_a)


# Canonical order: singletons in pattern order, then pairs containing (0,0).
# Only id 6 (XOR) is fixed by convention; ids 0..5 are a relabeling choice.
_GATE_CLASS_A: List[List[Tuple[int, int]]] = [
    [(0, 0)],
    [(0, 1)],
    [(1, 0)],
    [(1, 1)],
    [(0, 0), (0, 1)],
    [(0, 0), (1, 0)],
    [(0, 0), (1, 1)],
]

XOR_GATE_ID = 6


def all_gates() -> List[GatePartition]:
    every = frozenset(all_patterns())
    gates: List[GatePartition] = []
    for gate_id, members in enumerate(_GATE_CLASS_A):
        class_a = frozenset(InputPattern(*bits) for bits in members)
        gates.append(GatePartition(gate_id, class_a, every - class_a))
    return gates


def gate_by_id(gate_id: int) -> GatePartition:
    gates = all_gates()
    if not 0 <= int(gate_id) < len(gates):
        raise ValueError(f"gate id must be in 0..{len(gates) - 1}, got {gate_id!r}")
    return gates[int(gate_id)]


class EncodingVariant(_StrEnum):
    A = "A"
    A_PRIME = "A'"
    B = "B"
    C = "C"


def parse_encoding_variant(raw: Any) -> EncodingVariant:
    if isinstance(raw, str) and raw.strip() in {"A′", "Ap", "A_PRIME", "A-prime"}:
        return EncodingVariant.A_PRIME
    return _parse_enum(EncodingVariant, raw)


@dataclass(frozen=True)
class EncodingScheme:
    """Pluggable description of how a 2-bit pattern becomes an input train.

    Bit i is placed at `spike_times[i]` with amplitude `amp_for_one` or
    `amp_for_zero` (a zero amplitude emits nothing); `reference_spikes` are
    appended unchanged for every pattern.
    """

    variant: EncodingVariant
    spike_times: Tuple[int, int] = (0, 2)
    amp_for_zero: float = 0.0
    amp_for_one: float = 1.0
    reference_spikes: Tuple[Tuple[int, float], ...] = field(default_factory=tuple)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "variant": str(self.variant.value),
            "times": [int(t) for t in self.spike_times],
            "amp0": float(self.amp_for_zero),
            "amp1": float(self.amp_for_one),
            "refs": [[int(t), float(a)] for t, a in self.reference_spikes],
        }


def default_scheme(variant: Any) -> EncodingScheme:
    """Reconstructed defaults for the four encoding variants."""

    v = parse_encoding_variant(variant)
    if v == EncodingVariant.A:
        return EncodingScheme(v, (0, 2), 0.0, 1.0, ())
    if v == EncodingVariant.A_PRIME:
        return EncodingScheme(v, (0, 2), 0.0, 1.0, ((4, 1.0),))
    if v == EncodingVariant.B:
        return EncodingScheme(v, (0, 2), -1.0, 1.0, ())
    return EncodingScheme(v, (0, 2), -1.0, 1.0, ((4, 1.0), (6, 1.0)))


def scheme_from_dict(data: Dict[str, Any]) -> EncodingScheme:
    """Build a scheme from `{variant, times, amp0, amp1, refs}`.

    Missing keys fall back to the variant's defaults.
    """

    base = default_scheme(data.get("variant", "B"))
    times = data.get("times")
    refs = data.get("refs")
    return EncodingScheme(
        variant=base.variant,
        spike_times=(
            tuple(int(t) for t in times)  # type: ignore[arg-type]
            if isinstance(times, (list, tuple))
            else base.spike_times
        ),
        amp_for_zero=float(data.get("amp0", base.amp_for_zero)),
        amp_for_one=float(data.get("amp1", base.amp_for_one)),
        reference_spikes=(
            tuple((int(r[0]), float(r[1])) for r in refs)
            if isinstance(refs, (list, tuple))
            else base.reference_spikes
        ),
    )


def validate_scheme(scheme: EncodingScheme) -> List[str]:
    errors: List[str] = []

    if not isinstance(scheme.variant, EncodingVariant):
        errors.append("Encoding variant must be one of A/A'/B/C.")
        return errors

    times = list(scheme.spike_times)
    if len(times) != 2:
        errors.append("Encoding needs exactly 2 bit slot times.")
    elif any(t < 0 for t in times) or len(set(times)) != 2:
        errors.append("Bit slot times must be distinct and non-negative.")

    ref_times = [t for t, _ in scheme.reference_spikes]
    if any(t < 0 for t in ref_times):
        errors.append("Reference spike times must be non-negative.")
    if set(ref_times) & set(times) or len(set(ref_times)) != len(ref_times):
        errors.append("Reference spike times must be distinct from each other and the bit slots.")
    if any(a == 0 for _, a in scheme.reference_spikes):
        errors.append("Reference spikes must have nonzero amplitude.")

    if scheme.amp_for_zero == scheme.amp_for_one:
        errors.append("Bit amplitudes for 0 and 1 must differ.")

    v = scheme.variant
    if v == EncodingVariant.A and scheme.reference_spikes:
        errors.append("Variant A has no reference spikes.")
    if v == EncodingVariant.A_PRIME and len(scheme.reference_spikes) != 1:
        errors.append("Variant A' has exactly 1 reference spike.")
    if v in (EncodingVariant.B, EncodingVariant.C) and (
        scheme.amp_for_zero == 0 or scheme.amp_for_one == 0
    ):
        errors.append("Variants B and C encode both bit values with nonzero spikes.")
    if v == EncodingVariant.B and scheme.reference_spikes:
        errors.append("Variant B has no reference spikes.")
    if v == EncodingVariant.C and len(scheme.reference_spikes) != 2:
        errors.append("Variant C has exactly 2 reference spikes.")

    return errors


def encode(scheme: EncodingScheme, pattern: InputPattern) -> SpikeTrain:
    pairs: List[Tuple[int, float]] = []
    for slot, bit in zip(scheme.spike_times, pattern.bits()):
        amp = scheme.amp_for_one if bit else scheme.amp_for_zero
        if amp != 0:
            pairs.append((int(slot), float(amp)))
    pairs.extend((int(t), float(a)) for t, a in scheme.reference_spikes)
    return SpikeTrain.from_pairs(pairs)


def last_event_time(scheme: EncodingScheme) -> int:
    times = list(scheme.spike_times) + [t for t, _ in scheme.reference_spikes]
    return max(times) if times else -1
