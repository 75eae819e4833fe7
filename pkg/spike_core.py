"""Spike train value types shared by every simulation module.

Time is a non-negative integer tick; amplitudes are signed reals. Trains are
immutable and always normalized: strictly increasing times, no zero events.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple


class SpikeTrainParseError(ValueError):
    """Raised when the `t:a` text form of a train cannot be parsed."""

    def __init__(self, message: str, token: str = ""):
        super().__init__(message)
        self.token = token


@dataclass(frozen=True)
class SpikeEvent:
    time: int
    amplitude: float

    def __post_init__(self) -> None:
        if not isinstance(self.time, int) or self.time < 0:
            raise ValueError(f"spike time must be a non-negative int, got {self.time!r}")
        if self.amplitude == 0:
            raise ValueError("zero-amplitude spike events are never stored")


@dataclass(frozen=True)
class SpikeTrain:
    events: Tuple[SpikeEvent, ...] = ()

    def __post_init__(self) -> None:
        last = -1
        for ev in self.events:
            if ev.time <= last:
                raise ValueError("spike train times must be strictly increasing")
            last = ev.time

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[int, float]]) -> "SpikeTrain":
        """Build a train from (time, amplitude) pairs.

        Contributions at the same tick are summed; ticks summing to exactly
        zero are dropped.
        """

        acc: Dict[int, float] = {}
        for t, a in pairs:
            t_i = int(t)
            acc[t_i] = acc.get(t_i, 0.0) + float(a)
        return cls(
            tuple(SpikeEvent(t, a) for t, a in sorted(acc.items()) if a != 0.0)
        )

    def __iter__(self) -> Iterator[SpikeEvent]:
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)

    def __bool__(self) -> bool:
        return bool(self.events)

    def __neg__(self) -> "SpikeTrain":
        return SpikeTrain(tuple(SpikeEvent(e.time, -e.amplitude) for e in self.events))

    def pairs(self) -> List[Tuple[int, float]]:
        return [(e.time, e.amplitude) for e in self.events]

    def times(self) -> List[int]:
        return [e.time for e in self.events]

    def amplitude_at(self, time: int) -> float:
        for e in self.events:
            if e.time == time:
                return e.amplitude
            if e.time > time:
                break
        return 0.0

    def as_dict(self) -> Dict[int, float]:
        return {e.time: e.amplitude for e in self.events}

    def last_time(self) -> int:
        """Time of the last event, or -1 for the empty train."""

        return self.events[-1].time if self.events else -1

    def total(self) -> float:
        """Signed sum of all amplitudes."""

        return float(sum(e.amplitude for e in self.events))

    def shifted(self, dt: int) -> "SpikeTrain":
        return SpikeTrain(tuple(SpikeEvent(e.time + int(dt), e.amplitude) for e in self.events))

    def to_text(self) -> str:
        return format_train(self)


EMPTY_TRAIN = SpikeTrain()


def merge(trains: Sequence[Tuple[float, SpikeTrain]]) -> SpikeTrain:
    """Weighted superposition of trains, dropping ticks that cancel exactly."""

    pairs: List[Tuple[int, float]] = []
    for weight, train in trains:
        w = float(weight)
        if w == 0.0:
            continue
        pairs.extend((e.time, w * e.amplitude) for e in train.events)
    return SpikeTrain.from_pairs(pairs)


def l1_norm(train: SpikeTrain) -> float:
    return float(sum(abs(e.amplitude) for e in train.events))


def format_train(train: SpikeTrain) -> str:
    # repr() keeps the float round-trip exact.
    return ",".join(f"{e.time}:{e.amplitude!r}" for e in train.events)


def parse_train(text: str) -> SpikeTrain:
    """Parse the comma-separated `t:a` form, e.g. ``0:1.0,3:-0.5``.

    Whitespace around tokens is ignored; an empty string is the empty train.
    Repeated times are summed like any other superposition.
    """

    raw = (text or "").strip()
    if not raw:
        return EMPTY_TRAIN

    pairs: List[Tuple[int, float]] = []
    for token in raw.split(","):
        tok = token.strip()
        if tok.count(":") != 1:
            raise SpikeTrainParseError(f"expected 't:a' but got {tok!r}", tok)
        t_raw, a_raw = (part.strip() for part in tok.split(":"))
        try:
            t = int(t_raw)
        except ValueError:
            raise SpikeTrainParseError(f"bad spike time in {tok!r}", tok) from None
        if t < 0:
            raise SpikeTrainParseError(f"negative spike time in {tok!r}", tok)
        try:
            a = float(a_raw)
        except ValueError:
            raise SpikeTrainParseError(f"bad amplitude in {tok!r}", tok) from None
        if not math.isfinite(a):
            raise SpikeTrainParseError(f"non-finite amplitude in {tok!r}", tok)
        pairs.append((t, a))
    return SpikeTrain.from_pairs(pairs)
