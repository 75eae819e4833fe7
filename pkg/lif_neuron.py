"""Discrete-time leaky integrate-and-fire neuron with six reset variants.

One tick is processed as leak -> integrate -> threshold -> reset. The six
variants combine a thresholding mode (positive only, or symmetric) with a
reset mechanism (to zero, by subtraction, to mod).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, List, Tuple, Type, TypeVar

try:
    from .spike_core import SpikeTrain
except ImportError:
    from spike_core import SpikeTrain  # type: ignore[no-redef]


class _StrEnum(str, Enum):
    """Enum with stable string values for JSON serialization."""

    def __str__(self) -> str:
        return str(self.value)


class ThresholdMode(_StrEnum):
    """Which potentials can trigger a spike."""

    POSITIVE = "Positive"  # u >= theta
    SYMMETRIC = "Symmetric"  # |u| >= theta


class ResetMechanism(_StrEnum):
    TO_ZERO = "ToZero"
    BY_SUBTRACTION = "BySubtraction"
    TO_MOD = "ToMod"


class NeuronVariant(_StrEnum):
    """The six model variants, named by their report abbreviations."""

    SRM = "SRM"
    SRS = "SRS"
    SRZ = "SRZ"
    PRM = "PRM"
    PRS = "PRS"
    PRZ = "PRZ"

    @property
    def mode(self) -> ThresholdMode:
        if self.value.startswith("S"):
            return ThresholdMode.SYMMETRIC
        return ThresholdMode.POSITIVE

    @property
    def reset(self) -> ResetMechanism:
        return {
            "M": ResetMechanism.TO_MOD,
            "S": ResetMechanism.BY_SUBTRACTION,
            "Z": ResetMechanism.TO_ZERO,
        }[self.value[-1]]


ALL_VARIANTS: List[NeuronVariant] = list(NeuronVariant)


TEnum = TypeVar("TEnum", bound=Enum)


def _parse_enum(enum_cls: Type[TEnum], raw: Any) -> TEnum:
    """Parse a value or member name into `enum_cls`; raise ValueError otherwise."""

    if isinstance(raw, enum_cls):
        return raw
    if isinstance(raw, str):
        text = raw.strip()
        try:
            return enum_cls(text)  # type: ignore[call-arg]
        except ValueError:
            member = getattr(enum_cls, "__members__", {}).get(text.upper())
            if member is not None:
                return member
    allowed = "/".join(str(m.value) for m in enum_cls)  # type: ignore[attr-defined]
    raise ValueError(f"unknown {enum_cls.__name__} {raw!r} (expected {allowed})")


def parse_variant(raw: Any) -> NeuronVariant:
    return _parse_enum(NeuronVariant, raw)


class NeuronConfigError(ValueError):
    pass


class NeuronInputError(ValueError):
    """Raised on non-finite input; usually a symptom of exploding weights."""


@dataclass(frozen=True)
class NeuronConfig:
    mode: ThresholdMode
    reset: ResetMechanism
    theta: float = 1.0
    beta: float = 1.0
    t_r: int = 0

    def __post_init__(self) -> None:
        errors = validate_neuron_config(self)
        if errors:
            raise NeuronConfigError("; ".join(errors))

    @property
    def variant(self) -> NeuronVariant:
        prefix = "S" if self.mode == ThresholdMode.SYMMETRIC else "P"
        suffix = {
            ResetMechanism.TO_MOD: "M",
            ResetMechanism.BY_SUBTRACTION: "S",
            ResetMechanism.TO_ZERO: "Z",
        }[self.reset]
        return NeuronVariant(prefix + "R" + suffix)


def validate_neuron_config(config: NeuronConfig) -> List[str]:
    errors: List[str] = []

    if not isinstance(config.mode, ThresholdMode):
        errors.append("Threshold mode must be Positive or Symmetric.")
    if not isinstance(config.reset, ResetMechanism):
        errors.append("Reset mechanism must be ToZero, BySubtraction or ToMod.")

    theta = config.theta
    if not isinstance(theta, (int, float)) or not math.isfinite(theta) or theta <= 0:
        errors.append(f"Threshold theta must be a finite value > 0 (got {theta!r}).")

    beta = config.beta
    if not isinstance(beta, (int, float)) or not (0 < beta <= 1):
        errors.append(f"Leak beta must lie in (0, 1] (got {beta!r}).")

    t_r = config.t_r
    if not isinstance(t_r, int) or isinstance(t_r, bool) or t_r < 0:
        errors.append(f"Refractory time t_r must be a non-negative int (got {t_r!r}).")
    elif config.reset == ResetMechanism.TO_MOD and t_r != 0:
        errors.append("Reset-to-mod requires t_r = 0.")

    return errors


def neuron_config_for(
    variant: Any, *, theta: float = 1.0, beta: float = 1.0, t_r: int = 0
) -> NeuronConfig:
    """Build the config for a named variant.

    Reset-to-mod is the t_r -> 0 limit, so t_r is forced to 0 for *RM.
    """

    v = parse_variant(variant)
    if v.reset == ResetMechanism.TO_MOD:
        t_r = 0
    return NeuronConfig(
        mode=v.mode, reset=v.reset, theta=float(theta), beta=float(beta), t_r=int(t_r)
    )


@dataclass(frozen=True)
class NeuronState:
    u: float = 0.0
    refractory_remaining: int = 0


INITIAL_STATE = NeuronState()


def _triggers(config: NeuronConfig, u: float) -> bool:
    if config.mode == ThresholdMode.SYMMETRIC:
        return abs(u) >= config.theta
    return u >= config.theta


def step(
    config: NeuronConfig, state: NeuronState, input_value: float
) -> Tuple[NeuronState, float]:
    """Advance one tick. Returns the new state and the emitted amplitude.

    An emitted value of 0.0 means no spike this tick.
    """

    x = float(input_value)
    if not math.isfinite(x):
        raise NeuronInputError(f"non-finite neuron input {input_value!r}")

    theta = config.theta
    u = config.beta * state.u + x
    if not math.isfinite(u):
        raise NeuronInputError(f"membrane potential diverged ({u!r})")

    # Refractory ticks integrate but cannot fire.
    if state.refractory_remaining > 0:
        return NeuronState(u, state.refractory_remaining - 1), 0.0

    if not _triggers(config, u):
        return NeuronState(u, 0), 0.0

    sign = 1.0 if u > 0 else -1.0

    if config.reset == ResetMechanism.TO_MOD:
        # u = n*theta + r with |r| < theta; fmod is exact.
        r = math.fmod(abs(u), theta)
        n = int(round((abs(u) - r) / theta))
        return NeuronState(sign * r, 0), sign * n * theta

    if config.reset == ResetMechanism.BY_SUBTRACTION:
        return NeuronState(u - sign * theta, config.t_r), sign * theta

    return NeuronState(0.0, config.t_r), sign * theta


@dataclass(frozen=True)
class TickRecord:
    tick: int
    input: float
    u: float
    emitted: float
    refractory: bool


def trace(config: NeuronConfig, train: SpikeTrain, horizon: int) -> List[TickRecord]:
    """Per-tick record of a single neuron driven by `train` over 0..horizon."""

    if horizon < train.last_time():
        raise ValueError(
            f"horizon {horizon} precedes last input tick {train.last_time()}"
        )

    drive = train.as_dict()
    state = INITIAL_STATE
    out: List[TickRecord] = []
    for t in range(int(horizon) + 1):
        x = drive.get(t, 0.0)
        blocked = state.refractory_remaining > 0
        state, emitted = step(config, state, x)
        out.append(TickRecord(t, x, state.u, emitted, blocked))
    return out


def run(config: NeuronConfig, train: SpikeTrain, horizon: int) -> SpikeTrain:
    return SpikeTrain.from_pairs(
        (rec.tick, rec.emitted) for rec in trace(config, train, horizon) if rec.emitted
    )
