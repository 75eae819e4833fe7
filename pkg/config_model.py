"""Dataclass-based configuration schema for experiments.

This module defines the persisted configuration model (one section per
simulation module). The shipped `config.json` holds the documented
defaults; command-line flags override individual fields per run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

try:
    from .encoding import parse_encoding_variant
    from .lif_neuron import ALL_VARIANTS, parse_variant
except ImportError:
    from encoding import parse_encoding_variant  # type: ignore[no-redef]
    from lif_neuron import ALL_VARIANTS, parse_variant  # type: ignore[no-redef]


CONFIG_VERSION = 1


@dataclass
class NeuronSection:
    """Single-neuron settings used by `simulate` and as sweep defaults.

    - variant: one of SRM/SRS/SRZ/PRM/PRS/PRZ.
    - theta: firing threshold (> 0); also used by sweeps.
    - beta: per-tick leak in (0, 1].
    - t_r: refractory ticks (forced to 0 for reset-to-mod).
    """

    variant: str = "PRM"
    theta: float = 1.0
    beta: float = 1.0
    t_r: int = 0


@dataclass
class ReservoirSection:
    """Reservoir size, simulated horizon and whether W has a diagonal."""

    n_neurons: int = 2
    horizon: int = 20
    include_self_connections: bool = True


@dataclass
class EncodingSection:
    """Encoding scheme; unset amplitudes/refs take the variant's defaults."""

    variant: str = "B"
    times: List[int] = field(default_factory=lambda: [0, 2])
    amp0: Optional[float] = None
    amp1: Optional[float] = None
    refs: Optional[List[List[float]]] = None


@dataclass
class SweepSection:
    """Monte Carlo settings.

    - refractory_times: t_r values tried for the reset-by-subtraction
      variants; other variants use t_r = 0.
    - workers: 1 runs in-process, more uses a process pool.
    """

    runs: int = 200
    seed: int = 20240601
    variants: List[str] = field(default_factory=lambda: [str(v) for v in ALL_VARIANTS])
    betas: List[float] = field(default_factory=lambda: [1.0, 0.5])
    refractory_times: List[int] = field(default_factory=lambda: [1])
    workers: int = 1


@dataclass
class OutputSection:
    out_dir: str = "reports"


@dataclass
class ExperimentConfig:
    """Top-level persisted configuration container."""

    config_version: int = CONFIG_VERSION
    neuron: NeuronSection = field(default_factory=NeuronSection)
    reservoir: ReservoirSection = field(default_factory=ReservoirSection)
    encoding: EncodingSection = field(default_factory=EncodingSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    output: OutputSection = field(default_factory=OutputSection)


def validate_experiment_config(config: ExperimentConfig) -> List[str]:
    errors: List[str] = []

    if not isinstance(config, ExperimentConfig):
        return ["Config must be an ExperimentConfig instance."]

    try:
        parse_variant(config.neuron.variant)
    except ValueError as e:
        errors.append(f"neuron.variant: {e}")
    if not config.neuron.theta > 0:
        errors.append("neuron.theta must be > 0.")
    if not 0 < config.neuron.beta <= 1:
        errors.append("neuron.beta must lie in (0, 1].")
    if config.neuron.t_r < 0:
        errors.append("neuron.t_r must be >= 0.")

    if config.reservoir.n_neurons < 1:
        errors.append("reservoir.n_neurons must be >= 1.")
    if config.reservoir.horizon < 1:
        errors.append("reservoir.horizon must be >= 1.")

    try:
        parse_encoding_variant(config.encoding.variant)
    except ValueError as e:
        errors.append(f"encoding.variant: {e}")

    if config.sweep.runs < 1:
        errors.append("sweep.runs must be >= 1.")
    if not config.sweep.variants:
        errors.append("sweep.variants must name at least one variant.")
    for raw in config.sweep.variants:
        try:
            parse_variant(raw)
        except ValueError as e:
            errors.append(f"sweep.variants: {e}")
    if not config.sweep.betas:
        errors.append("sweep.betas must list at least one beta.")
    for beta in config.sweep.betas:
        if not 0 < beta <= 1:
            errors.append(f"sweep.betas: {beta!r} is outside (0, 1].")
    if not config.sweep.refractory_times or any(t < 0 for t in config.sweep.refractory_times):
        errors.append("sweep.refractory_times must be a non-empty list of ints >= 0.")
    if config.sweep.workers < 1:
        errors.append("sweep.workers must be >= 1.")

    return errors
