"""Fully connected reservoir of identical LIF neurons.

A single input channel drives neuron 0 only (encoder E = (1, 0, ..., 0)).
Recurrent spikes reach their targets one tick later through W, where
w[j][k] is the weight from neuron j onto neuron k.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np

try:
    from .lif_neuron import INITIAL_STATE, NeuronConfig, NeuronInputError, NeuronState, step
    from .spike_core import SpikeTrain
except ImportError:
    from lif_neuron import INITIAL_STATE, NeuronConfig, NeuronInputError, NeuronState, step  # type: ignore[no-redef]
    from spike_core import SpikeTrain  # type: ignore[no-redef]


_LOGGER = logging.getLogger(__name__)

WEIGHT_GRID: np.ndarray = np.arange(-10, 11) / 10.0

DEFAULT_HORIZON = 20


class SimulationError(RuntimeError):
    def __init__(self, message: str, *, neuron: int = -1, tick: int = -1):
        super().__init__(message)
        self.neuron = neuron
        self.tick = tick


class WeightShapeError(ValueError):
    pass


@dataclass(frozen=True)
class WeightMatrix:
    w: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.w, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise WeightShapeError(f"weight matrix must be square N x N, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise WeightShapeError("weight matrix has non-finite entries")
        if np.any(np.abs(arr) > 1.0):
            raise WeightShapeError("weight entries must lie in [-1, 1]")
        arr.setflags(write=False)
        object.__setattr__(self, "w", arr)

    @property
    def n(self) -> int:
        return int(self.w.shape[0])

    def on_grid(self) -> bool:
        return bool(np.all(np.isclose(self.w * 10.0, np.round(self.w * 10.0), atol=1e-9)))

    def with_row_zeroed(self, j: int) -> "WeightMatrix":
        arr = self.w.copy()
        arr[j, :] = 0.0
        return WeightMatrix(arr)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightMatrix):
            return NotImplemented
        return self.w.shape == other.w.shape and bool(np.array_equal(self.w, other.w))

    def __hash__(self) -> int:
        return hash((self.w.shape, self.w.tobytes()))


def sample_weights(n: int, rng_seed: int, *, include_self: bool = True) -> WeightMatrix:
    """Draw every entry uniformly from the 21-value grid {-1.0, -0.9, ..., 1.0}.

    Deterministic for a given seed. With `include_self=False` the diagonal is
    zeroed after sampling, so off-diagonal draws do not depend on the flag.
    """

    if int(n) < 1:
        raise ValueError(f"reservoir size must be >= 1, got {n!r}")
    rng = np.random.default_rng(int(rng_seed))
    idx = rng.integers(0, WEIGHT_GRID.size, size=(int(n), int(n)))
    arr = WEIGHT_GRID[idx]
    if not include_self:
        np.fill_diagonal(arr, 0.0)
    return WeightMatrix(arr)


@dataclass(frozen=True)
class ReservoirConfig:
    neuron: NeuronConfig
    weights: WeightMatrix
    horizon: int = DEFAULT_HORIZON


def _check_horizon(config: ReservoirConfig, train: SpikeTrain) -> None:
    if config.horizon < train.last_time() + 1:
        raise ValueError(
            f"horizon {config.horizon} must be at least last input tick + 1 "
            f"({train.last_time() + 1})"
        )


def simulate_traces(
    config: ReservoirConfig, train: SpikeTrain
) -> Tuple[List[SpikeTrain], np.ndarray]:
    """Run the reservoir and also return membrane potentials.

    Returns the N output trains and a (horizon + 1) x N array of potentials
    after each tick.
    """

    _check_horizon(config, train)
    n = config.weights.n
    w = config.weights.w
    drive = train.as_dict()

    states: List[NeuronState] = [INITIAL_STATE] * n
    previous = np.zeros(n)
    potentials = np.zeros((config.horizon + 1, n))
    emitted_pairs: List[List[Tuple[int, float]]] = [[] for _ in range(n)]

    for t in range(config.horizon + 1):
        recurrent = previous @ w  # sum_j w[j][k] * psi_j(t - 1)
        current = np.zeros(n)
        for k in range(n):
            x = float(recurrent[k])
            if k == 0:
                x += drive.get(t, 0.0)
            try:
                states[k], s = step(config.neuron, states[k], x)
            except NeuronInputError as e:
                raise SimulationError(
                    f"neuron {k} failed at tick {t}: {e}", neuron=k, tick=t
                ) from e
            current[k] = s
            potentials[t, k] = states[k].u
            if s != 0.0:
                emitted_pairs[k].append((t, s))
        previous = current

    return [SpikeTrain.from_pairs(p) for p in emitted_pairs], potentials


def simulate(config: ReservoirConfig, train: SpikeTrain) -> List[SpikeTrain]:
    outputs, _ = simulate_traces(config, train)
    return outputs


def weights_to_csv(weights: WeightMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in weights.w:
        writer.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def parse_weights_csv(text: str, *, expected_n: Union[int, None] = None) -> WeightMatrix:
    rows: List[Sequence[str]] = [
        r for r in csv.reader(io.StringIO(text)) if r and not r[0].lstrip().startswith("#")
    ]
    try:
        values = [[float(x) for x in r] for r in rows]
    except ValueError as e:
        raise WeightShapeError(f"weight matrix has a non-numeric entry: {e}") from e
    if not values or any(len(r) != len(values) for r in values):
        raise WeightShapeError(
            f"weight matrix must be square, got {len(values)} rows with lengths "
            f"{[len(r) for r in values]}"
        )
    if expected_n is not None and len(values) != int(expected_n):
        raise WeightShapeError(f"weight matrix has {len(values)} rows, expected {expected_n}")
    return WeightMatrix(np.array(values, dtype=float))


def load_weights_csv(path: Union[str, Path], *, expected_n: Union[int, None] = None) -> WeightMatrix:
    text = Path(path).read_text(encoding="utf-8")
    _LOGGER.debug("Loaded weight matrix from %s", str(path))
    return parse_weights_csv(text, expected_n=expected_n)
