"""Monte Carlo solvability sweep over gates, neuron variants and leaks.

Each run draws one weight matrix from its own derived seed and reuses it
for every (variant, beta, t_r) group. Within a group the four encoded
patterns are simulated once and the resulting feature vectors are
partitioned for all seven gates.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

try:
    from .encoding import (
        EncodingScheme,
        EncodingVariant,
        GatePartition,
        InputPattern,
        all_gates,
        all_patterns,
        default_scheme,
        encode,
        last_event_time,
        scheme_from_dict,
        validate_scheme,
    )
    from .lif_neuron import ALL_VARIANTS, NeuronVariant, ResetMechanism, neuron_config_for, parse_variant
    from .reference_tables import has_reference, reference_l1_mean, reference_l1_std, reference_probability
    from .reservoir import DEFAULT_HORIZON, ReservoirConfig, SimulationError, WeightMatrix, sample_weights, simulate
    from .separability import (
        CertificateError,
        FeatureVector,
        LPSolveError,
        SeparabilityInstance,
        SeparabilityVerdict,
        features,
        is_separable,
        verify_verdict,
    )
    from .spike_core import l1_norm
except ImportError:
    from encoding import (  # type: ignore[no-redef]
        EncodingScheme,
        EncodingVariant,
        GatePartition,
        InputPattern,
        all_gates,
        all_patterns,
        default_scheme,
        encode,
        last_event_time,
        scheme_from_dict,
        validate_scheme,
    )
    from lif_neuron import ALL_VARIANTS, NeuronVariant, ResetMechanism, neuron_config_for, parse_variant  # type: ignore[no-redef]
    from reference_tables import has_reference, reference_l1_mean, reference_l1_std, reference_probability  # type: ignore[no-redef]
    from reservoir import DEFAULT_HORIZON, ReservoirConfig, SimulationError, WeightMatrix, sample_weights, simulate  # type: ignore[no-redef]
    from separability import (  # type: ignore[no-redef]
        CertificateError,
        FeatureVector,
        LPSolveError,
        SeparabilityInstance,
        SeparabilityVerdict,
        features,
        is_separable,
        verify_verdict,
    )
    from spike_core import l1_norm  # type: ignore[no-redef]


_LOGGER = logging.getLogger(__name__)

INVALID_FAILURE_FRACTION = 0.01

NOT_COMPUTABLE = "-"

VerdictFn = Callable[[SeparabilityInstance], SeparabilityVerdict]


@dataclass(frozen=True)
class SweepConfig:
    """Sweep parameters.

    `refractory_times` applies to reset-by-subtraction variants only; every
    other variant is run once with t_r = 0. `workers` affects scheduling
    only, never results.
    """

    n_neurons: int = 2
    runs: int = 200
    seed: int = 20240601
    variants: Tuple[NeuronVariant, ...] = tuple(ALL_VARIANTS)
    betas: Tuple[float, ...] = (1.0, 0.5)
    encoding: EncodingScheme = field(default_factory=lambda: default_scheme("B"))
    theta: float = 1.0
    refractory_times: Tuple[int, ...] = (1,)
    horizon: int = DEFAULT_HORIZON
    include_self: bool = True
    workers: int = 1

    def echo(self) -> Dict[str, Any]:
        """Result-relevant settings (everything except `workers`)."""

        return {
            "n_neurons": int(self.n_neurons),
            "runs": int(self.runs),
            "seed": int(self.seed),
            "variants": [str(v) for v in self.variants],
            "betas": [float(b) for b in self.betas],
            "encoding": self.encoding.to_dict(),
            "theta": float(self.theta),
            "refractory_times": [int(t) for t in self.refractory_times],
            "horizon": int(self.horizon),
            "include_self": bool(self.include_self),
        }


def validate_sweep_config(config: SweepConfig) -> List[str]:
    errors: List[str] = []

    if config.n_neurons < 1:
        errors.append("n_neurons must be >= 1.")
    if config.runs < 1:
        errors.append("runs must be >= 1.")
    if not config.variants:
        errors.append("At least one neuron variant is required.")
    if not config.betas:
        errors.append("At least one beta is required.")
    for beta in config.betas:
        if not 0 < beta <= 1:
            errors.append(f"beta {beta!r} is outside (0, 1].")
    if not config.theta > 0:
        errors.append("theta must be > 0.")
    if not config.refractory_times or any(t < 0 for t in config.refractory_times):
        errors.append("refractory_times must be a non-empty list of ints >= 0.")
    if config.workers < 1:
        errors.append("workers must be >= 1.")
    errors.extend(validate_scheme(config.encoding))
    if config.horizon < last_event_time(config.encoding) + 1:
        errors.append(
            f"horizon {config.horizon} must exceed the last encoded event "
            f"({last_event_time(config.encoding)})."
        )

    return errors


@dataclass(frozen=True, order=True)
class CellKey:
    gate: int
    variant: NeuronVariant
    beta: float
    t_r: int


@dataclass(frozen=True)
class RunOutcome:
    key: CellKey
    solvable: bool = False
    failed: bool = False
    l1: float = 0.0
    certificate_ok: bool = True
    boundary: bool = False


@dataclass(frozen=True)
class SweepCell:
    """Aggregated outcome for one (gate, variant, beta, t_r).

    `runs` counts the valid runs; failed runs are excluded and counted in
    `failures`.
    """

    gate: int
    variant: NeuronVariant
    beta: float
    t_r: int
    solvable_count: int
    runs: int
    failures: int = 0
    l1_mean: Optional[float] = None
    l1_std: Optional[float] = None
    certificate_violations: int = 0
    boundary_count: int = 0

    @property
    def probability_pct(self) -> float:
        if self.runs == 0:
            return 0.0
        return 100.0 * self.solvable_count / self.runs

    @property
    def invalid(self) -> bool:
        attempted = self.runs + self.failures
        return self.runs == 0 or self.failures > INVALID_FAILURE_FRACTION * attempted

    @property
    def key(self) -> CellKey:
        return CellKey(self.gate, self.variant, self.beta, self.t_r)


@dataclass(frozen=True)
class SweepReport:
    config: SweepConfig
    cells: Tuple[SweepCell, ...]
    run_seeds: Tuple[int, ...]

    def cell(
        self, gate: int, variant: NeuronVariant, beta: float, t_r: Optional[int] = None
    ) -> SweepCell:
        for c in self.cells:
            if c.gate == gate and c.variant == variant and c.beta == float(beta):
                if t_r is None or c.t_r == t_r:
                    return c
        raise KeyError(f"no cell for gate {gate}, {variant}, beta {beta}, t_r {t_r}")

    def invalid_cells(self) -> List[SweepCell]:
        return [c for c in self.cells if c.invalid]

    def column_keys(self) -> List[Tuple[NeuronVariant, int]]:
        """(variant, t_r) columns in config order."""

        out: List[Tuple[NeuronVariant, int]] = []
        for variant in self.config.variants:
            for t_r in refractory_values(self.config, variant):
                out.append((variant, t_r))
        return out


def refractory_values(config: SweepConfig, variant: NeuronVariant) -> Tuple[int, ...]:
    if variant.reset == ResetMechanism.BY_SUBTRACTION:
        return tuple(int(t) for t in config.refractory_times)
    return (0,)


def derive_run_seeds(base_seed: int, runs: int) -> List[int]:
    """Independent per-run seeds from one base seed."""

    children = np.random.SeedSequence(int(base_seed)).spawn(int(runs))
    return [int(child.generate_state(1)[0]) for child in children]


def l1_statistics(samples: Sequence[float]) -> Optional[Tuple[float, float]]:
    """Mean and population standard deviation; None when there are no samples."""

    if len(samples) == 0:
        return None
    arr = np.asarray(samples, dtype=float)
    return float(np.mean(arr)), float(np.std(arr))


def format_statistic(value: Optional[float], digits: int = 1) -> str:
    if value is None:
        return NOT_COMPUTABLE
    return f"{value:.{digits}f}"


def instance_for_gate(
    gate: GatePartition, vectors: Dict[InputPattern, FeatureVector]
) -> SeparabilityInstance:
    return SeparabilityInstance(
        tuple(vectors[p] for p in sorted(gate.class_a)),
        tuple(vectors[p] for p in sorted(gate.class_b)),
    )


def _certificate_ok(instance: SeparabilityInstance, verdict: SeparabilityVerdict) -> bool:
    # Synthetic verdicts carry no certificate and have nothing to re-check.
    if verdict.witness is None and verdict.hull_combination is None:
        return True
    return verify_verdict(instance, verdict)


def _group_outcomes(
    config: SweepConfig,
    weights: WeightMatrix,
    variant: NeuronVariant,
    beta: float,
    t_r: int,
    verdict_fn: VerdictFn,
) -> List[RunOutcome]:
    gates = all_gates()
    neuron = neuron_config_for(variant, theta=config.theta, beta=beta, t_r=t_r)
    reservoir = ReservoirConfig(neuron, weights, config.horizon)

    try:
        vectors: Dict[InputPattern, FeatureVector] = {}
        l1_total = 0.0
        for pattern in all_patterns():
            outputs = simulate(reservoir, encode(config.encoding, pattern))
            vectors[pattern] = features(outputs)
            l1_total += sum(l1_norm(train) for train in outputs)
    except SimulationError as e:
        _LOGGER.warning("Simulation failed for %s beta=%s t_r=%d: %s", variant, beta, t_r, e)
        return [RunOutcome(CellKey(g.id, variant, beta, t_r), failed=True) for g in gates]

    out: List[RunOutcome] = []
    for gate in gates:
        key = CellKey(gate.id, variant, beta, t_r)
        instance = instance_for_gate(gate, vectors)
        try:
            verdict = verdict_fn(instance)
        except (LPSolveError, CertificateError) as e:
            _LOGGER.warning("Separability check failed for gate %d %s: %s", gate.id, variant, e)
            out.append(RunOutcome(key, failed=True))
            continue
        out.append(
            RunOutcome(
                key,
                solvable=bool(verdict.separable),
                l1=l1_total,
                certificate_ok=_certificate_ok(instance, verdict),
                boundary=bool(verdict.boundary),
            )
        )
    return out


def _run_one(
    config: SweepConfig, run_index: int, run_seed: int, verdict_fn: VerdictFn
) -> Tuple[int, List[RunOutcome]]:
    weights = sample_weights(config.n_neurons, run_seed, include_self=config.include_self)
    outcomes: List[RunOutcome] = []
    for variant in config.variants:
        for beta in config.betas:
            for t_r in refractory_values(config, variant):
                outcomes.extend(
                    _group_outcomes(config, weights, variant, float(beta), t_r, verdict_fn)
                )
    return run_index, outcomes


def _aggregate(config: SweepConfig, per_run: List[List[RunOutcome]]) -> List[SweepCell]:
    buckets: Dict[CellKey, List[RunOutcome]] = {}
    for outcomes in per_run:
        for outcome in outcomes:
            buckets.setdefault(outcome.key, []).append(outcome)

    cells: List[SweepCell] = []
    for variant in config.variants:
        for beta in config.betas:
            for t_r in refractory_values(config, variant):
                for gate in all_gates():
                    key = CellKey(gate.id, variant, float(beta), t_r)
                    bucket = buckets.get(key, [])
                    valid = [o for o in bucket if not o.failed]
                    solvable_l1 = [o.l1 for o in valid if o.solvable]
                    stats = l1_statistics(solvable_l1)
                    cells.append(
                        SweepCell(
                            gate=gate.id,
                            variant=variant,
                            beta=float(beta),
                            t_r=t_r,
                            solvable_count=len(solvable_l1),
                            runs=len(valid),
                            failures=len(bucket) - len(valid),
                            l1_mean=stats[0] if stats else None,
                            l1_std=stats[1] if stats else None,
                            certificate_violations=sum(1 for o in valid if not o.certificate_ok),
                            boundary_count=sum(1 for o in valid if o.boundary),
                        )
                    )
    return cells


def run_sweep(config: SweepConfig, verdict_fn: Optional[VerdictFn] = None) -> SweepReport:
    """Run the full sweep and aggregate per cell.

    Results depend only on `config.echo()`: runs are collected by index, so
    the worker count and scheduling never change the report. A custom
    `verdict_fn` must be picklable when `workers > 1`.
    """

    errors = validate_sweep_config(config)
    if errors:
        raise ValueError("; ".join(errors))

    fn: VerdictFn = verdict_fn if verdict_fn is not None else is_separable
    seeds = derive_run_seeds(config.seed, config.runs)
    per_run: List[List[RunOutcome]] = [[] for _ in range(config.runs)]

    _LOGGER.info(
        "Sweep start: %d runs, %d variants, %d betas, workers=%d",
        config.runs,
        len(config.variants),
        len(config.betas),
        config.workers,
    )

    if config.workers == 1:
        for idx, seed in enumerate(seeds):
            _, per_run[idx] = _run_one(config, idx, seed, fn)
    else:
        chunk = max(1, math.ceil(config.runs / (config.workers * 4)))
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = pool.map(
                _run_one,
                [config] * config.runs,
                range(config.runs),
                seeds,
                [fn] * config.runs,
                chunksize=chunk,
            )
            for idx, outcomes in results:
                per_run[idx] = outcomes

    cells = _aggregate(config, per_run)
    invalid = sum(1 for c in cells if c.invalid)
    _LOGGER.info("Sweep finished: %d cells, %d invalid", len(cells), invalid)
    return SweepReport(config=config, cells=tuple(cells), run_seeds=tuple(seeds))


@dataclass(frozen=True)
class ReferenceComparison:
    gate: int
    variant: NeuronVariant
    beta: float
    t_r: int
    observed_pct: float
    reference_pct: float

    @property
    def delta(self) -> float:
        return self.observed_pct - self.reference_pct

    @property
    def zero_agrees(self) -> bool:
        """Both zero or both nonzero."""

        return (self.observed_pct == 0.0) == (self.reference_pct == 0.0)


def compare_to_reference(report: SweepReport) -> List[ReferenceComparison]:
    """Pair every cell with its published percentage, where one exists."""

    encoding = report.config.encoding.variant
    out: List[ReferenceComparison] = []
    for c in report.cells:
        if not has_reference(encoding, c.beta):
            continue
        ref = reference_probability(encoding, c.variant, c.beta, c.gate)
        if ref is None:
            continue
        out.append(
            ReferenceComparison(c.gate, c.variant, c.beta, c.t_r, c.probability_pct, ref)
        )
    return out


@dataclass(frozen=True)
class L1Comparison:
    gate: int
    variant: NeuronVariant
    beta: float
    t_r: int
    observed_mean: Optional[float]
    observed_std: Optional[float]
    reference_mean: Optional[float]
    reference_std: Optional[float]

    @property
    def mean_delta(self) -> Optional[float]:
        if self.observed_mean is None or self.reference_mean is None:
            return None
        return self.observed_mean - self.reference_mean

    @property
    def computable_agrees(self) -> bool:
        """Both have a statistic or neither has one."""

        return (self.observed_mean is None) == (self.reference_mean is None)


def compare_l1_to_reference(report: SweepReport) -> List[L1Comparison]:
    """Pair every cell's l1 mean and std with the published values.

    Only (encoding, beta) pairs with a published table are compared; a
    published "-" is kept as None.
    """

    encoding = report.config.encoding.variant
    out: List[L1Comparison] = []
    for c in report.cells:
        if not has_reference(encoding, c.beta):
            continue
        out.append(
            L1Comparison(
                c.gate,
                c.variant,
                c.beta,
                c.t_r,
                c.l1_mean,
                c.l1_std,
                reference_l1_mean(encoding, c.variant, c.beta, c.gate),
                reference_l1_std(encoding, c.variant, c.beta, c.gate),
            )
        )
    return out


@dataclass(frozen=True)
class SparsityComparison:
    """Gate-wise l1 means of a reset-to-mod variant against a denser one."""

    beta: float
    sparse: NeuronVariant
    dense: NeuronVariant
    compared_gates: Tuple[int, ...]
    sparser_gates: Tuple[int, ...]

    @property
    def majority(self) -> bool:
        return 2 * len(self.sparser_gates) > len(self.compared_gates)


def sparsity_summary(
    report: SweepReport,
    sparse: NeuronVariant = NeuronVariant.PRM,
    dense: NeuronVariant = NeuronVariant.SRM,
) -> List[SparsityComparison]:
    """Per beta, the gates where `sparse` has mean l1 <= `dense`.

    Gates where either mean is not computable are left out. Empty when the
    sweep did not run both variants.
    """

    if sparse not in report.config.variants or dense not in report.config.variants:
        return []
    out: List[SparsityComparison] = []
    for beta in report.config.betas:
        compared: List[int] = []
        sparser: List[int] = []
        for gate in all_gates():
            a = report.cell(gate.id, sparse, beta).l1_mean
            b = report.cell(gate.id, dense, beta).l1_mean
            if a is None or b is None:
                continue
            compared.append(gate.id)
            if a <= b:
                sparser.append(gate.id)
        out.append(SparsityComparison(float(beta), sparse, dense, tuple(compared), tuple(sparser)))
    return out


def sweep_config_from_echo(echo: Dict[str, Any], *, workers: int = 1) -> SweepConfig:
    """Rebuild a config from `SweepConfig.echo()` output (e.g. a manifest)."""

    try:
        return SweepConfig(
            n_neurons=int(echo["n_neurons"]),
            runs=int(echo["runs"]),
            seed=int(echo["seed"]),
            variants=tuple(parse_variant(v) for v in echo["variants"]),
            betas=tuple(float(b) for b in echo["betas"]),
            encoding=scheme_from_dict(echo["encoding"]),
            theta=float(echo["theta"]),
            refractory_times=tuple(int(t) for t in echo["refractory_times"]),
            horizon=int(echo["horizon"]),
            include_self=bool(echo["include_self"]),
            workers=int(workers),
        )
    except (KeyError, TypeError) as e:
        raise ValueError(f"config echo is incomplete: {e}") from e


DEFAULT_SEARCH_BETA = 0.5

SEARCH_TIMES: Tuple[Tuple[int, int], ...] = ((0, 1), (0, 2), (1, 6))

SEARCH_AMPLITUDES: Tuple[Tuple[float, float], ...] = (
    (0.0, 1.0),
    (-1.0, 1.0),
    (-1.0, 2.0),
    (-1.2, 1.7),
    (1.0, 2.0),
)

SEARCH_REFS: Tuple[Tuple[Tuple[int, float], ...], ...] = (
    (),
    ((3, 0.5),),
    ((0, 0.8), (7, 1.5)),
    ((4, 1.0), (6, 1.0)),
)


def _search_variant(
    amp0: float, refs: Tuple[Tuple[int, float], ...]
) -> Optional[EncodingVariant]:
    if not refs:
        return EncodingVariant.A if amp0 == 0 else EncodingVariant.B
    if len(refs) == 1:
        return EncodingVariant.A_PRIME if amp0 == 0 else None
    if len(refs) == 2 and amp0 != 0:
        return EncodingVariant.C
    return None


def candidate_schemes() -> List[EncodingScheme]:
    """Every valid scheme on the search grid, in grid order.

    The encoding variant follows from the amplitudes and the number of
    reference spikes; combinations no variant admits are skipped.
    """

    out: List[EncodingScheme] = []
    for times in SEARCH_TIMES:
        for amp0, amp1 in SEARCH_AMPLITUDES:
            for refs in SEARCH_REFS:
                variant = _search_variant(amp0, refs)
                if variant is None:
                    continue
                scheme = EncodingScheme(variant, times, amp0, amp1, refs)
                if not validate_scheme(scheme):
                    out.append(scheme)
    return out


@dataclass(frozen=True)
class EncodingCandidate:
    scheme: EncodingScheme
    probabilities: Tuple[float, ...]
    distance: Optional[float] = None

    @property
    def coverage(self) -> int:
        """Gates with at least one solvable draw."""

        return sum(1 for p in self.probabilities if p > 0.0)


@dataclass(frozen=True)
class EncodingSearchResult:
    variant: NeuronVariant
    beta: float
    config: SweepConfig
    candidates: Tuple[EncodingCandidate, ...]

    @property
    def best(self) -> EncodingCandidate:
        return self.candidates[0]


def _reference_distance(
    target: EncodingVariant, variant: NeuronVariant, beta: float, probabilities: Sequence[float]
) -> Optional[float]:
    if not has_reference(target, beta):
        return None
    diffs: List[float] = []
    for gate_id, observed in enumerate(probabilities):
        ref = reference_probability(target, variant, beta, gate_id)
        if ref is None:
            return None
        diffs.append(abs(observed - ref))
    return float(np.mean(diffs))


def search_encoding(
    config: SweepConfig,
    *,
    variant: NeuronVariant = NeuronVariant.PRM,
    beta: float = DEFAULT_SEARCH_BETA,
    target: EncodingVariant = EncodingVariant.B,
    candidates: Optional[Sequence[EncodingScheme]] = None,
    verdict_fn: Optional[VerdictFn] = None,
) -> EncodingSearchResult:
    """Sweep one (variant, beta) column under each candidate encoding and rank them.

    Candidates are ranked by gate coverage (more is better), then by the
    mean absolute distance of their solvability column from the published
    `target` column (smaller is better), then by grid order. `config`
    supplies runs, seed, reservoir size and workers; its own variants,
    betas and encoding are replaced.
    """

    schemes = list(candidates) if candidates is not None else candidate_schemes()
    if not schemes:
        raise ValueError("encoding search needs at least one candidate scheme")

    beta = float(beta)
    gates = all_gates()
    scored: List[Tuple[int, EncodingCandidate]] = []
    for index, scheme in enumerate(schemes):
        column = replace(config, variants=(variant,), betas=(beta,), encoding=scheme)
        report = run_sweep(column, verdict_fn)
        probabilities = tuple(report.cell(g.id, variant, beta).probability_pct for g in gates)
        candidate = EncodingCandidate(
            scheme, probabilities, _reference_distance(target, variant, beta, probabilities)
        )
        _LOGGER.info(
            "Candidate %d/%d %s: coverage %d, distance %s",
            index + 1,
            len(schemes),
            scheme.to_dict(),
            candidate.coverage,
            format_statistic(candidate.distance, 2),
        )
        scored.append((index, candidate))

    def rank(item: Tuple[int, EncodingCandidate]) -> Tuple[int, float, int]:
        index, candidate = item
        distance = candidate.distance if candidate.distance is not None else math.inf
        return (-candidate.coverage, distance, index)

    ranked = tuple(c for _, c in sorted(scored, key=rank))
    _LOGGER.info(
        "Best encoding %s covers %d gates", ranked[0].scheme.to_dict(), ranked[0].coverage
    )
    return EncodingSearchResult(variant, beta, config, ranked)
