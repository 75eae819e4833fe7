"""Command-line entry point: `simulate`, `check`, `sweep` and `search-encoding`.

Exit codes: 0 success (or separable), 1 not separable, 2 usage/config/I-O
error, 3 sweep finished with invalid cells or failed certificates.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

try:
    from .config_manager import config_to_dict, load_config, save_config
    from .config_model import EncodingSection, ExperimentConfig, validate_experiment_config
    from .encoding import (
        EncodingScheme,
        InputPattern,
        all_patterns,
        default_scheme,
        encode,
        gate_by_id,
        scheme_from_dict,
        validate_scheme,
    )
    from .lif_neuron import NeuronConfig, neuron_config_for, parse_variant, trace
    from .reports import (
        BEST_ENCODING_JSON,
        render_probability_table,
        resolve_out_dir,
        write_search_reports,
        write_sweep_reports,
    )
    from .reservoir import (
        ReservoirConfig,
        SimulationError,
        WeightMatrix,
        load_weights_csv,
        sample_weights,
        simulate_traces,
    )
    from .separability import (
        CertificateError,
        FeatureVector,
        LPSolveError,
        describe_verdict,
        features,
        is_separable,
    )
    from .spike_core import SpikeTrain, format_train, parse_train
    from .sweep import (
        DEFAULT_SEARCH_BETA,
        SweepConfig,
        compare_l1_to_reference,
        compare_to_reference,
        format_statistic,
        instance_for_gate,
        run_sweep,
        search_encoding,
        sparsity_summary,
    )
except ImportError:
    from config_manager import config_to_dict, load_config, save_config  # type: ignore[no-redef]
    from config_model import EncodingSection, ExperimentConfig, validate_experiment_config  # type: ignore[no-redef]
    from encoding import (  # type: ignore[no-redef]
        EncodingScheme,
        InputPattern,
        all_patterns,
        default_scheme,
        encode,
        gate_by_id,
        scheme_from_dict,
        validate_scheme,
    )
    from lif_neuron import NeuronConfig, neuron_config_for, parse_variant, trace  # type: ignore[no-redef]
    from reports import (  # type: ignore[no-redef]
        BEST_ENCODING_JSON,
        render_probability_table,
        resolve_out_dir,
        write_search_reports,
        write_sweep_reports,
    )
    from reservoir import (  # type: ignore[no-redef]
        ReservoirConfig,
        SimulationError,
        WeightMatrix,
        load_weights_csv,
        sample_weights,
        simulate_traces,
    )
    from separability import (  # type: ignore[no-redef]
        CertificateError,
        FeatureVector,
        LPSolveError,
        describe_verdict,
        features,
        is_separable,
    )
    from spike_core import SpikeTrain, format_train, parse_train  # type: ignore[no-redef]
    from sweep import (  # type: ignore[no-redef]
        DEFAULT_SEARCH_BETA,
        SweepConfig,
        compare_l1_to_reference,
        compare_to_reference,
        format_statistic,
        instance_for_gate,
        run_sweep,
        search_encoding,
        sparsity_summary,
    )


_LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_SEPARABLE = 1
EXIT_ERROR = 2
EXIT_INVALID_CELLS = 3

_LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


class UsageError(Exception):
    """Bad input detected after argument parsing; maps to exit code 2."""


def _comma_list(cast: Callable[[str], Any]) -> Callable[[str], List[Any]]:
    def parse(text: str) -> List[Any]:
        items = [part.strip() for part in str(text).split(",") if part.strip()]
        if not items:
            raise argparse.ArgumentTypeError("expected a comma-separated list")
        try:
            return [cast(item) for item in items]
        except ValueError as e:
            raise argparse.ArgumentTypeError(str(e)) from e

    return parse


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _add_neuron_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--variant", help="Neuron variant (SRM/SRS/SRZ/PRM/PRS/PRZ)")
    p.add_argument("--theta", type=float, help="Firing threshold")
    p.add_argument("--beta", type=float, help="Leak factor in (0, 1]")
    p.add_argument("--t-r", dest="t_r", type=int, help="Refractory ticks")
    p.add_argument("--horizon", type=int, help="Last simulated tick")


def _add_encoding_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--encoding", help="Encoding variant (A, A', B, C)")
    p.add_argument("--refs", help="Reference spikes as a train, e.g. '4:1.0,6:1.0'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lif-gates",
        description="Logic-gate solvability of small LIF spiking reservoirs.",
    )
    parser.add_argument("--config", help="JSON config file (default: shipped config.json)")
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging verbosity",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Trace membrane potentials and output spikes")
    _add_neuron_flags(sim)
    sim.add_argument("--input", help="Input train text, e.g. '0:1.0,2:-1.0'")
    sim.add_argument("--input-file", help="File holding the input train text")
    sim.add_argument("--n", type=int, help="Reservoir size (default 1: a single neuron)")
    sim.add_argument("--weights", help="Weight matrix CSV (implies a reservoir)")
    sim.add_argument("--seed", type=int, help="Seed for sampled weights when --n > 1")

    chk = sub.add_parser("check", help="Decide separability for one gate")
    _add_neuron_flags(chk)
    _add_encoding_flags(chk)
    chk.add_argument("--gate", type=int, required=True, help="Gate id 0..6 (6 = XOR)")
    chk.add_argument("--weights", help="Weight matrix CSV")
    chk.add_argument("--n", type=int, help="Expected reservoir size")
    chk.add_argument("--features", help="JSON file of raw feature vectors per pattern")

    swp = sub.add_parser("sweep", help="Monte Carlo solvability sweep")
    _add_encoding_flags(swp)
    swp.add_argument("--n", type=int, help="Reservoir size")
    swp.add_argument("--runs", type=int, help="Weight draws per cell")
    swp.add_argument("--seed", type=int, help="Base seed")
    swp.add_argument("--theta", type=float, help="Firing threshold")
    swp.add_argument("--horizon", type=int, help="Last simulated tick")
    swp.add_argument("--variants", type=_comma_list(str), help="e.g. PRM,SRM")
    swp.add_argument("--betas", type=_comma_list(float), help="e.g. 1.0,0.5")
    swp.add_argument("--t-r", dest="t_r", type=_comma_list(int), help="Refractory ticks for *RS")
    swp.add_argument("--workers", type=int, help="Worker processes")
    swp.add_argument("--out", help="Output directory")

    srch = sub.add_parser(
        "search-encoding", help="Rank candidate encodings by gate coverage for one variant"
    )
    srch.add_argument("--variant", help="Neuron variant to score (default PRM)")
    srch.add_argument("--beta", type=float, help=f"Leak factor (default {DEFAULT_SEARCH_BETA})")
    srch.add_argument("--n", type=int, help="Reservoir size")
    srch.add_argument("--runs", type=int, help="Weight draws per candidate")
    srch.add_argument("--seed", type=int, help="Base seed")
    srch.add_argument("--theta", type=float, help="Firing threshold")
    srch.add_argument("--horizon", type=int, help="Last simulated tick")
    srch.add_argument("--workers", type=int, help="Worker processes")
    srch.add_argument("--out", help="Output directory")

    return parser


def _load_experiment(args: argparse.Namespace) -> ExperimentConfig:
    config = load_config(args.config)
    errors = validate_experiment_config(config)
    if errors:
        raise UsageError("invalid config: " + "; ".join(errors))
    return config


def _scheme(section: EncodingSection, args: argparse.Namespace) -> EncodingScheme:
    """Config encoding, or the defaults of `--encoding`, with `--refs` applied."""

    if getattr(args, "encoding", None):
        try:
            scheme = default_scheme(args.encoding)
        except ValueError as e:
            raise UsageError(f"--encoding: {e}") from e
    else:
        data: Dict[str, Any] = {"variant": section.variant, "times": list(section.times)}
        for key in ("amp0", "amp1", "refs"):
            value = getattr(section, key)
            if value is not None:
                data[key] = value
        try:
            scheme = scheme_from_dict(data)
        except ValueError as e:
            raise UsageError(f"encoding: {e}") from e

    if getattr(args, "refs", None):
        refs = parse_train(args.refs)
        scheme = replace(scheme, reference_spikes=tuple(refs.pairs()))

    errors = validate_scheme(scheme)
    if errors:
        raise UsageError("invalid encoding: " + "; ".join(errors))
    return scheme


def _neuron(config: ExperimentConfig, args: argparse.Namespace) -> NeuronConfig:
    section = config.neuron
    return neuron_config_for(
        args.variant if args.variant else section.variant,
        theta=args.theta if args.theta is not None else section.theta,
        beta=args.beta if args.beta is not None else section.beta,
        t_r=args.t_r if args.t_r is not None else section.t_r,
    )


def _read_input(args: argparse.Namespace) -> SpikeTrain:
    if args.input is not None and args.input_file is not None:
        raise UsageError("give either --input or --input-file, not both")
    if args.input_file is not None:
        text = Path(args.input_file).read_text(encoding="utf-8")
    elif args.input is not None:
        text = args.input
    else:
        raise UsageError("an input train is required (--input or --input-file)")
    return parse_train(text)


def cmd_simulate(args: argparse.Namespace, out: Callable[[str], None] = print) -> int:
    config = _load_experiment(args)
    neuron = _neuron(config, args)
    train = _read_input(args)
    horizon = args.horizon if args.horizon is not None else config.reservoir.horizon
    horizon = max(int(horizon), train.last_time())

    n = args.n if args.n is not None else 1
    if args.weights is None and n == 1:
        records = trace(neuron, train, horizon)
        out(f"neuron 0 ({neuron.variant}, theta={_fmt(neuron.theta)}, "
            f"beta={_fmt(neuron.beta)}, t_r={neuron.t_r})")
        out("tick input u emitted")
        for rec in records:
            out(f"{rec.tick} {_fmt(rec.input)} {_fmt(rec.u)} {_fmt(rec.emitted)}")
        emitted = SpikeTrain.from_pairs((r.tick, r.emitted) for r in records if r.emitted)
        out(f"spikes: {format_train(emitted) or '(none)'}")
        out(f"final u: {_fmt(records[-1].u)}")
        return EXIT_OK

    if args.weights is not None:
        weights = load_weights_csv(args.weights, expected_n=args.n)
    else:
        seed = args.seed if args.seed is not None else config.sweep.seed
        weights = sample_weights(n, seed, include_self=config.reservoir.include_self_connections)

    reservoir = ReservoirConfig(neuron, weights, horizon=max(horizon, train.last_time() + 1))
    outputs, potentials = simulate_traces(reservoir, train)
    out(f"reservoir of {weights.n} {neuron.variant} neurons, horizon {reservoir.horizon}")
    out("tick " + " ".join(f"u{k}" for k in range(weights.n)))
    for t, row in enumerate(potentials):
        out(f"{t} " + " ".join(_fmt(float(u)) for u in row))
    for k, train_k in enumerate(outputs):
        out(f"neuron {k} spikes: {format_train(train_k) or '(none)'}")
        out(f"neuron {k} final u: {_fmt(float(potentials[-1, k]))}")
    return EXIT_OK


_PATTERN_KEYS = {
    InputPattern(b1, b2): {f"{b1}{b2}", f"({b1},{b2})", f"{b1},{b2}"}
    for b1 in (0, 1)
    for b2 in (0, 1)
}


def load_feature_vectors(path: str) -> Dict[InputPattern, FeatureVector]:
    """Read per-pattern vectors from JSON.

    Accepts a list of four vectors in pattern order (00, 01, 10, 11) or an
    object keyed by "00"/"(0,0)"-style pattern names.
    """

    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    patterns = all_patterns()
    if isinstance(payload, list):
        if len(payload) != 4:
            raise UsageError(f"{path}: expected 4 feature vectors, got {len(payload)}")
        raw = dict(zip(patterns, payload))
    elif isinstance(payload, dict):
        raw = {}
        for pattern in patterns:
            keys = [k for k in payload if str(k).replace(" ", "") in _PATTERN_KEYS[pattern]]
            if not keys:
                raise UsageError(f"{path}: no feature vector for pattern {pattern}")
            raw[pattern] = payload[keys[0]]
    else:
        raise UsageError(f"{path}: expected a JSON list or object")

    try:
        return {p: FeatureVector(tuple(float(x) for x in v)) for p, v in raw.items()}
    except (TypeError, ValueError) as e:
        raise UsageError(f"{path}: bad feature vector: {e}") from e


def _reservoir_features(
    config: ExperimentConfig, args: argparse.Namespace
) -> Dict[InputPattern, FeatureVector]:
    if args.weights is None:
        raise UsageError("check needs --weights or --features")
    weights: WeightMatrix = load_weights_csv(args.weights, expected_n=args.n)
    neuron = _neuron(config, args)
    scheme = _scheme(config.encoding, args)
    horizon = args.horizon if args.horizon is not None else config.reservoir.horizon
    reservoir = ReservoirConfig(neuron, weights, horizon=int(horizon))
    vectors: Dict[InputPattern, FeatureVector] = {}
    for pattern in all_patterns():
        outputs, _ = simulate_traces(reservoir, encode(scheme, pattern))
        vectors[pattern] = features(outputs)
    return vectors


def cmd_check(args: argparse.Namespace, out: Callable[[str], None] = print) -> int:
    config = _load_experiment(args)
    try:
        gate = gate_by_id(args.gate)
    except ValueError as e:
        raise UsageError(f"--gate: {e}") from e

    if args.features is not None:
        vectors = load_feature_vectors(args.features)
    else:
        vectors = _reservoir_features(config, args)

    out(f"gate {gate.id}: class A = {gate.label()}")
    for pattern in all_patterns():
        side = "A" if pattern in gate.class_a else "B"
        coords = ", ".join(_fmt(x) for x in vectors[pattern].v)
        out(f"{pattern} [{side}] v = ({coords})")

    verdict = is_separable(instance_for_gate(gate, vectors))
    for line in describe_verdict(verdict):
        out(line)
    return EXIT_OK if verdict.separable else EXIT_NOT_SEPARABLE


def sweep_config_from_args(config: ExperimentConfig, args: argparse.Namespace) -> SweepConfig:
    s = config.sweep
    try:
        variants = tuple(parse_variant(v) for v in (args.variants or s.variants))
    except ValueError as e:
        raise UsageError(f"--variants: {e}") from e
    return SweepConfig(
        n_neurons=args.n if args.n is not None else config.reservoir.n_neurons,
        runs=args.runs if args.runs is not None else s.runs,
        seed=args.seed if args.seed is not None else s.seed,
        variants=variants,
        betas=tuple(float(b) for b in (args.betas or s.betas)),
        encoding=_scheme(config.encoding, args),
        theta=args.theta if args.theta is not None else config.neuron.theta,
        refractory_times=tuple(int(t) for t in (args.t_r or s.refractory_times)),
        horizon=args.horizon if args.horizon is not None else config.reservoir.horizon,
        include_self=config.reservoir.include_self_connections,
        workers=args.workers if args.workers is not None else s.workers,
    )


def cmd_sweep(args: argparse.Namespace, out: Callable[[str], None] = print) -> int:
    config = _load_experiment(args)
    sweep_config = sweep_config_from_args(config, args)
    try:
        report = run_sweep(sweep_config)
    except ValueError as e:
        raise UsageError(str(e)) from e

    out_dir = resolve_out_dir(args.out, config.output.out_dir)
    manifest = write_sweep_reports(
        report,
        out_dir,
        command="sweep",
        resolved_config=config_to_dict(config),
        comparisons=compare_to_reference(report),
        l1_comparisons=compare_l1_to_reference(report),
        sparsity=sparsity_summary(report),
    )

    out(render_probability_table(report))
    out(f"reports written to {out_dir} ({len(manifest.artifacts)} files + manifest)")

    code = EXIT_OK
    invalid = report.invalid_cells()
    if invalid:
        _LOGGER.warning("%d sweep cells are invalid (more than 1%% failed runs)", len(invalid))
        code = EXIT_INVALID_CELLS
    violations = sum(c.certificate_violations for c in report.cells)
    if violations:
        print(
            f"warning: {violations} separability certificates failed re-verification",
            file=sys.stderr,
        )
        code = EXIT_INVALID_CELLS
    return code


def cmd_search_encoding(args: argparse.Namespace, out: Callable[[str], None] = print) -> int:
    config = _load_experiment(args)
    try:
        variant = parse_variant(args.variant or "PRM")
    except ValueError as e:
        raise UsageError(f"--variant: {e}") from e
    beta = args.beta if args.beta is not None else DEFAULT_SEARCH_BETA
    base = SweepConfig(
        n_neurons=args.n if args.n is not None else config.reservoir.n_neurons,
        runs=args.runs if args.runs is not None else config.sweep.runs,
        seed=args.seed if args.seed is not None else config.sweep.seed,
        theta=args.theta if args.theta is not None else config.neuron.theta,
        horizon=args.horizon if args.horizon is not None else config.reservoir.horizon,
        include_self=config.reservoir.include_self_connections,
        workers=args.workers if args.workers is not None else config.sweep.workers,
    )
    try:
        result = search_encoding(base, variant=variant, beta=beta)
    except ValueError as e:
        raise UsageError(str(e)) from e

    best = result.best
    out_dir = resolve_out_dir(args.out, config.output.out_dir)
    winner = replace(config, encoding=EncodingSection(**best.scheme.to_dict()))
    save_config(winner, out_dir / BEST_ENCODING_JSON)
    write_search_reports(
        result,
        out_dir,
        resolved_config=config_to_dict(config),
        extra_artifacts=[BEST_ENCODING_JSON],
    )

    out(f"best encoding: {json.dumps(best.scheme.to_dict(), sort_keys=True)}")
    out(
        f"{variant} beta={float(beta)!r}: {best.coverage} of {len(best.probabilities)} gates "
        f"solvable at least once, distance {format_statistic(best.distance, 2)}"
    )
    out("gate probabilities: " + " ".join(f"{p:.1f}" for p in best.probabilities))
    out(f"results written to {out_dir} ({len(result.candidates)} candidates)")
    return EXIT_OK


_COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "simulate": cmd_simulate,
    "check": cmd_check,
    "sweep": cmd_sweep,
    "search-encoding": cmd_search_encoding,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)
    logging.basicConfig(level=getattr(logging, args.log_level), format=_LOG_FORMAT)

    try:
        return _COMMANDS[args.command](args)
    # Config, parse, shape and numeric errors are ValueError subclasses.
    except (UsageError, ValueError, OSError, SimulationError, LPSolveError, CertificateError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
