"""Report artifacts for sweeps: CSV tables, Markdown, gnuplot data, manifest.

Every table file starts with `#` comment lines echoing the sweep config and
base seed. Apart from `manifest.json` (timestamp, run id) the output is a
pure function of the report, so equal configs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

try:
    from .config_manager import atomic_write_text
    from .lif_neuron import NeuronVariant
    from .sweep import (
        EncodingSearchResult,
        L1Comparison,
        ReferenceComparison,
        SparsityComparison,
        SweepCell,
        SweepReport,
        format_statistic,
        refractory_values,
    )
except ImportError:
    from config_manager import atomic_write_text  # type: ignore[no-redef]
    from lif_neuron import NeuronVariant  # type: ignore[no-redef]
    from sweep import (  # type: ignore[no-redef]
        EncodingSearchResult,
        L1Comparison,
        ReferenceComparison,
        SparsityComparison,
        SweepCell,
        SweepReport,
        format_statistic,
        refractory_values,
    )


_LOGGER = logging.getLogger(__name__)

TOOL_VERSION = "0.1.0"

OUT_DIR_ENV = "LIF_GATES_OUT_DIR"

PROBABILITY_CSV = "probability.csv"
L1_MEAN_CSV = "l1_mean.csv"
L1_STD_CSV = "l1_std.csv"
REFERENCE_CSV = "reference.csv"
REFERENCE_L1_CSV = "reference_l1.csv"
BOUNDARY_CSV = "boundary.csv"
CERTIFICATES_CSV = "certificates.csv"
ENCODING_SEARCH_CSV = "encoding_search.csv"
BEST_ENCODING_JSON = "best_encoding.json"
TABLES_MD = "tables.md"
MANIFEST_JSON = "manifest.json"


def resolve_out_dir(cli_value: Optional[str], config_value: str) -> Path:
    """`--out` wins, then the environment override, then the config value."""

    if isinstance(cli_value, str) and cli_value.strip():
        return Path(cli_value).expanduser()
    override = os.environ.get(OUT_DIR_ENV)
    if isinstance(override, str) and override.strip():
        return Path(override).expanduser()
    return Path(config_value or "reports").expanduser()


@dataclass
class RunManifest:
    command: str
    config: Dict[str, Any]
    seed: int
    artifacts: List[str] = field(default_factory=list)
    tool_version: str = TOOL_VERSION
    timestamp: str = ""
    run_id: str = ""


def _new_run_id() -> str:
    return str(uuid.uuid4())


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def manifest_to_dict(manifest: RunManifest) -> Dict[str, Any]:
    return {
        "command": manifest.command,
        "config": manifest.config,
        "seed": int(manifest.seed),
        "artifacts": list(manifest.artifacts),
        "tool_version": manifest.tool_version,
        "timestamp": manifest.timestamp,
        "run_id": manifest.run_id,
    }


def load_manifest(path: Union[str, Path]) -> RunManifest:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(payload, dict):
        raise ValueError(f"manifest {path} is not a JSON object")
    config = payload.get("config")
    seed = payload.get("seed")
    if not isinstance(config, dict) or not isinstance(seed, int):
        raise ValueError(f"manifest {path} lacks a config echo or seed")
    artifacts = payload.get("artifacts", [])
    if not isinstance(artifacts, list):
        artifacts = []
    return RunManifest(
        command=str(payload.get("command", "")),
        config=config,
        seed=seed,
        artifacts=[str(a) for a in artifacts],
        tool_version=str(payload.get("tool_version", "")),
        timestamp=str(payload.get("timestamp", "")),
        run_id=str(payload.get("run_id", "")),
    )


def header_lines(report: SweepReport) -> List[str]:
    echo = json.dumps(report.config.echo(), sort_keys=True, separators=(",", ":"))
    return [f"# config: {echo}", f"# seed: {int(report.config.seed)}"]


def _pct(value: float) -> str:
    return f"{value:.4f}"


def _csv_text(report: SweepReport, header: Sequence[str], rows: List[List[str]]) -> str:
    buf = io.StringIO()
    for line in header_lines(report):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(header))
    writer.writerows(rows)
    return buf.getvalue()


def _value_csv(report: SweepReport, value: Callable[[SweepCell], str]) -> str:
    rows = [
        [str(c.gate), str(c.variant), repr(c.beta), str(c.t_r), value(c)]
        for c in report.cells
    ]
    return _csv_text(report, ["gate", "variant", "beta", "t_r", "value"], rows)


def probability_csv(report: SweepReport) -> str:
    return _value_csv(report, lambda c: _pct(c.probability_pct))


def l1_mean_csv(report: SweepReport) -> str:
    return _value_csv(report, lambda c: format_statistic(c.l1_mean, 4))


def l1_std_csv(report: SweepReport) -> str:
    return _value_csv(report, lambda c: format_statistic(c.l1_std, 4))


def boundary_csv(report: SweepReport) -> str:
    return _value_csv(report, lambda c: str(c.boundary_count))


def certificates_csv(report: SweepReport) -> str:
    return _value_csv(report, lambda c: str(c.certificate_violations))


def reference_l1_csv(report: SweepReport, comparisons: Sequence[L1Comparison]) -> str:
    rows = [
        [
            str(r.gate),
            str(r.variant),
            repr(r.beta),
            str(r.t_r),
            format_statistic(r.observed_mean, 4),
            format_statistic(r.reference_mean, 1),
            format_statistic(r.observed_std, 4),
            format_statistic(r.reference_std, 1),
            "agree" if r.computable_agrees else "disagree",
        ]
        for r in comparisons
    ]
    return _csv_text(
        report,
        [
            "gate",
            "variant",
            "beta",
            "t_r",
            "observed_mean",
            "reference_mean",
            "observed_std",
            "reference_std",
            "computable",
        ],
        rows,
    )


def reference_csv(report: SweepReport, comparisons: Sequence[ReferenceComparison]) -> str:
    rows = [
        [
            str(r.gate),
            str(r.variant),
            repr(r.beta),
            str(r.t_r),
            _pct(r.observed_pct),
            _pct(r.reference_pct),
            _pct(r.delta),
            "agree" if r.zero_agrees else "disagree",
        ]
        for r in comparisons
    ]
    return _csv_text(
        report,
        ["gate", "variant", "beta", "t_r", "observed", "reference", "delta", "zero_pattern"],
        rows,
    )


def _column_label(report: SweepReport, variant: NeuronVariant, t_r: int) -> str:
    if len(refractory_values(report.config, variant)) > 1:
        return f"{variant}(t_r={t_r})"
    return str(variant)


def _grid(
    report: SweepReport, beta: float, value: Callable[[SweepCell], str]
) -> List[List[str]]:
    columns = report.column_keys()
    gates = sorted({c.gate for c in report.cells})
    rows: List[List[str]] = []
    for gate in gates:
        row = [str(gate)]
        for variant, t_r in columns:
            row.append(value(report.cell(gate, variant, beta, t_r)))
        rows.append(row)
    return rows


def _markdown_table(header: List[str], rows: List[List[str]]) -> List[str]:
    lines = ["| " + " | ".join(header) + " |"]
    lines.append("|" + "|".join(["---"] + ["---:"] * (len(header) - 1)) + "|")
    for row in rows:
        lines.append("| " + " | ".join(row) + " |")
    return lines


_SECTIONS: List[Tuple[str, Callable[[SweepCell], str]]] = [
    ("Solvability probability (%)", lambda c: f"{c.probability_pct:.1f}"),
    ("Mean l1-norm of output spike trains", lambda c: format_statistic(c.l1_mean)),
    ("Standard deviation of l1-norm", lambda c: format_statistic(c.l1_std)),
    ("Boundary verdicts (count)", lambda c: str(c.boundary_count)),
    ("Certificate violations (count)", lambda c: str(c.certificate_violations)),
]


def render_probability_table(report: SweepReport) -> str:
    """Markdown probability grid (gates x variants), one table per beta."""

    header = ["Gate"] + [_column_label(report, v, t) for v, t in report.column_keys()]
    lines: List[str] = []
    for beta in report.config.betas:
        lines.append(f"beta = {float(beta)!r}")
        lines.extend(_markdown_table(header, _grid(report, float(beta), _SECTIONS[0][1])))
        lines.append("")
    return "\n".join(lines)


def markdown_report(
    report: SweepReport,
    comparisons: Optional[Sequence[ReferenceComparison]] = None,
    l1_comparisons: Optional[Sequence[L1Comparison]] = None,
    sparsity: Optional[Sequence[SparsityComparison]] = None,
) -> str:
    enc = report.config.encoding.variant
    header = ["Gate"] + [_column_label(report, v, t) for v, t in report.column_keys()]
    lines: List[str] = [f"# Sweep report, encoding {enc}", ""]
    lines.extend(f"<!-- {h[2:]} -->" for h in header_lines(report))
    lines.append("")
    lines.append(
        f"N = {report.config.n_neurons}, theta = {report.config.theta!r}, "
        f"runs = {report.config.runs}; '-' means not computable (no solvable run)."
    )
    lines.append("")

    for title, value in _SECTIONS:
        for beta in report.config.betas:
            lines.append(f"## {title}, beta = {float(beta)!r}")
            lines.append("")
            lines.extend(_markdown_table(header, _grid(report, float(beta), value)))
            lines.append("")

    invalid = report.invalid_cells()
    if invalid:
        lines.append("## Invalid cells (more than 1% failed runs)")
        lines.append("")
        for c in invalid:
            lines.append(
                f"- gate {c.gate}, {c.variant}, beta {c.beta!r}, t_r {c.t_r}: "
                f"{c.failures} failures"
            )
        lines.append("")

    if comparisons:
        disagree = [r for r in comparisons if not r.zero_agrees]
        lines.append("## Agreement with published solvability")
        lines.append("")
        lines.append(
            f"{len(comparisons) - len(disagree)} of {len(comparisons)} cells agree on "
            "zero versus nonzero solvability."
        )
        for r in disagree:
            lines.append(
                f"- gate {r.gate}, {r.variant}, beta {r.beta!r}: observed "
                f"{r.observed_pct:.1f}, published {r.reference_pct:.1f}"
            )
        lines.append("")

    violations = sum(c.certificate_violations for c in report.cells)
    if violations:
        lines.append(f"**{violations} separability certificates failed re-verification.**")
        lines.append("")

    if l1_comparisons:
        disagree_l1 = [r for r in l1_comparisons if not r.computable_agrees]
        lines.append("## Agreement with published l1 statistics")
        lines.append("")
        lines.append(
            f"{len(l1_comparisons) - len(disagree_l1)} of {len(l1_comparisons)} cells agree "
            "on whether the l1 mean is computable."
        )
        lines.append("")
        lines.extend(
            _markdown_table(
                ["Gate", "Variant", "beta", "mean", "published mean", "std", "published std"],
                [
                    [
                        str(r.gate),
                        _column_label(report, r.variant, r.t_r),
                        repr(r.beta),
                        format_statistic(r.observed_mean),
                        format_statistic(r.reference_mean),
                        format_statistic(r.observed_std),
                        format_statistic(r.reference_std),
                    ]
                    for r in l1_comparisons
                ],
            )
        )
        lines.append("")

    if sparsity:
        lines.append("## Sparsity of reset-to-mod solutions")
        lines.append("")
        for s in sparsity:
            verdict = "a majority" if s.majority else "no majority"
            gates = ", ".join(str(g) for g in s.sparser_gates) or "none"
            lines.append(
                f"- beta {s.beta!r}: {s.sparse} mean l1 <= {s.dense} on "
                f"{len(s.sparser_gates)} of {len(s.compared_gates)} comparable gates "
                f"({verdict}; gates {gates})"
            )
        lines.append("")

    return "\n".join(lines)


def gnuplot_dat(
    report: SweepReport, beta: float, value: Callable[[SweepCell], Optional[float]]
) -> str:
    """Whitespace table with one row per gate; missing values are NaN."""

    columns = report.column_keys()
    out = header_lines(report)
    out.append(f"# beta: {float(beta)!r}")
    out.append("# gate " + " ".join(_column_label(report, v, t) for v, t in columns))
    for gate in sorted({c.gate for c in report.cells}):
        cells = [report.cell(gate, v, beta, t) for v, t in columns]
        values = [value(c) for c in cells]
        out.append(
            str(gate) + " " + " ".join("NaN" if x is None else f"{x:.4f}" for x in values)
        )
    return "\n".join(out) + "\n"


def _beta_tag(beta: float) -> str:
    return repr(float(beta)).replace(".", "p")


def write_sweep_reports(
    report: SweepReport,
    out_dir: Union[str, Path],
    *,
    command: str = "sweep",
    resolved_config: Optional[Dict[str, Any]] = None,
    comparisons: Optional[Sequence[ReferenceComparison]] = None,
    l1_comparisons: Optional[Sequence[L1Comparison]] = None,
    sparsity: Optional[Sequence[SparsityComparison]] = None,
) -> RunManifest:
    """Write all artifacts into `out_dir` and return the manifest."""

    base = Path(out_dir)
    files: Dict[str, str] = {
        PROBABILITY_CSV: probability_csv(report),
        L1_MEAN_CSV: l1_mean_csv(report),
        L1_STD_CSV: l1_std_csv(report),
        BOUNDARY_CSV: boundary_csv(report),
        CERTIFICATES_CSV: certificates_csv(report),
        TABLES_MD: markdown_report(report, comparisons, l1_comparisons, sparsity),
    }
    if comparisons:
        files[REFERENCE_CSV] = reference_csv(report, comparisons)
    if l1_comparisons:
        files[REFERENCE_L1_CSV] = reference_l1_csv(report, l1_comparisons)

    dat_values: Dict[str, Callable[[SweepCell], Optional[float]]] = {
        "probability": lambda c: c.probability_pct,
        "l1_mean": lambda c: c.l1_mean,
        "l1_std": lambda c: c.l1_std,
        "boundary": lambda c: float(c.boundary_count),
        "certificate_violations": lambda c: float(c.certificate_violations),
    }
    for stem, value in dat_values.items():
        for beta in report.config.betas:
            files[f"{stem}_beta{_beta_tag(beta)}.dat"] = gnuplot_dat(report, float(beta), value)

    for name, text in files.items():
        atomic_write_text(base / name, text)

    config_echo: Dict[str, Any] = dict(report.config.echo())
    if resolved_config is not None:
        config_echo["resolved"] = resolved_config

    manifest = RunManifest(
        command=command,
        config=config_echo,
        seed=int(report.config.seed),
        artifacts=sorted(files),
        timestamp=_utc_now(),
        run_id=_new_run_id(),
    )
    atomic_write_text(
        base / MANIFEST_JSON,
        json.dumps(manifest_to_dict(manifest), indent=2, sort_keys=True) + "\n",
    )
    _LOGGER.info("Wrote %d report files to %s", len(files) + 1, str(base))
    return manifest


def search_echo(result: EncodingSearchResult) -> Dict[str, Any]:
    echo = {
        k: v
        for k, v in result.config.echo().items()
        if k not in ("variants", "betas", "encoding")
    }
    echo["variant"] = str(result.variant)
    echo["beta"] = float(result.beta)
    return echo


def encoding_search_csv(result: EncodingSearchResult) -> str:
    """One row per candidate, best first; refs use the `--refs` train syntax."""

    buf = io.StringIO()
    echo = json.dumps(search_echo(result), sort_keys=True, separators=(",", ":"))
    buf.write(f"# search: {echo}\n")
    buf.write(f"# seed: {int(result.config.seed)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    gate_columns = [f"gate{g}" for g in range(len(result.best.probabilities))]
    writer.writerow(
        ["rank", "encoding", "times", "amp0", "amp1", "refs", "coverage", "distance"]
        + gate_columns
    )
    for rank, candidate in enumerate(result.candidates, start=1):
        scheme = candidate.scheme
        writer.writerow(
            [
                str(rank),
                str(scheme.variant.value),
                " ".join(str(t) for t in scheme.spike_times),
                repr(float(scheme.amp_for_zero)),
                repr(float(scheme.amp_for_one)),
                ",".join(f"{t}:{float(a)!r}" for t, a in scheme.reference_spikes),
                str(candidate.coverage),
                format_statistic(candidate.distance, 4),
            ]
            + [_pct(p) for p in candidate.probabilities]
        )
    return buf.getvalue()


def write_search_reports(
    result: EncodingSearchResult,
    out_dir: Union[str, Path],
    *,
    resolved_config: Optional[Dict[str, Any]] = None,
    extra_artifacts: Sequence[str] = (),
) -> RunManifest:
    """Write the ranked candidates and a manifest.

    `extra_artifacts` names files the caller already wrote into `out_dir`.
    """

    base = Path(out_dir)
    atomic_write_text(base / ENCODING_SEARCH_CSV, encoding_search_csv(result))

    config_echo = search_echo(result)
    if resolved_config is not None:
        config_echo["resolved"] = resolved_config

    manifest = RunManifest(
        command="search-encoding",
        config=config_echo,
        seed=int(result.config.seed),
        artifacts=sorted([ENCODING_SEARCH_CSV, *extra_artifacts]),
        timestamp=_utc_now(),
        run_id=_new_run_id(),
    )
    atomic_write_text(
        base / MANIFEST_JSON,
        json.dumps(manifest_to_dict(manifest), indent=2, sort_keys=True) + "\n",
    )
    _LOGGER.info("Wrote encoding search results to %s", str(base))
    return manifest
