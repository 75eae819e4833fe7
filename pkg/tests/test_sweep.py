import numpy as np
import pytest

import sweep
from encoding import EncodingVariant, all_gates, all_patterns, default_scheme, validate_scheme
from lif_neuron import NeuronVariant
from reference_tables import reference_l1_mean, reference_l1_std, reference_probability
from reservoir import SimulationError
from separability import FeatureVector, LPSolveError, SeparabilityVerdict
from sweep import (
    NOT_COMPUTABLE,
    EncodingCandidate,
    SweepCell,
    SweepConfig,
    SweepReport,
    candidate_schemes,
    compare_l1_to_reference,
    compare_to_reference,
    derive_run_seeds,
    format_statistic,
    instance_for_gate,
    l1_statistics,
    refractory_values,
    run_sweep,
    search_encoding,
    sparsity_summary,
    sweep_config_from_echo,
    validate_sweep_config,
)

V = NeuronVariant


def _always(instance):
    return SeparabilityVerdict(True)


def _never(instance):
    return SeparabilityVerdict(False)


def _on_the_boundary(instance):
    return SeparabilityVerdict(True, boundary=True)


def _fails_on_pairs(instance):
    # Gates 4, 5 and 6 split the patterns two against two.
    if len(instance.class_a) == 2 and len(instance.class_b) == 2:
        raise LPSolveError("stubbed failure")
    return SeparabilityVerdict(True)


class _CoinVerdict:
    """Synthetic verdict: separable with probability `p`, seeded."""

    def __init__(self, seed, p=0.5):
        self._rng = np.random.default_rng(seed)
        self._p = p

    def __call__(self, instance):
        return SeparabilityVerdict(bool(self._rng.random() < self._p))


def _small(**overrides):
    params = dict(runs=4, seed=11, variants=(V.PRM, V.SRS), betas=(1.0, 0.5))
    params.update(overrides)
    return SweepConfig(**params)


@pytest.mark.parametrize(
    "samples,expected",
    [([3.0, 5.0], (4.0, 1.0)), ([7.0], (7.0, 0.0))],
)
def test_l1_statistics_examples(samples, expected):
    assert l1_statistics(samples) == expected


def test_l1_statistics_empty_is_not_computable():
    assert l1_statistics([]) is None
    assert format_statistic(None) == NOT_COMPUTABLE
    assert format_statistic(2.25, 1) == "2.2"


@pytest.mark.parametrize(
    "runs,failures,invalid",
    [(100, 0, False), (99, 1, False), (98, 2, True), (0, 0, True), (0, 5, True)],
)
def test_invalid_flag(runs, failures, invalid):
    cell = SweepCell(0, V.PRM, 1.0, 0, solvable_count=0, runs=runs, failures=failures)
    assert cell.invalid is invalid


def test_probability_pct():
    assert SweepCell(0, V.PRM, 1.0, 0, solvable_count=3, runs=4).probability_pct == 75.0
    assert SweepCell(0, V.PRM, 1.0, 0, solvable_count=0, runs=0).probability_pct == 0.0


def test_run_seeds_are_deterministic_and_prefix_stable():
    seeds = derive_run_seeds(5, 10)
    assert seeds == derive_run_seeds(5, 10)
    assert len(set(seeds)) == 10
    assert derive_run_seeds(5, 4) == seeds[:4]
    assert derive_run_seeds(6, 4) != seeds[:4]


def test_refractory_values_only_for_subtraction():
    config = _small(refractory_times=(0, 2))
    assert refractory_values(config, V.PRS) == (0, 2)
    assert refractory_values(config, V.PRM) == (0,)
    assert refractory_values(config, V.SRZ) == (0,)


def test_validate_sweep_config_messages():
    config = SweepConfig(runs=0, betas=(1.5,), horizon=1, workers=0)
    errors = validate_sweep_config(config)
    assert "runs must be >= 1." in errors
    assert "beta 1.5 is outside (0, 1]." in errors
    assert "workers must be >= 1." in errors
    assert any(e.startswith("horizon 1 must exceed") for e in errors)
    assert validate_sweep_config(SweepConfig()) == []
    with pytest.raises(ValueError):
        run_sweep(config)


def test_instance_for_gate_partitions_vectors():
    vectors = {p: FeatureVector((float(p.b1), float(p.b2))) for p in all_patterns()}
    inst = instance_for_gate(all_gates()[6], vectors)
    assert sorted(v.v for v in inst.class_a) == [(0.0, 0.0), (1.0, 1.0)]
    assert len(inst.class_b) == 2


def test_report_grid_is_complete():
    config = _small(refractory_times=(0, 2))
    report = run_sweep(config)
    assert report.column_keys() == [(V.PRM, 0), (V.SRS, 0), (V.SRS, 2)]
    assert len(report.cells) == 7 * 3 * 2
    assert len(report.run_seeds) == config.runs
    for c in report.cells:
        assert 0 <= c.solvable_count <= c.runs
        assert 0.0 <= c.probability_pct <= 100.0
        assert (c.l1_mean is None) == (c.solvable_count == 0)
        assert c.certificate_violations == 0
        assert c.failures == 0
    with pytest.raises(KeyError):
        report.cell(0, V.PRZ, 1.0)


@pytest.mark.parametrize("gate", range(7))
def test_single_run_is_all_or_nothing(gate):
    report = run_sweep(_small(runs=1))
    for beta in (1.0, 0.5):
        assert report.cell(gate, V.PRM, beta).probability_pct in (0.0, 100.0)


def test_stubbed_verdicts_drive_counts_and_statistics():
    yes = run_sweep(_small(), verdict_fn=_always)
    assert all(c.solvable_count == c.runs == 4 for c in yes.cells)
    assert all(c.l1_mean is not None and c.l1_std >= 0.0 for c in yes.cells)
    no = run_sweep(_small(), verdict_fn=_never)
    assert all(c.probability_pct == 0.0 for c in no.cells)
    assert all(c.l1_mean is None and c.l1_std is None for c in no.cells)


def test_lp_failures_are_counted_and_flag_the_cell():
    report = run_sweep(_small(), verdict_fn=_fails_on_pairs)
    xor = report.cell(6, V.PRM, 1.0)
    assert xor.failures == 4 and xor.runs == 0 and xor.invalid
    assert not report.cell(0, V.PRM, 1.0).invalid
    assert {c.gate for c in report.invalid_cells()} == {4, 5, 6}
    assert len(report.invalid_cells()) == 3 * 2 * 2


def test_simulation_failures_fail_the_whole_group(monkeypatch):
    def explode(config, train):
        raise SimulationError("boom", neuron=0, tick=0)

    monkeypatch.setattr(sweep, "simulate", explode)
    report = run_sweep(_small(runs=2, variants=(V.PRM,), betas=(1.0,)))
    assert all(c.failures == 2 and c.invalid for c in report.cells)


def test_same_config_gives_identical_report():
    a = run_sweep(_small())
    b = run_sweep(_small())
    assert a == b


def test_worker_count_does_not_change_results():
    serial = run_sweep(_small(runs=6, refractory_times=(0, 1)))
    pooled = run_sweep(_small(runs=6, refractory_times=(0, 1), workers=2))
    assert serial.cells == pooled.cells
    assert serial.run_seeds == pooled.run_seeds
    assert serial.config.echo() == pooled.config.echo()


def test_encoding_c_sweep_runs():
    report = run_sweep(_small(runs=2, encoding=default_scheme("C"), horizon=12))
    assert report.config.encoding.variant == EncodingVariant.C
    assert len(report.cells) == 7 * 2 * 2


def test_reference_comparison_covers_published_cells():
    config = _small(runs=3, variants=(V.SRZ, V.PRZ, V.PRM))
    report = run_sweep(config)
    comparisons = compare_to_reference(report)
    assert len(comparisons) == 7 * 3 * 2
    for r in comparisons:
        if r.variant in (V.SRZ, V.PRZ):
            assert r.reference_pct == 0.0
            assert r.zero_agrees == (r.observed_pct == 0.0)
        assert r.delta == pytest.approx(r.observed_pct - r.reference_pct)


def test_reference_comparison_is_empty_without_published_table():
    report = run_sweep(_small(runs=1, encoding=default_scheme("A"), betas=(1.0,)))
    assert compare_to_reference(report) == []


def test_config_echo_round_trips():
    config = _small(refractory_times=(0, 3), include_self=False)
    assert sweep_config_from_echo(config.echo()) == config
    assert "workers" not in config.echo()
    with pytest.raises(ValueError):
        sweep_config_from_echo({"runs": 3})


@pytest.mark.slow
def test_synthetic_half_probability_stays_in_band():
    in_band = 0
    for seed in range(100):
        config = SweepConfig(runs=200, seed=seed, variants=(V.PRM,), betas=(1.0,))
        report = run_sweep(config, verdict_fn=_CoinVerdict(seed))
        freq = report.cell(0, V.PRM, 1.0).solvable_count / 200
        in_band += int(0.39 <= freq <= 0.61)
    assert in_band >= 99


@pytest.mark.slow
def test_default_sweep_certificates_all_verify():
    report = run_sweep(SweepConfig())
    assert len(report.cells) == 7 * 6 * 2
    assert sum(c.certificate_violations for c in report.cells) == 0
    assert report.invalid_cells() == []
    assert len(compare_to_reference(report)) == len(report.cells)


def test_boundary_verdicts_are_counted():
    report = run_sweep(_small(), verdict_fn=_on_the_boundary)
    assert all(c.boundary_count == c.runs == 4 for c in report.cells)
    assert all(c.certificate_violations == 0 for c in report.cells)


def test_rejected_certificates_are_counted(monkeypatch):
    monkeypatch.setattr(sweep, "_certificate_ok", lambda instance, verdict: False)
    report = run_sweep(_small(runs=2, variants=(V.PRM,), betas=(1.0,)))
    assert all(c.certificate_violations == 2 for c in report.cells)


def test_published_l1_tables():
    assert reference_l1_mean(EncodingVariant.B, V.PRM, 0.5, 5) == 8.8
    assert reference_l1_std(EncodingVariant.B, V.SRM, 1.0, 1) == 47.9
    assert reference_l1_mean(EncodingVariant.B, V.SRS, 0.5, 1) is None
    assert reference_l1_mean(EncodingVariant.B, V.PRZ, 1.0, 0) is None
    assert reference_l1_mean(EncodingVariant.C, V.PRZ, 1.0, 5) == 190.0
    assert reference_l1_std(EncodingVariant.C, V.PRM, 0.5, 2) is None
    assert reference_l1_mean(EncodingVariant.A, V.PRM, 1.0, 0) is None
    assert reference_l1_mean(EncodingVariant.C, V.PRM, 0.7, 0) is None


def test_published_l1_is_missing_exactly_where_nothing_was_solvable():
    for encoding in (EncodingVariant.B, EncodingVariant.C):
        for variant in V:
            for beta in (1.0, 0.5):
                for gate in range(7):
                    pct = reference_probability(encoding, variant, beta, gate)
                    mean = reference_l1_mean(encoding, variant, beta, gate)
                    assert (mean is None) == (pct == 0.0)


def test_l1_comparison_pairs_cells_with_published_statistics():
    report = run_sweep(_small(runs=3, variants=(V.SRZ, V.PRM)))
    comparisons = compare_l1_to_reference(report)
    assert len(comparisons) == len(report.cells)
    for r in comparisons:
        cell = report.cell(r.gate, r.variant, r.beta)
        assert r.observed_mean == cell.l1_mean
        assert r.observed_std == cell.l1_std
        if r.variant == V.SRZ:
            assert r.reference_mean is None and r.mean_delta is None
            assert r.computable_agrees == (cell.l1_mean is None)
        elif r.observed_mean is not None:
            assert r.mean_delta == pytest.approx(r.observed_mean - r.reference_mean)


def test_l1_comparison_is_empty_without_published_table():
    report = run_sweep(_small(runs=1, encoding=default_scheme("A"), betas=(1.0,)))
    assert compare_l1_to_reference(report) == []


def _report_with_means(means, betas=(1.0, 0.5)):
    """Synthetic report whose l1 means come from `means(variant, beta, gate)`."""

    config = SweepConfig(runs=200, variants=(V.PRM, V.SRM), betas=betas)
    cells = []
    for variant in config.variants:
        for beta in betas:
            for gate in range(7):
                mean = means(variant, beta, gate)
                cells.append(
                    SweepCell(
                        gate,
                        variant,
                        beta,
                        0,
                        solvable_count=0 if mean is None else 10,
                        runs=200,
                        l1_mean=mean,
                        l1_std=None if mean is None else 1.0,
                    )
                )
    return SweepReport(config, tuple(cells), ())


def test_sparsity_summary_on_published_encoding_b_means():
    report = _report_with_means(
        lambda v, beta, g: reference_l1_mean(EncodingVariant.B, v, beta, g)
    )
    by_beta = {s.beta: s for s in sparsity_summary(report)}
    assert by_beta[1.0].sparser_gates == tuple(range(7))
    assert by_beta[0.5].compared_gates == tuple(range(7))
    assert by_beta[0.5].sparser_gates == (0, 1, 2, 3, 4, 6)
    assert all(s.majority for s in by_beta.values())


def test_sparsity_summary_skips_uncomputable_gates():
    def means(variant, beta, gate):
        if gate < 3:
            return None
        return 2.0 if variant == V.SRM else 5.0

    (summary,) = sparsity_summary(_report_with_means(means, betas=(0.5,)))
    assert summary.compared_gates == (3, 4, 5, 6)
    assert summary.sparser_gates == ()
    assert not summary.majority


def test_sparsity_summary_needs_both_variants():
    report = run_sweep(_small(runs=1, variants=(V.PRM,), betas=(1.0,)), verdict_fn=_always)
    assert sparsity_summary(report) == []


def test_candidate_grid_is_valid_and_distinct():
    schemes = candidate_schemes()
    assert len(schemes) == 30
    assert len(set(schemes)) == len(schemes)
    assert all(validate_scheme(s) == [] for s in schemes)
    assert {s.variant for s in schemes} == set(EncodingVariant)
    assert default_scheme("B") in schemes


_PUBLISHED_PRM_HALF = [reference_probability(EncodingVariant.B, V.PRM, 0.5, g) for g in range(7)]


def _column_runner(counts_by_scheme):
    """Replacement for `run_sweep` that returns fixed solvable counts per scheme."""

    def fake(config, verdict_fn=None):
        counts = counts_by_scheme[config.encoding]
        (variant,) = config.variants
        (beta,) = config.betas
        cells = tuple(
            SweepCell(g, variant, beta, 0, solvable_count=counts[g], runs=200) for g in range(7)
        )
        return SweepReport(config, cells, ())

    return fake


def test_search_ranks_by_coverage_then_distance(monkeypatch):
    partial = default_scheme("A")
    full_far = default_scheme("B")
    full_close = default_scheme("C")
    counts = {
        partial: [186, 0, 0, 191, 5, 5, 6],
        full_far: [200] * 7,
        full_close: [int(2 * p) for p in _PUBLISHED_PRM_HALF],
    }
    monkeypatch.setattr(sweep, "run_sweep", _column_runner(counts))
    result = search_encoding(SweepConfig(), candidates=[partial, full_far, full_close])
    assert [c.scheme for c in result.candidates] == [full_close, full_far, partial]
    assert result.best.coverage == 7
    assert result.best.distance == pytest.approx(0.0)
    assert result.candidates[2].coverage == 5
    assert result.variant == V.PRM and result.beta == 0.5


def test_search_without_published_column_keeps_grid_order_on_ties(monkeypatch):
    first, second = default_scheme("B"), default_scheme("C")
    counts = {first: [1] * 7, second: [9] * 7}
    monkeypatch.setattr(sweep, "run_sweep", _column_runner(counts))
    result = search_encoding(SweepConfig(), beta=0.7, candidates=[first, second])
    assert [c.scheme for c in result.candidates] == [first, second]
    assert all(c.distance is None for c in result.candidates)


def test_search_needs_candidates():
    with pytest.raises(ValueError):
        search_encoding(SweepConfig(), candidates=[])


def test_search_on_real_dynamics_scores_every_candidate():
    schemes = candidate_schemes()[:3]
    result = search_encoding(SweepConfig(runs=2, seed=5), candidates=schemes)
    assert sorted(map(repr, (c.scheme for c in result.candidates))) == sorted(map(repr, schemes))
    for candidate in result.candidates:
        assert len(candidate.probabilities) == 7
        assert candidate.distance is not None
    assert result.best.coverage == max(c.coverage for c in result.candidates)
    assert EncodingCandidate(default_scheme("B"), (0.0,) * 7).coverage == 0


@pytest.mark.slow
def test_found_encoding_gives_prm_a_solvable_draw_on_every_gate():
    result = search_encoding(SweepConfig())
    best = result.best.scheme
    report = run_sweep(SweepConfig(variants=(V.PRM,), betas=(0.5,), encoding=best))
    assert [report.cell(g, V.PRM, 0.5).solvable_count >= 1 for g in range(7)] == [True] * 7
    assert result.best.coverage == 7
