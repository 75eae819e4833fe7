import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lif_neuron import (
    ALL_VARIANTS,
    INITIAL_STATE,
    NeuronConfig,
    NeuronConfigError,
    NeuronInputError,
    NeuronState,
    NeuronVariant,
    ResetMechanism,
    ThresholdMode,
    neuron_config_for,
    parse_variant,
    run,
    step,
    trace,
)
from spike_core import EMPTY_TRAIN, SpikeTrain


def _cfg(variant, theta=1.0, beta=1.0, t_r=0):
    return neuron_config_for(variant, theta=theta, beta=beta, t_r=t_r)


# Hand-traced reset examples.


def test_prm_emits_graded_spike_and_keeps_residue():
    state, emitted = step(_cfg("PRM"), INITIAL_STATE, 2.3)
    assert emitted == 2.0
    assert state.u == pytest.approx(0.3, abs=1e-12)


def test_srm_negative_crossing():
    state, emitted = step(_cfg("SRM"), INITIAL_STATE, -1.4)
    assert emitted == -1.0
    assert state.u == pytest.approx(-0.4, abs=1e-12)


def test_prz_discards_residue():
    state, emitted = step(_cfg("PRZ"), INITIAL_STATE, 2.3)
    assert emitted == 1.0
    assert state.u == 0.0


def test_prs_two_tick_trace_matches_prm_total():
    cfg = _cfg("PRS", t_r=0)
    state, first = step(cfg, INITIAL_STATE, 2.3)
    assert first == 1.0
    assert state.u == pytest.approx(1.3, abs=1e-12)
    state, second = step(cfg, state, 0.0)
    assert second == 1.0
    assert state.u == pytest.approx(0.3, abs=1e-12)
    assert first + second == 2.0


def test_pure_leak_below_threshold():
    state, emitted = step(_cfg("PRM", beta=0.5), NeuronState(u=0.8), 0.0)
    assert emitted == 0.0
    assert state.u == 0.4


@pytest.mark.parametrize(
    "variant,beta,pairs,expected",
    [
        ("PRM", 1.0, [(0, 0.6), (1, 0.6)], [(1, 1.0)]),
        ("PRZ", 0.5, [(0, 0.9), (1, 0.9)], [(1, 1.0)]),
    ],
)
def test_run_examples(variant, beta, pairs, expected):
    out = run(_cfg(variant, beta=beta), SpikeTrain.from_pairs(pairs), horizon=5)
    assert out.pairs() == expected


@pytest.mark.parametrize("variant", ALL_VARIANTS)
def test_empty_input_gives_empty_output(variant):
    assert run(_cfg(variant, beta=0.5), EMPTY_TRAIN, horizon=10) == EMPTY_TRAIN


def test_refractory_blocks_firing_but_keeps_integrating():
    cfg = _cfg("PRS", t_r=2)
    records = trace(cfg, SpikeTrain.from_pairs([(0, 3.0)]), horizon=5)
    assert [r.emitted for r in records] == [1.0, 0.0, 0.0, 1.0, 0.0, 0.0]
    assert records[1].refractory and records[2].refractory
    assert records[-1].u == pytest.approx(1.0)


def test_refractory_applies_after_reset_to_zero():
    cfg = _cfg("PRZ", t_r=1)
    out = run(cfg, SpikeTrain.from_pairs([(0, 1.0), (1, 1.0), (2, 1.0)]), horizon=4)
    assert out.pairs() == [(0, 1.0), (2, 1.0)]


def test_symmetric_refractory_blocks_opposite_sign_crossing():
    cfg = _cfg("SRS", t_r=1)
    out = run(cfg, SpikeTrain.from_pairs([(0, 1.0), (1, -1.5)]), horizon=3)
    assert out.pairs() == [(0, 1.0), (2, -1.0)]


def test_by_subtraction_subtracts_once_per_tick():
    state, emitted = step(_cfg("PRS", t_r=0), INITIAL_STATE, 4.0)
    assert emitted == 1.0
    assert state.u == 3.0


def test_positive_mode_ignores_negative_potential():
    state, emitted = step(_cfg("PRM"), INITIAL_STATE, -7.0)
    assert emitted == 0.0
    assert state.u == -7.0


def test_non_finite_input_raises():
    with pytest.raises(NeuronInputError):
        step(_cfg("PRM"), INITIAL_STATE, math.inf)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"theta": 0.0},
        {"theta": -1.0},
        {"beta": 0.0},
        {"beta": 1.5},
        {"t_r": -1},
    ],
)
def test_invalid_neuron_config_rejected(kwargs):
    params = {"mode": ThresholdMode.POSITIVE, "reset": ResetMechanism.TO_ZERO}
    params.update(kwargs)
    with pytest.raises(NeuronConfigError):
        NeuronConfig(**params)


def test_reset_to_mod_requires_zero_refractory():
    with pytest.raises(NeuronConfigError):
        NeuronConfig(ThresholdMode.POSITIVE, ResetMechanism.TO_MOD, t_r=1)
    assert neuron_config_for("PRM", t_r=3).t_r == 0
    assert neuron_config_for("PRS", t_r=3).t_r == 3


@pytest.mark.parametrize("variant", ALL_VARIANTS)
def test_variant_round_trips_through_mode_and_reset(variant):
    cfg = _cfg(variant)
    assert cfg.variant == variant
    assert parse_variant(str(variant).lower()) == variant


def test_parse_variant_rejects_unknown():
    with pytest.raises(ValueError):
        parse_variant("XRM")


# Properties.

_amplitude = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False, allow_infinity=False)
_trains = st.lists(
    st.tuples(st.integers(min_value=0, max_value=19), _amplitude), max_size=20
).map(SpikeTrain.from_pairs)

_dyadic = st.integers(min_value=-40, max_value=40).filter(lambda k: k != 0).map(lambda k: k / 8.0)


@st.composite
def _spaced_trains(draw):
    """Dyadic amplitudes with gaps long enough for subtraction to drain."""

    amps = draw(st.lists(_dyadic, min_size=1, max_size=8))
    gaps = draw(st.lists(st.integers(min_value=6, max_value=9), min_size=len(amps), max_size=len(amps)))
    t = 0
    pairs = []
    for amp, gap in zip(amps, gaps):
        pairs.append((t, amp))
        t += gap
    return SpikeTrain.from_pairs(pairs)


@settings(max_examples=1000)
@given(_trains, st.sampled_from(["SRM", "PRM", "SRS", "PRS"]))
def test_charge_conservation(train, variant):
    horizon = 25
    cfg = _cfg(variant, t_r=0)
    records = trace(cfg, train, horizon)
    emitted = sum(r.emitted for r in records)
    tol = 1e-12 * (horizon + 1 + len(train)) * max(1.0, sum(abs(a) for _, a in train.pairs()))
    assert emitted + records[-1].u == pytest.approx(train.total(), abs=tol)


@given(st.lists(st.tuples(st.integers(0, 19), st.floats(0.0, 5.0)), max_size=20).map(SpikeTrain.from_pairs))
def test_reset_to_zero_dissipates(train):
    out = run(_cfg("PRZ"), train, horizon=25)
    assert out.total() <= train.total() + 1e-12


@settings(max_examples=500)
@given(_spaced_trains(), st.sampled_from([("PRM", "PRS"), ("SRM", "SRS")]))
def test_reset_to_mod_is_settled_limit_of_subtraction(train, pair):
    mod_variant, sub_variant = pair
    horizon = train.last_time() + 6
    mod = trace(_cfg(mod_variant), train, horizon)
    sub = trace(_cfg(sub_variant, t_r=0), train, horizon)
    settle_points = [t - 1 for t in train.times()[1:]] + [horizon]
    for t in settle_points:
        assert sum(r.emitted for r in mod[: t + 1]) == sum(r.emitted for r in sub[: t + 1])
        assert mod[t].u == sub[t].u


@given(_trains, st.sampled_from(["P", "S"]), st.sampled_from([0.5, 0.9]))
def test_leak_favours_reset_to_mod(train, mode, beta):
    mod_cfg = _cfg(mode + "RM", beta=beta)
    sub_cfg = _cfg(mode + "RS", beta=beta, t_r=0)
    before = INITIAL_STATE
    for rec in trace(mod_cfg, train, horizon=25):
        _, mod = step(mod_cfg, before, rec.input)
        _, sub = step(sub_cfg, before, rec.input)
        assert mod == rec.emitted
        if sub != 0.0:
            assert math.copysign(1.0, mod) == math.copysign(1.0, sub)
            assert abs(mod) >= abs(sub)
        before = NeuronState(u=rec.u)


@given(_trains, st.sampled_from(["SRM", "SRS", "SRZ"]), st.sampled_from([1.0, 0.5]), st.integers(0, 2))
def test_symmetric_variants_are_odd(train, variant, beta, t_r):
    cfg = _cfg(variant, beta=beta, t_r=t_r)
    assert run(cfg, -train, 25) == -run(cfg, train, 25)


@given(
    st.integers(min_value=1, max_value=64).map(lambda k: k / 8.0),
    st.sampled_from([1.0, 0.5, 0.25, 2.0]),
)
def test_single_input_is_quantized(amplitude, theta):
    out = run(_cfg("PRM", theta=theta), SpikeTrain.from_pairs([(0, amplitude)]), horizon=3)
    if amplitude >= theta:
        assert out.pairs() == [(0, math.floor(amplitude / theta) * theta)]
    else:
        assert out == EMPTY_TRAIN


@given(
    _trains,
    st.sampled_from(ALL_VARIANTS),
    st.sampled_from([1.0, 0.5, 0.9]),
    st.integers(min_value=0, max_value=3),
)
def test_state_invariants_hold_every_tick(train, variant, beta, t_r):
    cfg = _cfg(variant, beta=beta, t_r=t_r)
    state = INITIAL_STATE
    drive = train.as_dict()
    for t in range(26):
        blocked = state.refractory_remaining > 0
        state, emitted = step(cfg, state, drive.get(t, 0.0))
        assert 0 <= state.refractory_remaining <= cfg.t_r
        if emitted == 0.0 and not blocked:
            level = abs(state.u) if variant.mode == ThresholdMode.SYMMETRIC else state.u
            assert level < cfg.theta
        if emitted != 0.0 and variant.reset == ResetMechanism.TO_MOD:
            assert -cfg.theta < state.u < cfg.theta


def test_variant_properties():
    assert NeuronVariant.SRS.mode == ThresholdMode.SYMMETRIC
    assert NeuronVariant.PRZ.reset == ResetMechanism.TO_ZERO
    assert [str(v) for v in ALL_VARIANTS] == ["SRM", "SRS", "SRZ", "PRM", "PRS", "PRZ"]
