import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lif_neuron import neuron_config_for
from reservoir import (
    WEIGHT_GRID,
    ReservoirConfig,
    SimulationError,
    WeightMatrix,
    WeightShapeError,
    load_weights_csv,
    parse_weights_csv,
    sample_weights,
    simulate,
    simulate_traces,
    weights_to_csv,
)
from spike_core import EMPTY_TRAIN, SpikeTrain


def _reservoir(w, variant="PRM", beta=1.0, horizon=10, t_r=0):
    neuron = neuron_config_for(variant, theta=1.0, beta=beta, t_r=t_r)
    return ReservoirConfig(neuron, WeightMatrix(np.array(w, dtype=float)), horizon)


def test_single_neuron_matches_neuron_example():
    out = simulate(_reservoir([[0.0]]), SpikeTrain.from_pairs([(0, 2.3)]))
    assert [t.pairs() for t in out] == [[(0, 2.0)]]


def test_empty_input_gives_empty_outputs():
    out = simulate(_reservoir([[0.5, -0.3], [0.9, 1.0]]), EMPTY_TRAIN)
    assert out == [EMPTY_TRAIN, EMPTY_TRAIN]


def test_one_tick_synaptic_relay():
    out = simulate(_reservoir([[0.0, 1.0], [0.0, 0.0]]), SpikeTrain.from_pairs([(0, 1.0)]))
    assert out[0].pairs() == [(0, 1.0)]
    assert out[1].pairs() == [(1, 1.0)]


def test_traces_report_potentials_per_tick():
    outputs, potentials = simulate_traces(
        _reservoir([[0.0, 0.5], [0.0, 0.0]], horizon=4), SpikeTrain.from_pairs([(0, 1.5)])
    )
    assert potentials.shape == (5, 2)
    assert potentials[0, 0] == pytest.approx(0.5)
    assert potentials[1, 1] == pytest.approx(0.5)
    assert outputs[1] == EMPTY_TRAIN


def test_horizon_must_cover_input():
    with pytest.raises(ValueError):
        simulate(_reservoir([[0.0]], horizon=3), SpikeTrain.from_pairs([(3, 1.0)]))


def test_sampling_is_deterministic_and_on_grid():
    a = sample_weights(2, 7)
    b = sample_weights(2, 7)
    assert a == b
    assert a.w.shape == (2, 2)
    assert a.on_grid()
    assert sample_weights(2, 8) != a


def test_sampled_grid_is_uniform():
    w = sample_weights(100, 123).w.ravel()
    assert np.all(np.abs(w) <= 1.0)
    counts = np.array([np.sum(np.isclose(w, g)) for g in WEIGHT_GRID])
    assert counts.sum() == w.size
    assert np.all(np.abs(counts / w.size - 1.0 / 21.0) < 0.01)


def test_exclude_self_connections_zeroes_diagonal_only():
    full = sample_weights(4, 5)
    no_self = sample_weights(4, 5, include_self=False)
    assert np.all(np.diag(no_self.w) == 0.0)
    off = ~np.eye(4, dtype=bool)
    assert np.array_equal(full.w[off], no_self.w[off])


def test_weight_matrix_is_read_only_copy():
    raw = np.zeros((2, 2))
    wm = WeightMatrix(raw)
    raw[0, 0] = 1.0
    assert wm.w[0, 0] == 0.0
    with pytest.raises(ValueError):
        wm.w[0, 0] = 1.0


@pytest.mark.parametrize(
    "w",
    [np.zeros((2, 3)), np.full((2, 2), 1.5), np.array([[np.nan]]), np.zeros((0, 0))],
)
def test_weight_matrix_validation(w):
    with pytest.raises(WeightShapeError):
        WeightMatrix(w)


def test_exploding_input_is_reported_with_position():
    neuron = neuron_config_for("PRZ", theta=1.0, beta=1.0)
    config = ReservoirConfig(neuron, WeightMatrix(np.zeros((1, 1))), 2)
    with pytest.raises(SimulationError) as excinfo:
        simulate(config, SpikeTrain.from_pairs([(0, -1e308), (1, -1e308)]))
    assert excinfo.value.tick == 1
    assert excinfo.value.neuron == 0


_train = st.lists(
    st.tuples(st.integers(0, 8), st.integers(-16, 16).map(lambda k: k / 4.0)), max_size=6
).map(SpikeTrain.from_pairs)


@given(_train, st.integers(0, 10_000), st.sampled_from(["SRM", "SRS", "SRZ"]), st.sampled_from([1.0, 0.5]))
def test_symmetric_reservoir_is_odd(train, seed, variant, beta):
    config = ReservoirConfig(
        neuron_config_for(variant, beta=beta, t_r=1), sample_weights(2, seed), 12
    )
    assert simulate(config, -train) == [-t for t in simulate(config, train)]


@given(_train, st.integers(0, 10_000), st.sampled_from(["PRM", "SRS", "PRZ"]))
def test_simulation_is_causal_and_deterministic(train, seed, variant):
    config = ReservoirConfig(neuron_config_for(variant), sample_weights(3, seed), 12)
    first = simulate(config, train)
    assert first == simulate(config, train)
    if train:
        start = train.times()[0]
        assert all(t >= start for out in first for t in out.times())


@given(_train, st.integers(0, 10_000))
def test_zeroed_row_removes_neuron_influence(train, seed):
    neuron = neuron_config_for("PRM")
    w = sample_weights(3, seed)
    cut = w.with_row_zeroed(2)
    full = simulate(ReservoirConfig(neuron, cut, 12), train)
    reduced = simulate(ReservoirConfig(neuron, WeightMatrix(cut.w[:2, :2]), 12), train)
    assert full[:2] == reduced


def test_weights_csv_round_trip_and_shape_check(tmp_path):
    w = sample_weights(2, 3)
    path = tmp_path / "w.csv"
    path.write_text("# sampled\n" + weights_to_csv(w), encoding="utf-8")
    assert load_weights_csv(path, expected_n=2) == w
    with pytest.raises(WeightShapeError):
        load_weights_csv(path, expected_n=3)


def test_weights_csv_rejects_ragged_and_non_numeric():
    with pytest.raises(WeightShapeError):
        parse_weights_csv("0.1,0.2\n0.3\n")
    with pytest.raises(WeightShapeError):
        parse_weights_csv("0.1,x\n0.3,0.4\n")
