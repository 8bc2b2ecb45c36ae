import numpy as np
import pytest
from scipy.spatial.distance import cdist

from samplecurve.curvegeom import covering_test, hausdorff_distance, max_nn_gap, order_curve
from samplecurve.embedding import TrainCloud, TrainConfig, embed_times, sample_cloud
from samplecurve.errors import DimensionMismatch, OrderingFailed, TooFewTrains
from samplecurve.oracles import cyclic_agreement, order_by_hidden_times
from samplecurve.signals import FourierSpec, WarpSpec, make_example1, make_fourier, make_sine, make_warped


def brute_hausdorff(a, b):
    d = cdist(a, b)
    return max(d.min(axis=1).max(), d.min(axis=0).max())


def test_order_ellipse_matches_hidden_times():
    cloud = sample_cloud(make_sine(), TrainConfig(2, 0.2), 500, "uniform_grid", seed=0)
    order = order_curve(cloud)
    direction, backsteps = cyclic_agreement(order, cloud.hidden_times, 1.0)
    assert backsteps == 0
    by_u = np.argsort(order.positions)
    phases = np.round(cloud.hidden_times[by_u] * 500).astype(int)
    expected = (phases[0] + direction * np.arange(500)) % 500
    np.testing.assert_array_equal(phases, expected)


def test_order_rejects_tiny_cloud():
    cloud = TrainCloud(TrainConfig(2, 0.1), np.eye(3)[:, :2])
    with pytest.raises(TooFewTrains):
        order_curve(cloud)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_order_example1_d3(seed):
    cloud = sample_cloud(make_example1(), TrainConfig(3, 0.2), 2000, seed=seed)
    order = order_curve(cloud)
    _, backsteps = cyclic_agreement(order, cloud.hidden_times, 1.0)
    assert backsteps == 0
    assert 0.0 <= order.positions.min() and order.positions.max() < 1.0
    assert len(np.unique(order.positions)) == len(cloud)


def test_order_agrees_with_time_chart():
    cloud = sample_cloud(make_example1(), TrainConfig(3, 0.2), 3000, seed=8)
    est = order_curve(cloud)
    truth = order_by_hidden_times(cloud, 1.0)
    a = est.sequence
    b = truth.sequence
    start = int(np.flatnonzero(b == a[0])[0])
    b = np.roll(b, -start)
    if b[1] != a[1]:
        b = np.concatenate([b[:1], b[:0:-1]])
    np.testing.assert_array_equal(a, b)


def test_order_fails_on_self_intersection():
    # a figure-eight: the chain cannot close without a long jump, or skips a lobe
    t = np.random.default_rng(0).uniform(0, 1, 400)
    pts = np.c_[np.sin(2 * np.pi * t), np.sin(4 * np.pi * t)]
    cloud = TrainCloud(TrainConfig(2, 0.1), pts)
    assert not covering_test(cloud).is_covering
    try:
        order = order_curve(cloud)
    except OrderingFailed:
        return
    _, backsteps = cyclic_agreement(order, t, 1.0)
    assert backsteps > 0


def test_order_reversal_is_an_involution():
    cloud = sample_cloud(make_sine(), TrainConfig(2, 0.3), 300, seed=2)
    order = order_curve(cloud)
    rev = order.reversed()
    np.testing.assert_allclose(np.mod(order.positions + rev.positions + 0.5, 1.0) - 0.5, 0.0, atol=1e-15)
    back = rev.reversed()
    np.testing.assert_allclose(back.positions, order.positions, atol=1e-15)
    np.testing.assert_array_equal(back.sequence, order.sequence)


def test_covering_example1():
    s = make_example1()
    flat = sample_cloud(s, TrainConfig(2, 0.2), 4000, seed=0)
    verdict = covering_test(flat, 12, 0.3)
    assert not verdict.is_covering
    assert len(verdict.witnesses) > 0
    # witnesses sit where two far-apart parts of the curve meet
    tt = np.arange(100_000) / 100_000
    dense = embed_times(s, tt, TrainConfig(2, 0.2))
    for w in verdict.witnesses:
        t_w = flat.hidden_times[w]
        far = np.abs(((tt - t_w) + 0.5) % 1.0 - 0.5) > 0.03
        assert np.min(np.linalg.norm(dense[far] - flat.trains[w], axis=1)) < 0.04
    for d in (3, 4):
        assert covering_test(sample_cloud(s, TrainConfig(d, 0.2), 4000, seed=0), 12, 0.3).is_covering


@pytest.mark.parametrize("tau", [0.05, 0.13, 0.2, 0.37, 0.45, 0.62, 0.9])
def test_covering_ellipse(tau):
    assert covering_test(sample_cloud(make_sine(), TrainConfig(2, tau), 1000, seed=1)).is_covering


def test_covering_needs_enough_points():
    with pytest.raises(TooFewTrains):
        covering_test(sample_cloud(make_sine(), TrainConfig(2, 0.2), 100), k=12)


def test_covering_verdict_serialises():
    verdict = covering_test(sample_cloud(make_example1(), TrainConfig(2, 0.2), 2000, seed=3))
    doc = verdict.to_dict()
    assert doc["is_covering"] is False
    assert doc["parameters"] == {"k": 12, "theta": 0.3}
    assert doc["n_witnesses"] == len(doc["witnesses"]) > 0


def test_covering_monotone_in_train_length():
    """Once the d-cloud is covering, the (d+1)-cloud at the same times is too."""
    rng = np.random.default_rng(99)
    checked = 0
    for _ in range(30):
        n_h = int(rng.integers(1, 5))
        harmonics = tuple((k, *rng.normal(0, 1.0 / k, 2)) for k in range(1, n_h + 1))
        s = make_fourier(FourierSpec(1.0, harmonics))
        tau = float(rng.uniform(0.05, 0.45))
        for d in (2, 3):
            low = sample_cloud(s, TrainConfig(d, tau), 1500, seed=int(rng.integers(1 << 30)))
            if covering_test(low).is_covering:
                times = low.hidden_times
                high = TrainCloud(TrainConfig(d + 1, tau), embed_times(s, times, TrainConfig(d + 1, tau)))
                assert covering_test(high).is_covering
                checked += 1
    assert checked >= 20


def test_hausdorff_basics():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(60, 3))
    assert hausdorff_distance(a, a) == 0.0
    # sparse cloud, tiny translation: every point's match is its own image
    eps = 1e-4
    v = rng.normal(size=3)
    v *= eps / np.linalg.norm(v)
    assert hausdorff_distance(a, a + v) == pytest.approx(eps, rel=1e-9)
    b = rng.normal(size=(80, 3))
    assert hausdorff_distance(a, b) == pytest.approx(brute_hausdorff(a, b), rel=1e-12)
    with pytest.raises(DimensionMismatch):
        hausdorff_distance(a, b[:, :2])


def test_example2_curves_coincide():
    cfg = TrainConfig(3, 1 / 3)
    s = make_sine()
    w = make_warped(s, WarpSpec(3, 1))
    a = sample_cloud(s, cfg, 5000, "uniform_grid")
    b = sample_cloud(w, cfg, 5000, "uniform_grid")
    gap = max(max_nn_gap(a), max_nn_gap(b))
    assert hausdorff_distance(a, b) <= 2 * gap
    # whereas an actual time shift of the warp is far away
    assert hausdorff_distance(a, sample_cloud(make_sine(1.1), cfg, 5000, "uniform_grid")) > 10 * gap
