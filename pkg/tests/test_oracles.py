import numpy as np
import pytest

from samplecurve.curvegeom import order_curve
from samplecurve.embedding import TrainConfig, embed_train, sample_cloud
from samplecurve.errors import DimensionMismatch, InvalidSpec, NoGroundTruth
from samplecurve.oracles import (
    DenseCurveOracle,
    cyclic_agreement,
    distance_to_curve,
    order_by_hidden_times,
    true_rho,
)
from samplecurve.signals import make_example1, make_sine


def test_true_rho():
    assert true_rho(1.0, 0.2) == pytest.approx(0.2)
    assert true_rho(1.0, 1.2) == pytest.approx(0.2)
    assert true_rho(0.8, 0.7) == pytest.approx(0.875, abs=1e-12)
    with pytest.raises(InvalidSpec):
        true_rho(0.0, 0.1)


def test_distance_to_curve():
    cfg = TrainConfig(3, 0.2)
    oracle = DenseCurveOracle(make_example1(), cfg, 10_000)
    assert distance_to_curve(oracle.points[17], oracle) == 0.0
    eps = 1e-3
    assert distance_to_curve(oracle.points[17] + [eps, 0, 0], oracle) <= eps
    for t in np.random.default_rng(1).uniform(0, 1, 50):
        assert distance_to_curve(embed_train(make_example1(), t, cfg), oracle) <= oracle.spacing
    with pytest.raises(DimensionMismatch):
        distance_to_curve([0.0, 0.0], oracle)
    with pytest.raises(InvalidSpec):
        DenseCurveOracle(make_sine(), cfg, 100)


def test_order_by_hidden_times():
    cloud = sample_cloud(make_sine(), TrainConfig(2, 0.2), 8, "uniform_grid")
    chart = order_by_hidden_times(cloud, 1.0)
    np.testing.assert_allclose(chart.positions, cloud.hidden_times)
    with pytest.raises(NoGroundTruth):
        order_by_hidden_times(cloud.blind(), 1.0)


def test_hidden_chart_matches_estimated_order():
    cloud = sample_cloud(make_example1(), TrainConfig(3, 0.2), 2000, seed=3)
    est = order_curve(cloud)
    truth = order_by_hidden_times(cloud, 1.0)
    direction, backsteps = cyclic_agreement(est, cloud.hidden_times, 1.0)
    assert backsteps == 0
    assert cyclic_agreement(truth, cloud.hidden_times, 1.0) == (1, 0)


def test_oracles_not_imported_by_estimators():
    import pathlib

    import samplecurve

    root = pathlib.Path(samplecurve.__file__).parent
    for name in ("signals", "embedding", "curvegeom", "circlemap", "recovery"):
        assert "oracles" not in (root / f"{name}.py").read_text()
