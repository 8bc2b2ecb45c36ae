"""Ground-truth references for tests and reports.

These use the true start times and the true period, which the estimators
never see. Estimation modules must not import from here.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .curvegeom import CyclicOrder
from .embedding import TrainCloud, TrainConfig, embed_times
from .errors import DimensionMismatch, InvalidSpec, NoGroundTruth
from .signals import PeriodicSignal


@dataclass(frozen=True, eq=False)
class DenseCurveOracle:
    signal: PeriodicSignal
    config: TrainConfig
    N: int = 100_000

    def __post_init__(self):
        if self.N < 10_000:
            raise InvalidSpec(f"dense oracle needs N >= 10^4 points, got {self.N}")
        times = np.arange(self.N) * (self.signal.period_T / self.N)
        points = embed_times(self.signal, times, self.config)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "_tree", cKDTree(points))

    @property
    def spacing(self) -> float:
        """Longest chord between consecutive oracle points (closing chord included)."""
        closed = np.vstack([self.points, self.points[:1]])
        return float(np.linalg.norm(np.diff(closed, axis=0), axis=1).max())

    def distances(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.config.d:
            raise DimensionMismatch(f"oracle curve lives in R^{self.config.d}, got points in R^{points.shape[1]}")
        dist, _ = self._tree.query(points, k=1)
        return dist


def distance_to_curve(point, oracle: DenseCurveOracle) -> float:
    return float(oracle.distances(point)[0])


def true_rho(T: float, tau: float) -> float:
    if not (T > 0 and tau > 0):
        raise InvalidSpec("T and tau must be positive")
    return float((tau / T) % 1.0)


def order_by_hidden_times(cloud: TrainCloud, T: float) -> CyclicOrder:
    """The chart ``u = (t mod T) / T`` built from the cloud's hidden start times."""
    if cloud.hidden_times is None:
        raise NoGroundTruth("cloud carries no hidden start times")
    u = np.mod(cloud.hidden_times, T) / T
    u = np.where(u >= 1.0, 0.0, u)
    seq = np.argsort(u, kind="stable")
    pts = np.asarray(cloud.trains, dtype=float)
    closed = np.vstack([pts[seq], pts[seq[:1]]])
    edges = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    return CyclicOrder(u, seq, pts, float(edges.sum()), edges, "time")


def cyclic_agreement(order: CyclicOrder, times, T: float) -> tuple[int, int]:
    """Compare a chart with true phases.

    Returns ``(direction, n_backsteps)``: ``direction`` is +1 when the chart
    runs with time and -1 against it; ``n_backsteps`` counts consecutive
    chart neighbours whose phase steps the wrong way.
    """
    phase = np.mod(np.asarray(times, dtype=float), T)[order.sequence] / T
    step = np.mod(np.diff(np.append(phase, phase[0])) + 0.5, 1.0) - 0.5
    direction = 1 if np.median(step) > 0 else -1
    return direction, int(np.count_nonzero(direction * step <= 0))
