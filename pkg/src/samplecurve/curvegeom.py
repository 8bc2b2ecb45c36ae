"""Geometry of train clouds sampled from a closed curve.

* :func:`covering_test` flags self-intersections with a local PCA test.
* :func:`order_curve` recovers the cyclic order of the cloud by greedy
  nearest-neighbour chaining and assigns each point a normalised arc-length
  coordinate ``u`` in [0, 1).
* :func:`hausdorff_distance` compares two clouds as point sets.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .embedding import TrainCloud
from .errors import DimensionMismatch, OrderingFailed, TooFewTrains

DEFAULT_K = 12
DEFAULT_THETA = 0.3
DEFAULT_LENGTH_JUMP_FACTOR = 5.0
MIN_ORDER_POINTS = 50


@dataclass(frozen=True, eq=False)
class CoveringVerdict:
    is_covering: bool
    witnesses: np.ndarray
    k: int
    theta: float
    max_ratio: float

    def to_dict(self):
        return {
            "is_covering": self.is_covering,
            "witnesses": [int(i) for i in self.witnesses],
            "n_witnesses": int(len(self.witnesses)),
            "max_ratio": self.max_ratio,
            "parameters": {"k": self.k, "theta": self.theta},
        }


@dataclass(frozen=True, eq=False)
class CyclicOrder:
    """Arc-length chart of an ordered cloud.

    ``positions[i]`` is the chart coordinate of cloud point ``i``;
    ``sequence`` lists cloud indices by increasing ``u``; ``points`` are the
    cloud coordinates the chart was built from.
    """

    positions: np.ndarray
    sequence: np.ndarray
    points: np.ndarray
    total_length: float
    edge_lengths: np.ndarray = field(repr=False)
    orientation: str = "as_built"
    length_jump_factor: float = DEFAULT_LENGTH_JUMP_FACTOR

    @property
    def median_edge(self) -> float:
        return float(np.median(self.edge_lengths))

    @property
    def max_edge(self) -> float:
        return float(np.max(self.edge_lengths))

    def reversed(self) -> CyclicOrder:
        """The same chart traversed backwards: ``u -> (1 - u) mod 1``."""
        positions = np.mod(1.0 - self.positions, 1.0)
        sequence = np.concatenate([self.sequence[:1], self.sequence[:0:-1]])
        edges = self.edge_lengths[::-1]
        orientation = "reversed" if self.orientation == "as_built" else "as_built"
        return CyclicOrder(positions, sequence, self.points, self.total_length, edges, orientation,
                           self.length_jump_factor)

    def to_dict(self):
        return {
            "orientation": self.orientation,
            "total_length": self.total_length,
            "positions": [float(u) for u in self.positions],
            "median_edge": self.median_edge,
            "max_edge": self.max_edge,
            "length_jump_factor": self.length_jump_factor,
        }


def local_pca_ratios(points: np.ndarray, k: int = DEFAULT_K) -> np.ndarray:
    """``sigma2 / sigma1`` of the centred ``k``-neighbourhood of every point."""
    points = np.asarray(points, dtype=float)
    _, idx = cKDTree(points).query(points, k=k + 1)
    hood = points[idx]
    hood = hood - hood.mean(axis=1, keepdims=True)
    sv = np.linalg.svd(hood, compute_uv=False)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratios = np.where(sv[:, 0] > 0, sv[:, 1] / sv[:, 0], 0.0)
    return ratios


def covering_test(cloud: TrainCloud, k: int = DEFAULT_K, theta: float = DEFAULT_THETA) -> CoveringVerdict:
    """Decide whether the cloud looks like a simple closed curve.

    A point is a witness of non-covering when its neighbourhood is not
    one-dimensional, i.e. the second principal singular value exceeds
    ``theta`` times the first. Transversal crossings give ratios of order
    one; smooth arcs give ratios of order curvature times neighbourhood size.
    """
    M = len(cloud)
    if M < 20 * k:
        raise TooFewTrains(f"covering test with k={k} needs at least {20 * k} trains, got {M}")
    ratios = local_pca_ratios(cloud.trains, k)
    witnesses = np.flatnonzero(ratios > theta)
    return CoveringVerdict(len(witnesses) == 0, witnesses, k, theta, float(ratios.max()))


def _greedy_chain(points: np.ndarray, start: int) -> np.ndarray:
    M = len(points)
    tree = cKDTree(points)
    k0 = min(M, 16)
    _, nbrs = tree.query(points, k=k0)
    nbrs = nbrs.tolist()
    visited = np.zeros(M, dtype=bool)
    chain = [start]
    visited[start] = True
    cur = start
    for _ in range(M - 1):
        nxt = -1
        for j in nbrs[cur]:
            if not visited[j]:
                nxt = j
                break
        if nxt < 0:
            # all cached neighbours used up; fall back to a widening search
            k = 2 * k0
            while nxt < 0:
                k = min(k, M)
                _, cand = tree.query(points[cur], k=k)
                for j in np.atleast_1d(cand):
                    if not visited[j]:
                        nxt = int(j)
                        break
                k *= 2
        visited[nxt] = True
        chain.append(nxt)
        cur = nxt
    return np.asarray(chain)


def _two_opt(points: np.ndarray, tour: np.ndarray, n_neighbors: int = 8, max_passes: int = 50) -> np.ndarray:
    """Neighbour-list 2-opt and Or-opt on a cyclic tour.

    For every near neighbour ``c`` of a point ``a``, the move joining ``a``
    to ``c`` is tried against both the successor and the predecessor edges
    of the two points, reversing the segment in between whenever that
    shortens the closed polygon. This untangles the local zigzags a greedy
    chain leaves near its start and the longer doubled-back stretches it
    produces across sampling gaps. Or-opt moves re-insert short runs of up
    to three points that the chain skipped and picked up later.
    """
    from math import dist

    M = len(tour)
    if M < 4:
        return tour
    _, nbrs = cKDTree(points).query(points, k=min(M, n_neighbors + 1))
    nbrs = nbrs[:, 1:].tolist()
    pts = [tuple(p) for p in points.tolist()]
    tour = list(map(int, tour))
    pos = [0] * M
    for i, a in enumerate(tour):
        pos[a] = i

    def reverse(i, j):
        # reverse tour[i..j] cyclically, walking inwards from both ends
        n = (j - i) % M + 1
        for m in range(n // 2):
            x, y = (i + m) % M, (j - m) % M
            tour[x], tour[y] = tour[y], tour[x]
            pos[tour[x]], pos[tour[y]] = x, y

    def or_opt(a):
        # move the segment of up to 3 points starting at a next to a near neighbour
        for L in (1, 2, 3):
            i = pos[a]
            seg = [tour[(i + m) % M] for m in range(L)]
            p, n = tour[(i - 1) % M], tour[(i + L) % M]
            if n in seg or p in seg or M - L < 3:
                return False
            removed = dist(pts[p], pts[seg[0]]) + dist(pts[seg[-1]], pts[n]) - dist(pts[p], pts[n])
            for end, other in ((seg[0], seg[-1]), (seg[-1], seg[0])):
                for c in nbrs[end]:
                    if c in seg:
                        continue
                    e = tour[(pos[c] + 1) % M]
                    if e in seg:
                        continue
                    # c, end, ..., other, e  or reversed orientation via the other end
                    added = dist(pts[c], pts[end]) + dist(pts[other], pts[e]) - dist(pts[c], pts[e])
                    if removed - added > 1e-12 * removed:
                        moved = seg if end == seg[0] else seg[::-1]
                        skip = set(seg)
                        rest = [t for t in tour if t not in skip]
                        k = rest.index(c) + 1
                        tour[:] = rest[:k] + moved + rest[k:]
                        for m, t in enumerate(tour):
                            pos[t] = m
                        return True
        return False

    def gain(a, b, c, e):
        # replacing edges ab, ce by ac, be shortens the tour
        dab = dist(pts[a], pts[b])
        return dab + dist(pts[c], pts[e]) - dist(pts[a], pts[c]) - dist(pts[b], pts[e]) > 1e-12 * dab

    for _ in range(max_passes):
        improved = False
        for a in range(M):
            for c in nbrs[a]:
                # successor edges: a b .. c e  ->  a c .. b e
                i, j = pos[a], pos[c]
                b, e = tour[(i + 1) % M], tour[(j + 1) % M]
                if c != b and e != a and gain(a, b, c, e):
                    if (j - i) % M <= M // 2:
                        reverse((i + 1) % M, j)
                    else:
                        reverse((j + 1) % M, i)
                    improved = True
                # predecessor edges: e c .. b a  ->  e b .. c a
                i, j = pos[a], pos[c]
                b, e = tour[(i - 1) % M], tour[(j - 1) % M]
                if c != b and e != a and gain(a, b, c, e):
                    if (i - j) % M <= M // 2:
                        reverse(j, (i - 1) % M)
                    else:
                        reverse(i, (j - 1) % M)
                    improved = True
            if or_opt(a):
                improved = True
        if not improved:
            break
    return np.asarray(tour)


def order_curve(cloud: TrainCloud, length_jump_factor: float = DEFAULT_LENGTH_JUMP_FACTOR) -> CyclicOrder:
    """Chain the cloud into a closed polygon and return its arc-length chart.

    The chain starts at the point whose second-nearest neighbour is closest,
    which puts the closing edge in the densest part of the cloud, and is then
    untangled by a neighbour-list 2-opt pass. The chart orientation
    is whatever the chain happened to follow.
    """
    points = np.asarray(cloud.trains, dtype=float)
    M = len(points)
    if M < MIN_ORDER_POINTS:
        raise TooFewTrains(f"ordering needs at least {MIN_ORDER_POINTS} trains, got {M}")
    dist, _ = cKDTree(points).query(points, k=3)
    start = int(np.argmin(dist[:, 2]))
    chain = _two_opt(points, _greedy_chain(points, start))
    chain = np.roll(chain, -int(np.flatnonzero(chain == start)[0]))

    closed = np.vstack([points[chain], points[chain[:1]]])
    edges = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    median = float(np.median(edges))
    if edges[-1] > length_jump_factor * median:
        raise OrderingFailed(
            f"closing edge {edges[-1]:.3g} exceeds {length_jump_factor} x median edge {median:.3g}; "
            "cloud too sparse or curve self-intersects"
        )
    if np.any(edges[:-1] == 0):
        raise OrderingFailed("cloud contains duplicate points")
    total = float(edges.sum())
    arc = np.concatenate([[0.0], np.cumsum(edges[:-1])]) / total
    positions = np.empty(M)
    positions[chain] = arc
    return CyclicOrder(positions, chain, points, total, edges, "as_built", length_jump_factor)


def directed_hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """``max_{x in a} min_{y in b} |x - y|``."""
    dist, _ = cKDTree(b).query(a, k=1)
    return float(dist.max())


def hausdorff_distance(a: TrainCloud | np.ndarray, b: TrainCloud | np.ndarray) -> float:
    pa = a.trains if isinstance(a, TrainCloud) else np.atleast_2d(np.asarray(a, dtype=float))
    pb = b.trains if isinstance(b, TrainCloud) else np.atleast_2d(np.asarray(b, dtype=float))
    if pa.shape[1] != pb.shape[1]:
        raise DimensionMismatch(f"cannot compare clouds of dimension {pa.shape[1]} and {pb.shape[1]}")
    return max(directed_hausdorff(pa, pb), directed_hausdorff(pb, pa))


def max_nn_gap(cloud: TrainCloud | np.ndarray) -> float:
    """Largest distance from a point to its nearest other point."""
    pts = cloud.trains if isinstance(cloud, TrainCloud) else np.asarray(cloud, dtype=float)
    dist, _ = cKDTree(pts).query(pts, k=2)
    return float(dist[:, 1].max())
