"""Lifts of circle homeomorphisms and their rotation numbers.

Charts here have period 1: a lift ``F`` satisfies ``F(u + 1) = F(u) + degree``
and the rotation number is the Birkhoff average ``(F^n(x) - x) / n mod 1``.
"""
from __future__ import annotations

import json
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.spatial import cKDTree

from .curvegeom import CyclicOrder
from .embedding import PairSet
from .errors import InvalidSpec, MatchFailed, NotAHomeomorphism

DEFAULT_VIOLATION_BUDGET = 0.01


@dataclass(frozen=True, eq=False)
class CircleLift:
    """Piecewise-linear lift through the knots ``(u, v)``, extended periodically."""

    u: np.ndarray
    v: np.ndarray
    degree: int = 1
    n_dropped: int = 0

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if u.ndim != 1 or u.shape != v.shape or len(u) < 2:
            raise InvalidSpec("a lift needs at least two knots with matching u and v")
        if self.degree not in (1, -1):
            raise InvalidSpec(f"degree must be +1 or -1, got {self.degree}")
        if np.any(np.diff(u) <= 0) or u[0] < 0 or u[-1] >= 1:
            raise InvalidSpec("knot positions must be strictly increasing in [0, 1)")
        if np.any(self.degree * np.diff(v) <= 0):
            raise InvalidSpec("knot images must be strictly monotone in the direction of the degree")
        if not abs(v[-1] - v[0]) < 1:
            raise InvalidSpec("knot images span a full turn or more")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        # one knot of padding on each side makes interpolation on [0, 1) local
        deg = self.degree
        object.__setattr__(self, "_ux", [u[-1] - 1.0, *u.tolist(), u[0] + 1.0])
        object.__setattr__(self, "_vx", [v[-1] - deg, *v.tolist(), v[0] + deg])

    def __len__(self):
        return len(self.u)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        k = np.floor(x)
        out = np.interp(x - k, self._ux, self._vx) + self.degree * k
        return float(out) if out.ndim == 0 else out

    def orbit(self, x0: float, n: int, flip: bool = False) -> np.ndarray:
        """``[x0, F(x0), ..., F^n(x0)]``; with ``flip`` iterate ``-F`` instead."""
        ux, vx, deg = self._ux, self._vx, self.degree
        sign = -1.0 if flip else 1.0
        out = np.empty(n + 1)
        x = float(x0)
        out[0] = x
        floor = math.floor
        for i in range(1, n + 1):
            k = floor(x)
            f = x - k
            j = bisect_right(ux, f) - 1
            u0 = ux[j]
            y = vx[j] + (vx[j + 1] - vx[j]) * (f - u0) / (ux[j + 1] - u0)
            x = sign * (y + deg * k)
            out[i] = x
        return out

    def to_csv(self) -> str:
        lines = [f"# degree={self.degree:+d}"]
        lines += [f"{a!r},{b!r}" for a, b in zip(self.u.tolist(), self.v.tolist())]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> CircleLift:
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("#") or "degree=" not in lines[0]:
            raise InvalidSpec("lift CSV must start with a '# degree=<+-1>' header")
        degree = int(lines[0].split("degree=")[1].split()[0])
        knots = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
        return cls(knots[:, 0], knots[:, 1], degree)


@dataclass(frozen=True)
class RotationEstimate:
    rho: float
    n_iter: int
    residual: float
    orientation_degree: int = 1
    x0: float = 0.0

    def to_dict(self):
        return {
            "rho": self.rho,
            "n_iter": self.n_iter,
            "residual": self.residual,
            "orientation_degree": self.orientation_degree,
            "x0": self.x0,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def translation_lift(shift: float, n_knots: int = 64) -> CircleLift:
    """Knots of the rigid rotation ``u -> u + shift``."""
    u = np.arange(n_knots) / n_knots
    return CircleLift(u, u + shift, 1)


def _longest_increasing(v: np.ndarray) -> np.ndarray:
    """Indices of a longest strictly increasing subsequence of ``v``."""
    tails: list[float] = []
    tail_idx: list[int] = []
    prev = np.full(len(v), -1)
    for i, x in enumerate(v.tolist()):
        j = bisect_left(tails, x)
        if j == len(tails):
            tails.append(x)
            tail_idx.append(i)
        else:
            tails[j] = x
            tail_idx[j] = i
        prev[i] = tail_idx[j - 1] if j > 0 else -1
    keep = []
    i = tail_idx[-1]
    while i >= 0:
        keep.append(i)
        i = prev[i]
    return np.asarray(keep[::-1])


def _chart_coordinates(order: CyclicOrder, targets: np.ndarray, tolerance: float) -> np.ndarray:
    """Chart coordinate of each target point, projected onto the ordered polygon."""
    pts = order.points
    seq = order.sequence
    M = len(seq)
    rank = np.empty(M, dtype=int)
    rank[seq] = np.arange(M)
    dist, nn = cKDTree(pts).query(targets, k=1)
    if np.any(dist > tolerance):
        worst = int(np.argmax(dist))
        raise MatchFailed(
            f"successor point {worst} is {dist[worst]:.3g} from the cloud, beyond tolerance {tolerance:.3g}"
        )
    r = rank[nn]
    u_seq = order.positions[seq]
    edge_u = np.mod(np.roll(u_seq, -1) - u_seq, 1.0)
    best_u = order.positions[nn].copy()
    best_d = dist.copy()
    # try the polygon edge leaving the nearest vertex and the one entering it
    for r0 in (r, (r - 1) % M):
        a = pts[seq[r0]]
        b = pts[seq[(r0 + 1) % M]]
        ab = b - a
        denom = np.einsum("ij,ij->i", ab, ab)
        s = np.clip(np.einsum("ij,ij->i", targets - a, ab) / np.where(denom > 0, denom, 1.0), 0.0, 1.0)
        d = np.linalg.norm(a + s[:, None] * ab - targets, axis=1)
        better = d < best_d
        best_d = np.where(better, d, best_d)
        best_u = np.where(better, np.mod(u_seq[r0] + s * edge_u[r0], 1.0), best_u)
    return best_u


def build_lift(
    order: CyclicOrder,
    pairs: PairSet,
    matching_tolerance: float | None = None,
    violation_budget: float = DEFAULT_VIOLATION_BUDGET,
) -> CircleLift:
    """Lift the successor map ``left[i] -> right[i]`` into the chart of ``order``.

    ``pairs.left`` must be the ordered points themselves (row for row), so
    their chart coordinates are exact. Each ``right`` point is matched to the
    closest point of the ordered polygon. ``matching_tolerance`` defaults to
    the longest polygon edge.
    """
    if len(pairs) != len(order.positions) or not np.array_equal(pairs.left, order.points):
        raise MatchFailed("left elements of the pairs must be the ordered cloud points, in cloud order")
    tol = order.max_edge if matching_tolerance is None else float(matching_tolerance)
    w = _chart_coordinates(order, np.asarray(pairs.right, dtype=float), tol)

    perm = np.argsort(order.positions, kind="stable")
    u = order.positions[perm]
    w = w[perm]
    step = np.mod(np.diff(w) + 0.5, 1.0) - 0.5
    closing = np.mod(w[0] - w[-1] + 0.5, 1.0) - 0.5
    winding = step.sum() + closing
    degree = 1 if winding > 0 else -1
    if abs(abs(winding) - 1.0) > 1e-6:
        raise NotAHomeomorphism(f"successor map winds {winding:.3f} times around the curve")
    v = w[0] + np.concatenate([[0.0], np.cumsum(step)])

    keep = _longest_increasing(degree * v)
    # knots must fit in one fundamental domain for the periodic extension
    keep = keep[degree * (v[keep] - v[keep[0]]) < 1.0]
    dropped = len(u) - len(keep)
    if dropped > violation_budget * len(u):
        raise NotAHomeomorphism(
            f"{dropped} of {len(u)} knots violate monotonicity (budget {violation_budget:.1%})"
        )
    return CircleLift(u[keep], v[keep], degree, dropped)


def rotation_number(lift: CircleLift, x0: float = 0.0, n_iter: int = 10_000) -> RotationEstimate:
    """Birkhoff estimate of the rotation number from the orbit of ``x0``.

    The residual compares the average displacement over ``n_iter`` steps
    with that over the first half of the orbit. A decreasing lift is
    composed with the chart reflection so that the iterated map is
    increasing.
    """
    if n_iter < 100:
        raise InvalidSpec(f"n_iter must be at least 100, got {n_iter}")
    orbit = lift.orbit(x0, n_iter, flip=lift.degree < 0)
    half = n_iter // 2
    full_avg = (orbit[n_iter] - orbit[0]) / n_iter
    half_avg = (orbit[half] - orbit[0]) / half
    rho = full_avg % 1.0
    if rho >= 1.0:
        rho = 0.0
    return RotationEstimate(float(rho), n_iter, float(abs(full_avg - half_avg)), lift.degree, float(x0))


@dataclass(frozen=True, eq=False)
class PLReparam:
    """Increasing piecewise-linear bijection of [0, 1) through ``(xs, ys)``.

    Both breakpoint arrays start at 0 and end at 1.
    """

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.shape != ys.shape or xs[0] != 0 or ys[0] != 0 or xs[-1] != 1 or ys[-1] != 1:
            raise InvalidSpec("breakpoints must run from (0, 0) to (1, 1)")
        if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
            raise InvalidSpec("reparametrisation breakpoints must be strictly increasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    def __call__(self, u):
        return np.interp(u, self.xs, self.ys)

    def inverse(self, y):
        return np.interp(y, self.ys, self.xs)


def _periodic(fn):
    def ext(x):
        x = np.asarray(x, dtype=float)
        k = np.floor(x)
        return np.asarray(fn(x - k), dtype=float) + k
    return ext


def _lift_preimages(lift: CircleLift, targets: np.ndarray) -> np.ndarray:
    """Points of [0, 1) that the lift sends onto ``targets``."""
    shifts = np.arange(-3, 4)
    ux = (lift.u[None, :] + shifts[:, None]).ravel()
    vx = (lift.v[None, :] + lift.degree * shifts[:, None]).ravel()
    if lift.degree < 0:
        ux, vx = ux[::-1], vx[::-1]
    order = np.argsort(vx, kind="stable")
    pre = np.interp(targets, vx[order], ux[order])
    return pre[(pre >= 0) & (pre < 1)]


def conjugate(lift: CircleLift, reparam: Callable[[np.ndarray], np.ndarray], n_grid: int = 4096) -> CircleLift:
    """Knots of ``Q o F o Q^-1`` for an increasing circle reparametrisation ``Q``.

    ``reparam`` maps [0, 1) onto [0, 1) monotonically; it is extended to the
    line by ``Q(x + k) = Q(x) + k``. For a :class:`PLReparam` the result is
    the exact conjugate, with a knot at every kink. Any other callable is
    tabulated on ``n_grid`` points and the conjugate is approximate.
    """
    q = _periodic(reparam)
    if isinstance(reparam, PLReparam):
        inv = reparam.inverse
        # kinks come from F's knots, Q^-1's kinks, and points that F sends onto Q's kinks
        targets = (reparam.xs[:-1][None, :] + np.arange(-4, 5)[:, None]).ravel()
        kinks = [q(lift.u), reparam.ys[:-1], q(_lift_preimages(lift, targets))]
    else:
        grid = np.arange(n_grid) / n_grid
        table = np.asarray(reparam(grid), dtype=float)
        inv = lambda y: np.interp(y, np.append(table, 1.0), np.append(grid, 1.0))
        kinks = [q(lift.u), table]
    x = np.mod(np.concatenate(kinks), 1.0)
    x = np.unique(np.where(x >= 1.0, 0.0, x))
    x = x[np.concatenate([[True], np.diff(x) > 1e-12])]
    v = q(lift(_periodic(inv)(x)))
    return CircleLift(x, v, lift.degree)


def rho_invariance_check(
    lift: CircleLift,
    reparam: Callable[[np.ndarray], np.ndarray],
    n_iter: int = 10_000,
    x0: float = 0.0,
) -> bool:
    a = rotation_number(lift, x0, n_iter)
    b = rotation_number(conjugate(lift, reparam), x0, n_iter)
    gap = abs(a.rho - b.rho)
    gap = min(gap, 1.0 - gap)
    return gap <= 3.0 * (a.residual + b.residual) + 2.0 / n_iter


def smooth_reparam(amplitude: float = 0.1):
    """``u + amplitude * sin(2 pi u) / (2 pi)``; increasing for ``amplitude < 1``."""
    return lambda u: u + amplitude * np.sin(2 * np.pi * np.asarray(u)) / (2 * np.pi)


def random_pl_reparam(rng: np.random.Generator, n_breaks: int = 8) -> PLReparam:
    """A random increasing piecewise-linear bijection of [0, 1) fixing 0."""
    xs = np.concatenate([[0.0], np.sort(rng.uniform(0.01, 0.99, n_breaks)), [1.0]])
    ys = np.concatenate([[0.0], np.sort(rng.uniform(0.01, 0.99, n_breaks)), [1.0]])
    # breakpoints closer than this are merged away to keep the map strictly increasing
    keep = np.concatenate([[True], (np.diff(xs) > 1e-9) & (np.diff(ys) > 1e-9)])
    keep[-1] = True
    return PLReparam(xs[keep], ys[keep])
