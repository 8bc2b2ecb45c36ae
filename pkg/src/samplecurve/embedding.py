"""Sample trains, finite train clouds, and the left/right projections.

A train of length ``d`` started at time ``t`` is the vector
``[s(t), s(t + tau), ..., s(t + (d-1) tau)]``. A :class:`TrainCloud` is an
unordered finite set of such trains. Clouds generated here remember the
start times in ``hidden_times`` for oracle tests only; blind estimators
never read that field.
"""
from __future__ import annotations

import io
import re
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import DimensionTooSmall, InvalidSpec, TooFewTrains
from .signals import PeriodicSignal

SCHEMES = ("uniform_grid", "uniform_random", "low_discrepancy")
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class TrainConfig:
    d: int
    tau: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise InvalidSpec(f"train length d must be an integer >= 2, got {self.d}")
        if not self.tau > 0:
            raise InvalidSpec(f"sampling period tau must be positive, got {self.tau}")


@dataclass(frozen=True, eq=False)
class TrainCloud:
    config: TrainConfig
    trains: np.ndarray
    hidden_times: np.ndarray | None = None

    def __post_init__(self):
        trains = np.array(self.trains, dtype=float)
        if trains.ndim != 2 or trains.shape[1] != self.config.d:
            raise InvalidSpec(f"trains must have shape (M, {self.config.d}), got {trains.shape}")
        if trains.shape[0] < 3:
            raise TooFewTrains(f"a cloud needs at least 3 trains, got {trains.shape[0]}")
        trains.setflags(write=False)
        object.__setattr__(self, "trains", trains)
        if self.hidden_times is not None:
            times = np.array(self.hidden_times, dtype=float)
            if times.shape != (trains.shape[0],):
                raise InvalidSpec("hidden_times must have one entry per train")
            times.setflags(write=False)
            object.__setattr__(self, "hidden_times", times)

    def __len__(self):
        return self.trains.shape[0]

    @property
    def d(self) -> int:
        return self.config.d

    @property
    def tau(self) -> float:
        return self.config.tau

    def blind(self) -> TrainCloud:
        """The same cloud with ground-truth times stripped."""
        return replace(self, hidden_times=None)

    def scaled(self, factor: float) -> TrainCloud:
        return replace(self, trains=self.trains * factor)


@dataclass(frozen=True, eq=False)
class PairSet:
    """Graph of the shift map: ``right[i]`` is the successor of ``left[i]``."""

    left: np.ndarray
    right: np.ndarray

    def __len__(self):
        return self.left.shape[0]


def embed_train(signal: PeriodicSignal, t: float, config: TrainConfig) -> np.ndarray:
    return np.asarray(signal.eval(t + config.tau * np.arange(config.d)), dtype=float)


def embed_times(signal: PeriodicSignal, times, config: TrainConfig) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    return np.asarray(signal.eval(times[:, None] + config.tau * np.arange(config.d)[None, :]), dtype=float)


def start_times(M: int, period_T: float, scheme: str = "uniform_random", seed: int | None = 0) -> np.ndarray:
    if scheme == "uniform_grid":
        return np.arange(M) * (period_T / M)
    if scheme == "uniform_random":
        return np.random.default_rng(seed).uniform(0.0, period_T, size=M)
    if scheme == "low_discrepancy":
        return np.mod(np.arange(M) * _GOLDEN, 1.0) * period_T
    raise InvalidSpec(f"unknown sampling scheme {scheme!r}; expected one of {SCHEMES}")


def sample_cloud(
    signal: PeriodicSignal,
    config: TrainConfig,
    M: int,
    scheme: str = "uniform_random",
    seed: int | None = 0,
) -> TrainCloud:
    """Draw ``M`` start times in ``[0, T)`` and embed a train at each.

    Trains are stored in a seeded random order so that no ordering
    information survives into the cloud.
    """
    if M < 3:
        raise TooFewTrains(f"need M >= 3 trains, got {M}")
    times = start_times(M, signal.period_T, scheme, seed)
    perm = np.random.default_rng(None if seed is None else seed + 1).permutation(M)
    times = times[perm]
    return TrainCloud(config, embed_times(signal, times, config), times)


def _check_projectable(cloud: TrainCloud):
    if cloud.config.d < 3:
        raise DimensionTooSmall(f"projection needs trains of length >= 3, got d={cloud.config.d}")


def project_left(cloud: TrainCloud) -> TrainCloud:
    _check_projectable(cloud)
    config = TrainConfig(cloud.config.d - 1, cloud.config.tau)
    return TrainCloud(config, cloud.trains[:, :-1], cloud.hidden_times)


def project_right(cloud: TrainCloud) -> TrainCloud:
    _check_projectable(cloud)
    config = TrainConfig(cloud.config.d - 1, cloud.config.tau)
    times = None if cloud.hidden_times is None else cloud.hidden_times + cloud.config.tau
    return TrainCloud(config, cloud.trains[:, 1:], times)


def pair_map(cloud: TrainCloud) -> PairSet:
    _check_projectable(cloud)
    return PairSet(cloud.trains[:, :-1].copy(), cloud.trains[:, 1:].copy())


# -- CSV train-cloud files ----------------------------------------------------

_HEADER = re.compile(r"^#\s*(.*)$")


def format_cloud_csv(cloud: TrainCloud, with_times: bool = False) -> str:
    with_times = with_times and cloud.hidden_times is not None
    out = io.StringIO()
    header = f"# d={cloud.config.d} tau={cloud.config.tau!r}"
    out.write(header + (" times=1\n" if with_times else "\n"))
    for i, row in enumerate(cloud.trains):
        fields = [repr(float(x)) for x in row]
        if with_times:
            fields.append(f"t={float(cloud.hidden_times[i])!r}")
        out.write(",".join(fields) + "\n")
    return out.getvalue()


def write_cloud_csv(cloud: TrainCloud, path, with_times: bool = False) -> None:
    Path(path).write_text(format_cloud_csv(cloud, with_times))


def parse_cloud_csv(text: str) -> TrainCloud:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not (m := _HEADER.match(lines[0])):
        raise InvalidSpec("train cloud CSV must start with a '# d=<int> tau=<float>' header")
    meta = dict(item.split("=", 1) for item in m.group(1).split() if "=" in item)
    try:
        config = TrainConfig(int(meta["d"]), float(meta["tau"]))
    except KeyError as exc:
        raise InvalidSpec(f"header is missing {exc}") from exc
    has_times = meta.get("times") == "1"
    rows, times = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if has_times:
            if not fields[-1].startswith("t="):
                raise InvalidSpec(f"line {lineno}: expected trailing t=<float> column")
            times.append(float(fields.pop()[2:]))
        if len(fields) != config.d:
            raise InvalidSpec(f"line {lineno}: expected {config.d} amplitudes, got {len(fields)}")
        rows.append([float(x) for x in fields])
    if len(rows) < 3:
        raise TooFewTrains(f"need at least 3 trains, file has {len(rows)}")
    return TrainCloud(config, np.array(rows), np.array(times) if has_times else None)


def read_cloud_csv(path) -> TrainCloud:
    return parse_cloud_csv(Path(path).read_text())
