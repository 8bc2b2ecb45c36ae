"""Periodic test signals.

Signals are pure evaluators: every kind reduces its time argument modulo the
period before evaluating, so ``s(t) == s(t + k*T)`` up to the rounding of
the reduction itself. Nothing here stores sample grids.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import InvalidSpec

TWO_PI = 2.0 * np.pi


def _reduce(t, period):
    t = np.asarray(t, dtype=float)
    return t - period * np.floor(t / period)


@dataclass(frozen=True)
class FourierSpec:
    period_T: float
    harmonics: tuple[tuple[int, float, float], ...]
    a_0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "harmonics", tuple((int(k), float(a), float(b)) for k, a, b in self.harmonics))
        if not self.period_T > 0:
            raise InvalidSpec(f"period_T must be positive, got {self.period_T}")
        if not self.harmonics:
            raise InvalidSpec("harmonic list is empty")
        if any(k < 1 for k, _, _ in self.harmonics):
            raise InvalidSpec("harmonic indices must be >= 1")
        if self.a_0 == 0 and all(a == 0 and b == 0 for _, a, b in self.harmonics):
            raise InvalidSpec("all Fourier coefficients are zero")


@dataclass(frozen=True)
class WarpSpec:
    """Time warp ``r(t) = t + sin(2*pi*q*t) / (4*pi*q)``.

    ``p`` is only the numerator of the sampling period ``p/q`` the warp is
    meant to be paired with; the warp itself depends on ``q`` alone.
    """

    q: int
    p: int | None = None

    def __post_init__(self):
        if int(self.q) != self.q or self.q <= 0:
            raise InvalidSpec(f"q must be a positive integer, got {self.q}")
        if self.p is not None and (int(self.p) != self.p or not 0 < self.p < self.q):
            raise InvalidSpec(f"p must be a positive integer below q={self.q}, got {self.p}")

    def warp(self, t):
        q = self.q
        return t + np.sin(TWO_PI * q * t) / (4.0 * np.pi * q)


class PeriodicSignal:
    """A T-periodic real signal; call it or use :meth:`eval`."""

    kind: str = ""
    period_T: float = 1.0

    def eval(self, t):
        out = self._eval_reduced(_reduce(t, self.period_T))
        return float(out) if np.ndim(out) == 0 else out

    __call__ = eval

    def _eval_reduced(self, t):
        raise NotImplementedError

    def to_dict(self) -> dict[str, Any]:
        raise NotImplementedError

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class FourierSignal(PeriodicSignal):
    spec: FourierSpec
    kind: str = field(default="fourier", init=False)

    @property
    def period_T(self):
        return self.spec.period_T

    def _eval_reduced(self, t):
        phase = TWO_PI * t / self.spec.period_T
        out = np.full_like(phase, self.spec.a_0)
        for k, a, b in self.spec.harmonics:
            out = out + a * np.cos(k * phase) + b * np.sin(k * phase)
        return out

    def to_dict(self):
        return {
            "kind": "fourier",
            "period_T": self.spec.period_T,
            "a_0": self.spec.a_0,
            "harmonics": [{"k": k, "a_k": a, "b_k": b} for k, a, b in self.spec.harmonics],
        }


@dataclass(frozen=True)
class Example1Signal(PeriodicSignal):
    """``(sin pi t)^2 sin(2 pi t (1 + t))`` on [0, 1], extended 1-periodically."""

    kind: str = field(default="example1", init=False)
    period_T: float = field(default=1.0, init=False)

    def _eval_reduced(self, t):
        return np.sin(np.pi * t) ** 2 * np.sin(TWO_PI * t * (1.0 + t))

    def to_dict(self):
        return {"kind": "example1", "period_T": 1.0}


@dataclass(frozen=True)
class WarpedSignal(PeriodicSignal):
    """``sin(2 pi r(t))``: same sample-train curve as ``sin(2 pi t)``, different signal."""

    spec: WarpSpec
    kind: str = field(default="warped", init=False)
    period_T: float = field(default=1.0, init=False)

    def _eval_reduced(self, t):
        return np.sin(TWO_PI * self.spec.warp(t))

    def to_dict(self):
        return {"kind": "warped", "period_T": 1.0, "q": self.spec.q, "p": self.spec.p}


@dataclass(frozen=True)
class ShiftedSignal(PeriodicSignal):
    base: PeriodicSignal
    delta: float
    kind: str = field(default="shifted", init=False)

    @property
    def period_T(self):
        return self.base.period_T

    def _eval_reduced(self, t):
        return self.base._eval_reduced(_reduce(t + self.delta, self.period_T))

    def to_dict(self):
        return {"kind": "shifted", "period_T": self.period_T, "delta": self.delta, "base": self.base.to_dict()}


def make_fourier(spec: FourierSpec) -> FourierSignal:
    return FourierSignal(spec)


def make_sine(period_T: float = 1.0, amplitude: float = 1.0) -> FourierSignal:
    return FourierSignal(FourierSpec(period_T, ((1, 0.0, amplitude),)))


def make_example1() -> Example1Signal:
    return Example1Signal()


def _is_unit_sine(signal) -> bool:
    return (
        isinstance(signal, FourierSignal)
        and signal.spec.period_T == 1.0
        and signal.spec.a_0 == 0.0
        and signal.spec.harmonics == ((1, 0.0, 1.0),)
    )


def make_warped(base: PeriodicSignal | None, spec: WarpSpec) -> WarpedSignal:
    """Warp the unit sine; ``base`` must be ``sin(2 pi t)`` (or None for it)."""
    if base is not None and not _is_unit_sine(base):
        raise InvalidSpec("warping is only defined for the base signal sin(2*pi*t) with T=1")
    return WarpedSignal(spec)


def shift(signal: PeriodicSignal, delta: float) -> ShiftedSignal:
    return ShiftedSignal(signal, float(delta))


def signal_from_dict(doc: dict[str, Any]) -> PeriodicSignal:
    kind = doc.get("kind")
    try:
        if kind == "fourier":
            harmonics = []
            for h in doc["harmonics"]:
                if isinstance(h, dict):
                    harmonics.append((h["k"], h.get("a_k", 0.0), h.get("b_k", 0.0)))
                else:
                    harmonics.append(tuple(h))
            return make_fourier(FourierSpec(float(doc["period_T"]), tuple(harmonics), float(doc.get("a_0", 0.0))))
        if kind == "example1":
            return make_example1()
        if kind == "warped":
            return make_warped(None, WarpSpec(int(doc["q"]), doc.get("p")))
        if kind == "shifted":
            return shift(signal_from_dict(doc["base"]), float(doc["delta"]))
    except (KeyError, TypeError) as exc:
        raise InvalidSpec(f"malformed {kind!r} signal document: {exc}") from exc
    raise InvalidSpec(f"unknown signal kind {kind!r}")


def signal_from_json(text: str) -> PeriodicSignal:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidSpec(f"signal document is not valid JSON: {exc}") from exc
    return signal_from_dict(doc)


def min_shift_rmse(a: PeriodicSignal, b: PeriodicSignal, step: float = 1e-3) -> tuple[float, float]:
    """Smallest RMSE between ``a(t)`` and ``b(t + delta)`` over a grid of shifts.

    Both signals are sampled on a grid of spacing ``step`` over one period of
    ``a``; returns ``(rmse, delta)``.
    """
    T = a.period_T
    n = int(round(T / step))
    t = np.arange(n) * (T / n)
    va = a.eval(t)
    vb = b.eval(t)
    # circular cross-correlation via FFT gives every grid shift at once
    cross = np.fft.irfft(np.conj(np.fft.rfft(va)) * np.fft.rfft(vb), n)
    sq = np.sum(va**2) + np.sum(vb**2) - 2.0 * cross
    j = int(np.argmin(sq))
    return math.sqrt(np.mean((va - np.roll(vb, -j)) ** 2)), j * T / n
