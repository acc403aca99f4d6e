"""Attachment-window schedules.

A schedule decides which existing vertices the next arrival may attach to.
Windowed schedules expose the inclusive range ``{max(1, j(n)), ..., n}``:

* ``Macroscopic(theta)``  -- j(n) = floor(theta * n), a positive fraction of
  the network stays visible forever.
* ``Mesoscopic(beta)``    -- j(n) = n - floor(n**beta), only a vanishing
  recent window is visible.
* ``CustomJ(j)``          -- any user-supplied non-decreasing j with j(n) <= n.

``Sarrt(quantile)`` is the scaled-attachment rule: vertex n+1 attaches to
``max(1, floor(n * V))`` for V drawn through the quantile map; it has no
attachment window.

Floors of ``theta*n`` and ``n**beta`` are computed so that the integer result
is reliable for every n a simulation can reach: exact dyadic integer
arithmetic where the multiplier allows it, 80-bit extended precision with
verification elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np


class WindowlessScheduleError(TypeError):
    """Raised when a window is requested from a schedule that has none."""


def _floor_pow(n: int, beta: float) -> int:
    """floor(n**beta) via extended precision with integer verification."""
    k = int(np.floor(np.power(np.longdouble(n), np.longdouble(beta))))
    # verify and nudge: want largest k with k <= n**beta
    while k > 0 and np.power(np.longdouble(n), np.longdouble(beta)) < np.longdouble(k):
        k -= 1
    while np.power(np.longdouble(n), np.longdouble(beta)) >= np.longdouble(k + 1):
        k += 1
    return k


def _pow_thresholds(n_max: int, beta: float) -> np.ndarray:
    """t[k] = smallest m >= 1 with floor(m**beta) >= k, for k = 0..K.

    floor(m**beta) is a non-decreasing step function; these jump points let
    the floor be evaluated for whole blocks of m with searchsorted instead of
    one pow per element.  Candidates come from float inversion and are then
    verified (and nudged) against the same longdouble pow used by _floor_pow.
    """
    kmax = _floor_pow(n_max, beta) + 1
    ks = np.arange(1, kmax + 1, dtype=np.int64)
    kl = ks.astype(np.longdouble)
    bl = np.longdouble(beta)
    cand = np.ceil(np.power(kl, np.longdouble(1.0) / bl)).astype(np.int64)
    cand = np.maximum(cand, 1)
    for _ in range(8):
        too_big = (cand > 1) & (np.power((cand - 1).astype(np.longdouble), bl) >= kl)
        cand[too_big] -= 1
        too_small = np.power(cand.astype(np.longdouble), bl) < kl
        cand[too_small] += 1
        if not (np.any(too_big) or np.any(too_small)):
            break
    return np.concatenate(([1], cand))


def _floor_pow_block(m: np.ndarray, beta: float, thresholds: np.ndarray) -> np.ndarray:
    """floor(m**beta) for a sorted contiguous block, from precomputed jump points."""
    return (np.searchsorted(thresholds, m, side="right") - 1).astype(np.int64)


class _DyadicMul:
    """Exact floor(theta*m) helper for float theta = p / 2**s."""

    def __init__(self, theta: float):
        frac = Fraction(theta)
        self.p = frac.numerator
        self.s = frac.denominator.bit_length() - 1  # denominator is a power of two
        self.theta = theta
        # int64 multiply stays exact while p * m < 2**63
        self.vector_limit = (1 << 62) // max(self.p, 1)

    def floor_scalar(self, m: int) -> int:
        return (self.p * m) >> self.s

    def floor_block(self, m: np.ndarray) -> np.ndarray:
        if m.shape[0] and int(m[-1]) <= self.vector_limit:
            return (m.astype(np.int64) * self.p) >> self.s
        x = m.astype(np.float64) * self.theta
        out = np.floor(x).astype(np.int64)
        sus = np.abs(x - np.rint(x)) <= np.abs(x) * 1e-12 + 1e-12
        for i in np.nonzero(sus)[0]:
            out[i] = self.floor_scalar(int(m[i]))
        return out


@dataclass(frozen=True)
class Macroscopic:
    """Window low edge at a fixed fraction of the current size."""

    theta: float

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta must lie in (0,1), got {self.theta}")
        object.__setattr__(self, "_mul", _DyadicMul(self.theta))

    def window_lo(self, n: int) -> int:
        return max(1, self._mul.floor_scalar(n))

    def lo_block(self, m: np.ndarray) -> np.ndarray:
        return np.maximum(self._mul.floor_block(m), 1)

    def prepare(self, n_max: int) -> None:
        pass

    def describe(self) -> dict:
        return {"kind": "macroscopic", "theta": self.theta}


@dataclass(frozen=True)
class Mesoscopic:
    """Window of width ~n**beta trailing the newest vertex."""

    beta: float

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0,1), got {self.beta}")
        object.__setattr__(self, "_thresholds", None)
        object.__setattr__(self, "_thresholds_nmax", 0)

    def window_lo(self, n: int) -> int:
        return max(1, n - _floor_pow(n, self.beta))

    def _ensure_thresholds(self, n_max: int) -> np.ndarray:
        if self._thresholds is None or self._thresholds_nmax < n_max:
            object.__setattr__(self, "_thresholds", _pow_thresholds(n_max, self.beta))
            object.__setattr__(self, "_thresholds_nmax", n_max)
        return self._thresholds

    def lo_block(self, m: np.ndarray) -> np.ndarray:
        th = self._ensure_thresholds(int(m[-1]) if m.shape[0] else 1)
        return np.maximum(m - _floor_pow_block(m, self.beta, th), 1)

    def prepare(self, n_max: int) -> None:
        self._ensure_thresholds(n_max)

    def describe(self) -> dict:
        return {"kind": "mesoscopic", "beta": self.beta}


@dataclass(frozen=True)
class CustomJ:
    """User-supplied window edge j(n); must be non-decreasing with 1 <= j(n) <= n."""

    j: Callable[[int], int]

    def window_lo(self, n: int) -> int:
        jn = int(self.j(n))
        if not 1 <= jn <= n:
            raise ValueError(f"custom j({n}) = {jn} outside [1, {n}]")
        return jn

    def lo_block(self, m: np.ndarray) -> np.ndarray:
        try:
            lo = np.asarray(self.j(m), dtype=np.int64)
            if lo.shape != m.shape:
                raise TypeError
        except (TypeError, ValueError):
            lo = np.fromiter((int(self.j(int(v))) for v in m), dtype=np.int64, count=m.shape[0])
        if np.any(lo < 1) or np.any(lo > m):
            bad = int(m[np.nonzero((lo < 1) | (lo > m))[0][0]])
            raise ValueError(f"custom j({bad}) outside [1, {bad}]")
        return lo

    def prepare(self, n_max: int) -> None:
        pass

    def describe(self) -> dict:
        return {"kind": "custom_j"}


@dataclass(frozen=True)
class Sarrt:
    """Scaled attachment: parent of n+1 is max(1, floor(n*V)), V = quantile(U).

    ``quantile`` maps [0,1] -> [0,1], monotone non-decreasing, and must accept
    numpy arrays (it is applied to blocks of uniforms).
    """

    quantile: Callable[[np.ndarray], np.ndarray]

    def __post_init__(self):
        probe = np.asarray(self.quantile(np.array([0.0, 0.5, 1.0])), dtype=np.float64)
        if probe[0] < -1e-12 or probe[2] > 1.0 + 1e-12 or np.any(np.diff(probe) < -1e-12):
            raise ValueError("quantile must map [0,1] into [0,1] monotonically")

    def window_lo(self, n: int) -> int:
        raise WindowlessScheduleError("windowless schedule: SARRT attachment has no window")

    def lo_block(self, m: np.ndarray) -> np.ndarray:
        raise WindowlessScheduleError("windowless schedule: SARRT attachment has no window")

    def describe(self) -> dict:
        return {"kind": "sarrt"}


MemorySchedule = Macroscopic | Mesoscopic | CustomJ | Sarrt
WindowedSchedule = Macroscopic | Mesoscopic | CustomJ


def uniform_quantile(lo: float = 0.0, hi: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    """Quantile map of the uniform distribution on [lo, hi]."""
    if not (0.0 <= lo <= hi <= 1.0):
        raise ValueError("need 0 <= lo <= hi <= 1")

    def q(u):
        return lo + (hi - lo) * np.asarray(u)

    return q


def window(schedule: MemorySchedule, n: int) -> tuple[int, int]:
    """Inclusive attachment window (lo, hi) offered to vertex n+1.

    hi = n and lo = max(1, j(n)).  SARRT schedules are rejected: their
    attachment rule does not reduce to a window.
    """
    if isinstance(schedule, Sarrt):
        raise WindowlessScheduleError("windowless schedule: SARRT attachment has no window")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    lo = schedule.window_lo(n)
    return lo, n
