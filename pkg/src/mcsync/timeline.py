"""Symbol interval starts and data bits for one block."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class IntervalSpec:
    """Range of symbol interval lengths (seconds) and symbols per block."""

    t_min: float = 0.8e-3
    t_max: float = 1.2e-3
    K: int = 50

    def __post_init__(self):
        if not 0 < self.t_min <= self.t_max:
            raise ValueError("need 0 < t_min <= t_max")
        if self.K < 1:
            raise ValueError("K must be at least 1")

    @property
    def mean_length(self) -> float:
        return 0.5 * (self.t_min + self.t_max)

    @property
    def ml_compatible(self) -> bool:
        # next start can never fall inside the current search set
        return self.t_max <= 2 * self.t_min

    @classmethod
    def from_mean(cls, mean: float, ratio: float = 1.5, K: int = 50):
        """Spec with ``t_max / t_min == ratio`` and the given mean length."""
        t_min = 2 * mean / (1 + ratio)
        return cls(t_min, ratio * t_min, K)


@dataclass(frozen=True)
class Timeline:
    starts: np.ndarray
    symbols: np.ndarray
    spec: IntervalSpec

    @property
    def K(self) -> int:
        return len(self.starts)


def sample_timeline(spec: IntervalSpec, seed, symbol_seed=None) -> Timeline:
    """Draw uniform interval lengths and equiprobable bits.

    ``seed`` drives the interval lengths; bits use ``symbol_seed`` when given,
    otherwise a stream spawned from ``seed``.
    """
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    timing_ss, bits_ss = ss.spawn(2)
    if symbol_seed is not None:
        bits_ss = np.random.SeedSequence(symbol_seed)
    steps = np.random.default_rng(timing_ss).uniform(spec.t_min, spec.t_max, size=spec.K - 1)
    starts = np.concatenate(([0.0], np.cumsum(steps)))
    symbols = np.random.default_rng(bits_ss).integers(0, 2, size=spec.K, dtype=np.int8)
    return Timeline(starts, symbols, spec)


def fixed_timeline(starts, symbols, spec: IntervalSpec | None = None, rtol: float = 1e-9) -> Timeline:
    """Timeline from explicit starts; increments are checked against ``spec``."""
    starts = np.asarray(starts, dtype=float)
    symbols = np.asarray(symbols, dtype=np.int8)
    if starts.shape != symbols.shape or starts.ndim != 1:
        raise ValueError("starts and symbols must be 1-d of equal length")
    if not np.all(np.isin(symbols, (0, 1))):
        raise ValueError("symbols must be bits")
    steps = np.diff(starts)
    if np.any(steps <= 0):
        raise ValueError("starts must be strictly increasing")
    if spec is None:
        spec = IntervalSpec(float(steps.min()) if len(steps) else 1e-3,
                            float(steps.max()) if len(steps) else 1e-3, len(starts))
    tol = rtol * spec.t_max
    if np.any(steps < spec.t_min - tol) or np.any(steps > spec.t_max + tol):
        raise ValueError("interval length outside [t_min, t_max]")
    spec = IntervalSpec(spec.t_min, spec.t_max, len(starts))
    return Timeline(starts, symbols, spec)
