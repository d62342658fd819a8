"""Expected bound-molecule counts with ISI and Poisson observations."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelModel
from .timeline import Timeline

ISI_EPS = 1e-6


@dataclass(frozen=True)
class SamplingGrid:
    dt: float
    horizon: float

    def __post_init__(self):
        if self.dt <= 0 or self.horizon < 0:
            raise ValueError("need dt > 0 and horizon >= 0")

    @property
    def n(self) -> int:
        return int(math.floor(self.horizon / self.dt + 1e-9)) + 1

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n) * self.dt

    def index_at_or_after(self, t: float) -> int:
        """Smallest n with t_n >= t (tolerant to rounding)."""
        return max(0, int(math.ceil(t / self.dt - 1e-9)))

    def index_at_or_before(self, t: float) -> int:
        return int(math.floor(t / self.dt + 1e-9))

    @classmethod
    def covering(cls, timeline: Timeline, dt: float = 1e-5, tail: float | None = None):
        """Grid reaching ``tail`` (default ``2 t_max``) past the last start."""
        tail = 2 * timeline.spec.t_max if tail is None else tail
        return cls(dt, float(timeline.starts[-1]) + tail if timeline.K else tail)


@dataclass(frozen=True)
class ExpectedTrace:
    rbar_a: np.ndarray
    rbar_b: np.ndarray
    grid: SamplingGrid


@dataclass(frozen=True)
class ObservationTrace:
    r_a: np.ndarray
    r_b: np.ndarray
    grid: SamplingGrid

    def __post_init__(self):
        if len(self.r_a) != self.grid.n or len(self.r_b) != self.grid.n:
            raise ValueError("trace length does not match grid")


def superpose(model: ChannelModel, starts, grid: SamplingGrid, weights=None, eps: float = ISI_EPS,
              out: np.ndarray | None = None) -> np.ndarray:
    """Sum of ``w_k P(t_n - s_k)`` on the grid, without the noise floor.

    Each emission is dropped once its pulse has decayed below
    ``eps * P_max``.
    """
    n = grid.n
    out = np.zeros(n) if out is None else out
    starts = np.atleast_1d(np.asarray(starts, dtype=float))
    if len(starts) == 0:
        return out
    weights = np.ones(len(starts)) if weights is None else np.asarray(weights, dtype=float)
    reach = model.support_end(eps) if eps > 0 else np.inf
    times = grid.times
    for s, w in zip(starts, weights):
        if w == 0:
            continue
        lo = grid.index_at_or_after(s)
        hi = n if not np.isfinite(reach) else min(n, grid.index_at_or_before(s + reach) + 1)
        if lo >= hi:
            continue
        out[lo:hi] += w * model(times[lo:hi] - s)
    return out


def expected_counts(timeline: Timeline, models: tuple[ChannelModel, ChannelModel],
                    grid: SamplingGrid, eps: float = ISI_EPS) -> ExpectedTrace:
    """Mean counts of information (A) and synchronization (B) molecules."""
    model_a, model_b = models
    rbar_a = superpose(model_a, timeline.starts, grid, timeline.symbols, eps) + model_a.noise
    rbar_b = superpose(model_b, timeline.starts, grid, None, eps) + model_b.noise
    return ExpectedTrace(rbar_a, rbar_b, grid)


def sample_trace(expected: ExpectedTrace, seed) -> ObservationTrace:
    """Independent Poisson draws around the expected counts."""
    rng = np.random.default_rng(seed)
    r_a = rng.poisson(expected.rbar_a).astype(np.int64)
    r_b = rng.poisson(expected.rbar_b).astype(np.int64)
    return ObservationTrace(r_a, r_b, expected.grid)


def write_trace_csv(path, expected: ExpectedTrace, trace: ObservationTrace):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t_n", "rbar_A", "rbar_B", "r_A", "r_B"])
        for row in zip(expected.grid.times, expected.rbar_a, expected.rbar_b, trace.r_a, trace.r_b):
            w.writerow([f"{row[0]:.8g}", f"{row[1]:.10g}", f"{row[2]:.10g}", int(row[3]), int(row[4])])
