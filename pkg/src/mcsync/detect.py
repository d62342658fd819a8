"""Mean and peak threshold detectors on per-symbol detection intervals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .observe import SamplingGrid
from .sync import SyncResult
from .timeline import IntervalSpec


@dataclass(frozen=True)
class DetectorConfig:
    kind: str = "mean"
    xi_a: float = 4.5

    def __post_init__(self):
        if self.kind not in ("mean", "peak"):
            raise ValueError(f"unknown detector {self.kind!r}")
        if not self.xi_a > 0:
            raise ValueError("xi_a must be positive")


@dataclass(frozen=True)
class DetectionIntervals:
    """Inclusive sample-index bounds ``lo[k] .. hi[k]``, one row per interval.

    ``lo > hi`` marks an interval holding no sample of the trace.
    """

    lo: np.ndarray
    hi: np.ndarray

    @property
    def counts(self) -> np.ndarray:
        return np.maximum(self.hi - self.lo + 1, 0)

    def __len__(self):
        return len(self.lo)


def intervals_from_sync(result: SyncResult, spec: IntervalSpec, grid: SamplingGrid) -> DetectionIntervals:
    """Map a sync result to detection intervals.

    Start estimates give ``[s_k, s_{k+1})``; the last one ends one mean
    interval length after its start. TT zones are used as they are
    (closed at both ends). Intervals are clipped to the trace.
    """
    if result.zones is not None:
        z = np.asarray(result.zones, dtype=np.int64).reshape(-1, 2)
        return DetectionIntervals(z[:, 0].copy(), z[:, 1].copy())
    starts = np.asarray(result.starts, dtype=float)
    ends = np.append(starts[1:], starts[-1] + spec.mean_length)
    lo = np.array([grid.index_at_or_after(s) for s in starts], dtype=np.int64)
    # half-open end: last sample strictly before the next start
    hi = np.array([grid.index_at_or_after(e) - 1 for e in ends], dtype=np.int64)
    return DetectionIntervals(lo, np.minimum(hi, grid.n - 1))


def _window(r_a, lo: int, hi: int) -> np.ndarray:
    if lo > hi or lo >= len(r_a) or hi < 0:
        raise ValueError("empty detection interval")
    return r_a[lo:hi + 1]


def detect_mean(r_a, lo: int, hi: int, xi_a: float) -> int:
    return int(np.mean(_window(r_a, lo, hi)) >= xi_a)


def detect_peak(r_a, lo: int, hi: int, xi_a: float) -> int:
    return int(np.max(_window(r_a, lo, hi)) >= xi_a)


def interval_statistics(r_a, iv: DetectionIntervals) -> tuple[np.ndarray, np.ndarray]:
    """Sample mean and maximum of ``r_a`` per interval (nan when empty).

    Thresholding these is equivalent to calling :func:`detect_mean` /
    :func:`detect_peak` per interval, but allows whole threshold sweeps.
    """
    r_a = np.asarray(r_a)
    n = len(iv)
    means = np.full(n, np.nan)
    peaks = np.full(n, np.nan)
    csum = np.concatenate(([0], np.cumsum(r_a, dtype=np.int64)))
    for k in range(n):
        lo, hi = int(iv.lo[k]), int(iv.hi[k])
        if lo > hi or lo >= len(r_a):
            continue
        means[k] = (csum[hi + 1] - csum[lo]) / (hi - lo + 1)
        peaks[k] = r_a[lo:hi + 1].max()
    return means, peaks


def decide(stat: np.ndarray, xi_a) -> np.ndarray:
    """Bit decisions ``stat >= xi_a``; empty intervals decide 0.

    ``xi_a`` may be an array, giving one row of decisions per threshold.
    """
    xi = np.atleast_1d(np.asarray(xi_a, dtype=float))
    with np.errstate(invalid="ignore"):
        out = (stat[None, :] >= xi[:, None]).astype(np.int8)
    return out if np.ndim(xi_a) else out[0]


def detect(r_a, iv: DetectionIntervals, cfg: DetectorConfig) -> np.ndarray:
    means, peaks = interval_statistics(r_a, iv)
    return decide(means if cfg.kind == "mean" else peaks, cfg.xi_a)
