"""Synchronization error, insertion/deletion accounting, histograms and BER."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binomtest

from .timeline import IntervalSpec

OK, DELETION, INSERTION = "ok", "deletion", "insertion"


def normalized_error(est, true, spec: IntervalSpec):
    """Start error in units of the mean symbol duration."""
    return (np.asarray(est, dtype=float) - np.asarray(true, dtype=float)) / spec.mean_length


def classify_error(e: float) -> str:
    if e > 1:
        return DELETION
    if e < -1:
        return INSERTION
    return OK


def pair_tt_zones(zone_starts, true_starts) -> np.ndarray:
    """One-to-one nearest-start pairing of zones and true intervals.

    Pairs are formed greedily in order of increasing ``|zone start - t_s[k]|``
    (ties: earlier interval, then earlier zone). Returns, per interval, the
    index of its zone or -1.
    """
    zs = np.asarray(zone_starts, dtype=float)
    ts = np.asarray(true_starts, dtype=float)
    assign = np.full(len(ts), -1, dtype=np.int64)
    if len(zs) == 0 or len(ts) == 0:
        return assign
    dist = np.abs(zs[None, :] - ts[:, None])
    kk, zz = np.meshgrid(np.arange(len(ts)), np.arange(len(zs)), indexing="ij")
    order = np.lexsort((zz.ravel(), kk.ravel(), dist.ravel()))
    used = np.zeros(len(zs), dtype=bool)
    left = min(len(ts), len(zs))
    for flat in order:
        k, z = divmod(int(flat), len(zs))
        if assign[k] < 0 and not used[z]:
            assign[k] = z
            used[z] = True
            left -= 1
            if left == 0:
                break
    return assign


def wilson_interval(errors: int, n: int, level: float = 0.95) -> tuple[float, float]:
    if n == 0:
        return float("nan"), float("nan")
    ci = binomtest(int(errors), int(n)).proportion_ci(confidence_level=level, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass
class BerStats:
    errors: int = 0
    bits: int = 0

    @property
    def ber(self) -> float:
        return self.errors / self.bits if self.bits else float("nan")

    @property
    def wilson(self) -> tuple[float, float]:
        return wilson_interval(self.errors, self.bits)

    def merge(self, other: "BerStats") -> "BerStats":
        return BerStats(self.errors + other.errors, self.bits + other.bits)


def accumulate_ber(decisions, truth) -> BerStats:
    d = np.asarray(decisions)
    t = np.asarray(truth)
    if d.shape != t.shape:
        raise ValueError("decisions and truth must align")
    return BerStats(int(np.count_nonzero(d != t)), int(t.size))


def histogram(errors, bin_width: float = 0.05):
    """Density histogram with bins centred on multiples of ``bin_width``.

    Returns ``(centers, density, counts)``; the bin holding 0 is
    ``[-w/2, w/2)``.
    """
    if not bin_width > 0:
        raise ValueError("bin width must be positive")
    e = np.asarray(errors, dtype=float)
    if e.size == 0:
        return np.array([]), np.array([]), np.array([], dtype=np.int64)
    idx = np.floor(e / bin_width + 0.5).astype(np.int64)
    first = idx.min()
    counts = np.bincount(idx - first)
    centers = (np.arange(len(counts)) + first) * bin_width
    return centers, counts / (e.size * bin_width), counts


def histogram_mode(errors, bin_width: float = 0.05) -> float:
    """Centre of the most populated bin (earliest on ties)."""
    centers, _, counts = histogram(errors, bin_width)
    return float(centers[int(np.argmax(counts))])


@dataclass
class SyncErrorStats:
    errors: np.ndarray = field(default_factory=lambda: np.zeros(0))
    deletions: int = 0
    insertions: int = 0
    zones: int = 0
    intervals: int = 0

    def merge(self, other: "SyncErrorStats") -> "SyncErrorStats":
        return SyncErrorStats(np.concatenate((self.errors, other.errors)),
                              self.deletions + other.deletions, self.insertions + other.insertions,
                              self.zones + other.zones, self.intervals + other.intervals)

    @property
    def scored(self) -> int:
        return len(self.errors)

    def fraction_beyond(self, limit: float = 0.5) -> float:
        return float(np.mean(np.abs(self.errors) > limit)) if self.scored else float("nan")

    def histogram(self, bin_width: float = 0.05):
        return histogram(self.errors, bin_width)


def start_error_stats(est_starts, true_starts, spec: IntervalSpec, skip_first: bool = True) -> SyncErrorStats:
    """Errors of per-symbol start estimates; insertions/deletions by error size."""
    e = normalized_error(est_starts, true_starts, spec)
    if skip_first:
        e = e[1:]
    cls = [classify_error(v) for v in e]
    return SyncErrorStats(e, cls.count(DELETION), cls.count(INSERTION), 0, len(true_starts))


def zone_error_stats(zone_start_times, true_starts, spec: IntervalSpec):
    """Errors of TT zone starts; returns the stats and the pairing."""
    assign = pair_tt_zones(zone_start_times, true_starts)
    paired = assign >= 0
    e = normalized_error(np.asarray(zone_start_times)[assign[paired]], np.asarray(true_starts)[paired], spec)
    n_zone = len(zone_start_times)
    stats = SyncErrorStats(e, int(np.count_nonzero(~paired)), n_zone - int(np.count_nonzero(paired)),
                           n_zone, len(true_starts))
    return stats, assign
