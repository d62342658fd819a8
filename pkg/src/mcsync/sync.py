"""Maximum-likelihood, peak-observation and threshold-trigger synchronization.

ML and PO estimate the start of every symbol interval one after another;
each search set is anchored at the previous start, taken either from the
scheme's own previous estimate or (genie mode) from the true start. The
first start is known to be 0. TT does not estimate starts; it returns the
detection zones in which the synchronization count is high.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import kernels
from .channel import ChannelModel, peak_of_pulse
from .observe import ISI_EPS, ObservationTrace, SamplingGrid, superpose
from .timeline import IntervalSpec


@dataclass(frozen=True)
class MlConfig:
    t_ow: float = 0.8e-3
    genie: bool = False

    def validate(self, spec: IntervalSpec):
        if self.t_ow <= 0:
            raise ValueError("observation window must be positive")
        if self.t_ow > spec.t_min * (1 + 1e-9):
            raise ValueError("ML needs t_ow <= t_min")
        if not spec.ml_compatible:
            raise ValueError("ML needs t_max <= 2 t_min")


@dataclass(frozen=True)
class PoConfig:
    t_p: float
    genie: bool = False

    def __post_init__(self):
        if not self.t_p > 0:
            raise ValueError("peak time must be positive")


@dataclass(frozen=True)
class TtConfig:
    xi_b: float = 13.0
    t_dw: float = 0.8e-3

    def __post_init__(self):
        if not self.xi_b > 0:
            raise ValueError("xi_b must be positive")
        if not self.t_dw > 0:
            raise ValueError("t_dw must be positive")

    def validate(self, spec: IntervalSpec):
        if self.t_dw > spec.t_min * (1 + 1e-9):
            raise ValueError("TT needs t_dw <= t_min")


@dataclass(frozen=True)
class SyncResult:
    """Per-symbol start estimates (ml, po, perfect) or TT detection zones.

    ``zones`` holds inclusive sample-index pairs and is only set for TT.
    """

    scheme: str
    dt: float
    starts: np.ndarray | None = None
    zones: np.ndarray | None = None

    @property
    def zone_times(self) -> np.ndarray:
        return self.zones * self.dt


def _window_len(t_ow: float, dt: float) -> int:
    return int(math.floor(t_ow / dt + 1e-9)) + 1


def ml_log_likelihood(trace: ObservationTrace, t_index: int, prev_starts, model_b: ChannelModel,
                      t_ow: float, eps: float = ISI_EPS) -> float:
    """Log-likelihood of the samples in ``[t, t + t_ow]`` given a start at ``t``.

    ``prev_starts`` are the already decided starts contributing ISI.
    """
    grid = trace.grid
    lo = t_index
    hi = min(grid.n, t_index + _window_len(t_ow, grid.dt))
    if lo < 0 or lo >= grid.n:
        raise ValueError("hypothesis outside the trace")
    lam = superpose(model_b, list(prev_starts) + [t_index * grid.dt], grid, eps=eps)[lo:hi] + model_b.noise
    r = trace.r_b[lo:hi]
    if np.any((lam <= 0) & (r > 0)):
        return -math.inf
    pos = lam > 0
    return float(np.sum(r[pos] * np.log(lam[pos]) - lam[pos] - gammaln(r[pos] + 1.0)))


def _search_range(grid: SamplingGrid, lo_t: float, hi_t: float) -> tuple[int, int]:
    lo = grid.index_at_or_after(lo_t)
    hi = min(grid.index_at_or_before(hi_t), grid.n - 1)
    return min(lo, grid.n - 1), hi


def ml_synchronize(trace: ObservationTrace, spec: IntervalSpec, model_b: ChannelModel, cfg: MlConfig,
                   true_starts=None, eps: float = ISI_EPS, record: list | None = None) -> SyncResult:
    """Symbol-by-symbol ML estimates of the interval starts.

    When ``record`` is a list, ``(k, first_hypothesis_index, metrics)`` is
    appended to it for every estimated symbol.
    """
    cfg.validate(spec)
    if cfg.genie and true_starts is None:
        raise ValueError("genie mode needs the true starts")
    grid = trace.grid
    n, dt = grid.n, grid.dt
    w = _window_len(cfg.t_ow, dt)
    r = np.ascontiguousarray(trace.r_b, dtype=np.int64)
    lnfact = gammaln(r + 1.0)
    reach = model_b.support_end(eps)
    # grid-aligned pulse, reused for every on-grid estimate
    table = model_b(np.arange(min(n, int(reach / dt) + 2)) * dt)
    pulse = np.ascontiguousarray(table[:w]) if w <= len(table) else np.pad(table, (0, w - len(table)))
    base = np.full(n, float(model_b.noise))
    base[: len(table)] += table[:n]

    est = np.zeros(spec.K)
    for k in range(1, spec.K):
        anchor = true_starts[k - 1] if cfg.genie else est[k - 1]
        h_lo, h_hi = _search_range(grid, anchor + spec.t_min, anchor + spec.t_max)
        if h_hi < h_lo:
            h_hi = h_lo
        best, metrics = kernels.ml_scan(r, lnfact, base, pulse, h_lo, h_hi)
        if record is not None:
            record.append((k, h_lo, np.asarray(metrics)))
        if best < 0:
            raise RuntimeError(f"every ML hypothesis is impossible for symbol {k + 1}")
        est[k] = best * dt
        if cfg.genie:
            superpose(model_b, [true_starts[k]], grid, eps=eps, out=base)
        else:
            m = min(len(table), n - best)
            base[best:best + m] += table[:m]
    return SyncResult("ml", dt, starts=est)


def po_synchronize(trace: ObservationTrace, spec: IntervalSpec, t_p: float, genie: bool = False,
                   true_starts=None) -> SyncResult:
    """Start estimate = time of the largest sync count in the window, minus ``t_p``."""
    if genie and true_starts is None:
        raise ValueError("genie mode needs the true starts")
    grid = trace.grid
    r = trace.r_b
    est = np.zeros(spec.K)
    for k in range(1, spec.K):
        anchor = true_starts[k - 1] if genie else est[k - 1]
        lo, hi = _search_range(grid, anchor + spec.t_min + t_p, anchor + spec.t_max + t_p)
        if hi < lo:
            hi = lo
        est[k] = (lo + int(np.argmax(r[lo:hi + 1]))) * grid.dt - t_p
    return SyncResult("po", grid.dt, starts=est)


def tt_synchronize(trace: ObservationTrace, cfg: TtConfig) -> SyncResult:
    """Zones opened when ``r_B >= xi_B`` and closed at the first ``r_B <= xi_B``,
    but never before ``t_dw`` has elapsed."""
    n_dw = int(round(cfg.t_dw / trace.grid.dt))
    r = np.ascontiguousarray(trace.r_b, dtype=np.int64)
    zones = kernels.tt_scan(r, float(cfg.xi_b), n_dw)
    return SyncResult("tt", trace.grid.dt, zones=zones)


def perfect_sync(true_starts, dt: float) -> SyncResult:
    return SyncResult("perfect", dt, starts=np.asarray(true_starts, dtype=float))


def po_config_from_model(model_b: ChannelModel, genie: bool = False) -> PoConfig:
    return PoConfig(peak_of_pulse(model_b)[0], genie)
