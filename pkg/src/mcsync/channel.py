"""Channel pulse responses, noise floor and SNR calibration.

A channel is described by the expected number of bound molecules ``P(t)``
after a single release at ``t = 0`` and by a constant noise floor ``z``.
Two analytic pulse shapes are provided together with a tabulated one for
user supplied responses.
"""

from __future__ import annotations

import dataclasses
import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar


@dataclass(frozen=True)
class ChannelParams:
    """Physical parameters of the link (SI units)."""

    diffusion_coefficient: float = 5e-9
    tx_rx_distance: float = 2e-6
    receiver_radius: float = 1e-6
    released_count: float = 1e3
    forward_rate: float = 25e-14
    backward_rate: float = 5e4
    receptor_count: float = 1e3

    def __post_init__(self):
        for f in dataclasses.fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"{f.name} must be strictly positive")
        if self.tx_rx_distance <= self.receiver_radius:
            raise ValueError("tx_rx_distance must exceed receiver_radius")


class ChannelModel:
    """Base class of all pulse models.

    Subclasses implement :meth:`_pulse` for strictly positive times. The
    model is immutable; use :func:`calibrate_noise` or :meth:`scaled` to get
    modified copies.
    """

    noise: float = 0.0

    def _pulse(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        pos = t > 0
        if np.any(pos):
            out[pos] = self._pulse(t[pos])
        return out if out.ndim else float(out)

    def analytic_peak(self) -> tuple[float, float] | None:
        return None

    @property
    def peak_time(self) -> float:
        return peak_of_pulse(self)[0]

    @property
    def peak_value(self) -> float:
        return peak_of_pulse(self)[1]

    def with_noise(self, noise: float):
        if noise < 0:
            raise ValueError("noise floor must be non-negative")
        return dataclasses.replace(self, noise=float(noise))

    def scaled(self, factor: float):
        raise NotImplementedError

    def support_end(self, eps: float = 1e-6) -> float:
        """Time after which ``P(t) <= eps * P_max`` for good."""
        return _support_end(self, eps)

    def _support_end(self, eps):
        tp, pmax = peak_of_pulse(self)
        level = eps * pmax
        hi = 2.0 * tp
        while self(hi) > level:
            hi *= 2.0
            if hi > 1e6 * tp:
                return hi
        lo = tp
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if self(mid) > level:
                lo = mid
            else:
                hi = mid
        return hi


@functools.lru_cache(maxsize=64)
def _support_end(model, eps):
    return model._support_end(eps)


@dataclass(frozen=True)
class GammaPulse(ChannelModel):
    """``P(t) = P_max (t/t_p) exp(1 - t/t_p)``: analytic, unimodal."""

    peak: float
    tpeak: float
    noise: float = 0.0

    def __post_init__(self):
        if self.peak <= 0 or self.tpeak <= 0:
            raise ValueError("peak and tpeak must be positive")

    def _pulse(self, t):
        x = t / self.tpeak
        return self.peak * x * np.exp(1.0 - x)

    def analytic_peak(self):
        return self.tpeak, self.peak

    def scaled(self, factor):
        return dataclasses.replace(self, peak=self.peak * factor)


@dataclass(frozen=True)
class HittingRatePulse(ChannelModel):
    """First-hitting-time density of an absorbing sphere, rescaled.

    ``f(t) = (rr/r0) (r0 - rr) / sqrt(4 pi D t^3) exp(-(r0 - rr)^2 / (4 D t))``
    peaks at ``(r0 - rr)^2 / (6 D)``. The curve is scaled so that its
    maximum equals ``N (rr/r0) rho`` unless ``peak`` is given.

    ``tpeak`` overrides the geometric peak time while keeping the shape,
    i.e. ``P(t) = P_max (t_p/t)^1.5 exp(1.5 (1 - t_p/t))``. This is how a
    slower effective transport (e.g. receptor binding) is represented.
    """

    params: ChannelParams = field(default_factory=ChannelParams)
    bound_fraction: float = 0.1
    peak: float | None = None
    tpeak: float | None = None
    noise: float = 0.0

    def __post_init__(self):
        p = self.params
        if self.peak is None:
            pmax = p.released_count * (p.receiver_radius / p.tx_rx_distance) * self.bound_fraction
            object.__setattr__(self, "peak", float(pmax))
        if self.tpeak is None:
            d = p.tx_rx_distance - p.receiver_radius
            object.__setattr__(self, "tpeak", d * d / (6 * p.diffusion_coefficient))
        if self.peak <= 0 or self.tpeak <= 0:
            raise ValueError("peak and tpeak must be positive")

    def _pulse(self, t):
        x = self.tpeak / t
        return self.peak * x * np.sqrt(x) * np.exp(1.5 * (1.0 - x))

    def analytic_peak(self):
        return float(self.tpeak), float(self.peak)

    def scaled(self, factor):
        return dataclasses.replace(self, peak=self.peak * factor)


@dataclass(frozen=True)
class TabulatedPulse(ChannelModel):
    """Pulse given as samples, linearly interpolated, zero outside."""

    times: tuple
    values: tuple
    noise: float = 0.0
    grid_step: float | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape or t.ndim != 1 or len(t) < 2:
            raise ValueError("times and values must be 1-d of equal length")
        if np.any(np.diff(t) <= 0) or np.any(v < 0):
            raise ValueError("times must increase and values be non-negative")
        object.__setattr__(self, "times", tuple(t))
        object.__setattr__(self, "values", tuple(v))

    def _pulse(self, t):
        return np.interp(t, self.times, self.values, left=0.0, right=0.0)

    def scaled(self, factor):
        return dataclasses.replace(self, values=tuple(np.asarray(self.values) * factor))


def eval_pulse(model: ChannelModel, t):
    """Expected bound count ``t`` seconds after a release (0 for t <= 0)."""
    return model(t)


def calibrate_noise(model: ChannelModel, snr_db: float) -> ChannelModel:
    """Return ``model`` with ``z = P_max / 10**(snr_db / 10)``."""
    if not math.isfinite(snr_db):
        raise ValueError("snr_db must be finite")
    pmax = peak_of_pulse(model)[1]
    return model.with_noise(pmax / 10 ** (snr_db / 10))


def peak_of_pulse(model: ChannelModel, dt: float = 1e-5, span: float | None = None) -> tuple[float, float]:
    """Peak location and value of a unimodal pulse.

    Uses the closed form when the model has one. Otherwise the pulse is
    scanned on a ``dt`` grid and the best sample refined by bounded
    scalar minimization (Brent) to ``1e-3 * dt``.
    """
    exact = model.analytic_peak()
    if exact is not None:
        return exact
    if isinstance(model, TabulatedPulse):
        span = span or model.times[-1]
        dt = model.grid_step or dt
    if span is None:
        span = 1.0
    grid = np.arange(0.0, span + dt, dt)
    vals = np.asarray(model(grid))
    i = int(np.argmax(vals))
    if vals[i] <= 0:
        raise ValueError("pulse is identically zero")
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    res = minimize_scalar(lambda s: -float(model(s)), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-3 * dt})
    t_best, v_best = float(res.x), float(model(res.x))
    if v_best < vals[i]:
        t_best, v_best = float(grid[i]), float(vals[i])
    return t_best, v_best
