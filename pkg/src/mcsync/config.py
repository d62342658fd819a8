"""Experiment configuration: YAML document <-> validated dataclasses.

Times in the file are given in ms (``*_ms``) or us (``dt_us``); everything
inside the library is in seconds. See ``presets/default.yaml`` for the full
schema with defaults.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .channel import ChannelParams, GammaPulse, HittingRatePulse, TabulatedPulse, calibrate_noise
from .sync import MlConfig, TtConfig
from .timeline import IntervalSpec

SCHEMES = ("perfect", "ml", "po", "tt")
DETECTORS = ("mean", "peak")


class ConfigError(ValueError):
    pass


def expand_values(v) -> list[float]:
    """Scalar, list, or ``{start, stop, step}`` (stop inclusive) -> list."""
    if isinstance(v, dict):
        start, stop, step = float(v["start"]), float(v["stop"]), float(v["step"])
        if step <= 0:
            raise ConfigError("sweep step must be positive")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 10) for i in range(n)]
    if isinstance(v, (list, tuple)):
        return [float(x) for x in v]
    return [float(v)]


def _deep_update(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in (extra or {}).items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _deep_update(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def load_preset(name: str = "default") -> dict:
    text = resources.files("mcsync").joinpath("presets", f"{name}.yaml").read_text()
    return yaml.safe_load(text)


@dataclass
class ExperimentConfig:
    raw: dict
    spec: IntervalSpec
    model_a: object
    model_b: object
    dt: float
    tail: float | None
    schemes: tuple[str, ...]
    ml: MlConfig
    po_genie: bool
    tt_xi_b: list[float]
    tt_t_dw: float
    detectors: tuple[str, ...]
    xi_a: dict[str, list[float]]
    blocks: int
    ml_blocks: int
    seed: int
    timing_seed: int | None = None
    symbol_seed: int | None = None
    workers: int = 1
    hist_bin: float = 0.05
    outputs: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc: dict, base: str | None = "default") -> "ExperimentConfig":
        raw = _deep_update(load_preset(base), doc) if base else copy.deepcopy(doc)
        try:
            return cls._build(raw)
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"bad config: {exc}") from exc

    @classmethod
    def load(cls, path, base: str | None = "default") -> "ExperimentConfig":
        with open(path) as fh:
            doc = yaml.safe_load(fh) or {}
        return cls.from_dict(doc, base)

    @classmethod
    def _build(cls, raw: dict) -> "ExperimentConfig":
        iv = raw["interval"]
        try:
            spec = IntervalSpec(iv["t_min_ms"] * 1e-3, iv["t_max_ms"] * 1e-3, int(iv["K"]))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        model_a, model_b = build_channel(raw["channel"])

        schemes = raw.get("scheme", list(SCHEMES))
        schemes = tuple([schemes] if isinstance(schemes, str) else schemes)
        for s in schemes:
            if s not in SCHEMES:
                raise ConfigError(f"unknown scheme {s!r}")

        ml_raw = raw.get("ml", {})
        ml = MlConfig(float(ml_raw.get("t_ow_ms", iv["t_min_ms"])) * 1e-3, bool(ml_raw.get("genie", False)))
        tt_raw = raw.get("tt", {})
        xi_b = expand_values(tt_raw.get("xi_b", 13))
        t_dw = float(tt_raw.get("t_dw_ms", iv["t_min_ms"])) * 1e-3

        det = raw.get("detector", {})
        kinds = det.get("kind", list(DETECTORS))
        kinds = tuple([kinds] if isinstance(kinds, str) else kinds)
        for k in kinds:
            if k not in DETECTORS:
                raise ConfigError(f"unknown detector {k!r}")
        xa = det.get("xi_a", {})
        if isinstance(xa, dict) and set(xa) <= set(DETECTORS):
            xi_a = {k: expand_values(xa[k]) for k in kinds}
        else:
            xi_a = {k: expand_values(xa) for k in kinds}
        if any(not v or min(v) <= 0 for v in xi_a.values()):
            raise ConfigError("detection thresholds must be positive")

        run = raw.get("run", {})
        grid = raw.get("grid", {})
        tail = grid.get("tail_ms")
        cfg = cls(
            raw=raw, spec=spec, model_a=model_a, model_b=model_b,
            dt=float(grid.get("dt_us", 10)) * 1e-6,
            tail=None if tail is None else float(tail) * 1e-3,
            schemes=schemes, ml=ml, po_genie=bool(raw.get("po", {}).get("genie", False)),
            tt_xi_b=xi_b, tt_t_dw=t_dw, detectors=kinds, xi_a=xi_a,
            blocks=int(run.get("blocks", 1000)), ml_blocks=int(run.get("ml_blocks", 100)),
            seed=int(run.get("seed", 0)),
            timing_seed=run.get("timing_seed"), symbol_seed=run.get("symbol_seed"),
            workers=int(run.get("workers", 1)), hist_bin=float(run.get("hist_bin", 0.05)),
            outputs=raw.get("outputs", {}),
        )
        cfg.validate()
        return cfg

    def validate(self):
        """Per-scheme a-priori constraints; raises ConfigError."""
        problems = []
        if "ml" in self.schemes:
            try:
                self.ml.validate(self.spec)
            except ValueError as exc:
                problems.append(str(exc))
        if "tt" in self.schemes:
            try:
                for xb in self.tt_xi_b:
                    TtConfig(xb, self.tt_t_dw).validate(self.spec)
            except ValueError as exc:
                problems.append(str(exc))
        if self.dt <= 0:
            problems.append("dt must be positive")
        if self.blocks < 1 or self.ml_blocks < 0:
            problems.append("block counts must be positive")
        if self.hist_bin <= 0:
            problems.append("hist_bin must be positive")
        if problems:
            raise ConfigError("; ".join(problems))

    def tt_configs(self) -> list[TtConfig]:
        return [TtConfig(xb, self.tt_t_dw) for xb in self.tt_xi_b]

    def with_overrides(self, **doc) -> "ExperimentConfig":
        return ExperimentConfig.from_dict(_deep_update(self.raw, doc), base=None)


def build_channel(ch: dict):
    """Type-A and type-B pulse models, each calibrated to its SNR."""
    kind = ch.get("kind", "hitting-rate")
    models = []
    for x in ("a", "b"):
        if kind == "gamma":
            peak = ch.get(f"peak_{x}", ch.get("peak"))
            m = GammaPulse(float(peak), float(ch["tpeak_ms"]) * 1e-3)
        elif kind == "hitting-rate":
            params = ChannelParams(
                diffusion_coefficient=float(ch.get("diffusion_coefficient", 5e-9)),
                tx_rx_distance=float(ch.get("tx_rx_distance", 2e-6)),
                receiver_radius=float(ch.get("receiver_radius", 1e-6)),
                released_count=float(ch.get(f"released_count_{x}", ch.get("released_count", 1e3))),
                forward_rate=float(ch.get("forward_rate", 25e-14)),
                backward_rate=float(ch.get("backward_rate", 5e4)),
                receptor_count=float(ch.get(f"receptor_count_{x}", ch.get("receptor_count", 1e3))),
            )
            tp = ch.get("tpeak_ms")
            peak = ch.get(f"peak_{x}", ch.get("peak"))
            m = HittingRatePulse(params, float(ch.get("bound_fraction", 0.1)),
                                 None if peak is None else float(peak),
                                 None if tp is None else float(tp) * 1e-3)
        elif kind == "table":
            data = np.loadtxt(Path(ch["file"]), delimiter=",", skiprows=1, ndmin=2)
            m = TabulatedPulse(tuple(data[:, 0]), tuple(data[:, 1 if x == "a" or data.shape[1] < 3 else 2]))
        else:
            raise ConfigError(f"unknown channel kind {kind!r}")
        snr = ch.get(f"snr_{x}_db", ch.get("snr_db", 10))
        models.append(calibrate_noise(m, float(snr)))
    return tuple(models)
