"""Figure recipes: each writes the CSV data behind one plot.

Trace figures (fig3, fig4, fig5) use a fixed five-symbol timeline; the
others are Monte Carlo sweeps built on the default preset.
"""

from __future__ import annotations

import time
from pathlib import Path

import numpy as np

from .config import ExperimentConfig
from .harness import (run_sweep, write_ber_csv, write_histogram_csv, write_manifest,
                      write_rows, write_sync_csv)
from .observe import SamplingGrid, expected_counts, sample_trace, write_trace_csv
from .sync import TtConfig, ml_synchronize, po_config_from_model, po_synchronize, tt_synchronize
from .timeline import IntervalSpec, fixed_timeline

DEMO_STARTS_MS = (0.0, 1.2, 2.0, 3.0, 4.2)
DEMO_SYMBOLS = (1, 1, 0, 0, 1)
HIST_XI_B = (13, 15, 17)
FIG7_XI_A = ((4.0, 12.0), (4.5, 13.0), (5.0, 14.0))
FIG8_XI_B = {"mean": 13, "peak": 12}
FIG9_MEANS_MS = (0.5, 1.0, 2.0)
FIG9_XI_B = {0.5: 17, 1.0: 12, 2.0: 10}
XI_B_SWEEP = {"start": 4, "stop": 30, "step": 1}


def _demo(cfg: ExperimentConfig, out: Path):
    tl = fixed_timeline(np.array(DEMO_STARTS_MS) * 1e-3, DEMO_SYMBOLS,
                        IntervalSpec(cfg.spec.t_min, cfg.spec.t_max, len(DEMO_STARTS_MS)))
    grid = SamplingGrid.covering(tl, cfg.dt, cfg.tail)
    expected = expected_counts(tl, (cfg.model_a, cfg.model_b), grid)
    trace = sample_trace(expected, np.random.SeedSequence([cfg.seed, 0]))
    write_trace_csv(out / "trace.csv", expected, trace)
    return tl, grid, trace


def fig3(cfg, out):
    """Trace plus the ML metric of every hypothesis."""
    tl, grid, trace = _demo(cfg, out)
    record = []
    res = ml_synchronize(trace, tl.spec, cfg.model_b, cfg.ml, tl.starts, record=record)
    rows = []
    for k, h_lo, metrics in record:
        for j, m in enumerate(metrics):
            rows.append((k + 1, (h_lo + j) * grid.dt, m))
    write_rows(out / "ml_metric.csv", ["symbol", "t_hyp", "log_likelihood"], rows)
    write_rows(out / "starts.csv", ["symbol", "bit", "t_true", "t_est"],
               [(k + 1, int(tl.symbols[k]), tl.starts[k], res.starts[k]) for k in range(tl.K)])
    return ["trace.csv", "ml_metric.csv", "starts.csv"]


def fig4(cfg, out):
    """Trace plus PO estimates and the sample times of the observed peaks."""
    tl, grid, trace = _demo(cfg, out)
    po = po_config_from_model(cfg.model_b, cfg.po_genie)
    res = po_synchronize(trace, tl.spec, po.t_p, po.genie, tl.starts)
    write_rows(out / "starts.csv", ["symbol", "bit", "t_true", "t_est", "t_peak"],
               [(k + 1, int(tl.symbols[k]), tl.starts[k], res.starts[k], res.starts[k] + po.t_p)
                for k in range(tl.K)])
    return ["trace.csv", "starts.csv"]


def fig5(cfg, out, xi_b: float = 10.0, t_dw: float = 0.8e-3):
    """Trace plus TT detection zones."""
    tl, grid, trace = _demo(cfg, out)
    res = tt_synchronize(trace, TtConfig(xi_b, t_dw))
    zt = res.zone_times
    write_rows(out / "zones.csv", ["zone", "t_start", "t_end"],
               [(i + 1, a, b) for i, (a, b) in enumerate(zt)])
    write_rows(out / "starts.csv", ["symbol", "bit", "t_true"],
               [(k + 1, int(tl.symbols[k]), tl.starts[k]) for k in range(tl.K)])
    return ["trace.csv", "zones.csv", "starts.csv"]


def _hist_figure(cfg, out, blocks):
    cfg = cfg.with_overrides(scheme=["ml", "po", "tt"], tt={"xi_b": list(HIST_XI_B)})
    res = run_sweep(cfg, blocks)
    files = []
    for (scheme, xi_b), st in sorted(res.sync.items(), key=lambda kv: (kv[0][0], kv[0][1] or -1.0)):
        name = f"hist_{scheme}.csv" if xi_b is None else f"hist_{scheme}_xib{int(xi_b)}.csv"
        write_histogram_csv(out / name, st, cfg.hist_bin)
        files.append(name)
    write_sync_csv(out / "sync_errors.csv", res)
    return files + ["sync_errors.csv"], res


def fig6a(cfg, out, blocks=None):
    return _hist_figure(cfg, out, blocks)


def fig6b(cfg, out, blocks=None):
    return _hist_figure(cfg.with_overrides(channel={"snr_b_db": 5}), out, blocks)


def short_symbols(cfg: ExperimentConfig, mean_ms: float, ratio: float = 1.5) -> ExperimentConfig:
    """Same experiment with interval bounds rescaled to a new mean length."""
    t_min = 2 * mean_ms / (1 + ratio)
    return cfg.with_overrides(interval={"t_min_ms": t_min, "t_max_ms": ratio * t_min},
                              ml={"t_ow_ms": t_min}, tt={"t_dw_ms": t_min})


def fig6c(cfg, out, blocks=None):
    return _hist_figure(short_symbols(cfg, 0.5), out, blocks)


def fig7(cfg, out, blocks=None):
    """TT BER versus xi_b for fixed xi_a pairs and at the best xi_a."""
    cfg = cfg.with_overrides(scheme=["tt"], tt={"xi_b": XI_B_SWEEP})
    res = run_sweep(cfg, blocks)
    write_ber_csv(out / "ber.csv", res)
    rows = []
    for det in cfg.detectors:
        xs, curve = res.tt_min_curve(det)
        rows += [(det, "min", x, v) for x, v in zip(xs, curve)]
        grid = np.asarray(cfg.xi_a[det])
        for pair in FIG7_XI_A:
            xa = pair[0] if det == "mean" else pair[1]
            i = np.flatnonzero(np.isclose(grid, xa))
            if len(i):
                rows += [(det, _label(xa), x, res.ber_curve("tt", det, x)[i[0]]) for x in xs]
    write_rows(out / "curves.csv", ["detector", "xi_a", "xi_b", "ber"], rows)
    return ["ber.csv", "curves.csv"], res


def fig8(cfg, out, blocks=None):
    """BER versus xi_a for every scheme."""
    files, res = [], None
    rows = []
    for det in cfg.detectors:
        c = cfg.with_overrides(detector={"kind": [det]}, tt={"xi_b": FIG8_XI_B[det]})
        res = run_sweep(c, blocks)
        write_ber_csv(out / f"ber_{det}.csv", res)
        files.append(f"ber_{det}.csv")
        for scheme, d, xi_b, xa, st in res.cells():
            rows.append((scheme, d, xa, st.ber))
    write_rows(out / "curves.csv", ["scheme", "detector", "xi_a", "ber"], rows)
    return files + ["curves.csv"], res


def fig9(cfg, out, blocks=None):
    """Peak-detector BER versus xi_a for three mean symbol lengths."""
    rows, best_rows = [], []
    res = None
    for mean in FIG9_MEANS_MS:
        c = short_symbols(cfg, mean).with_overrides(detector={"kind": ["peak"]}, tt={"xi_b": XI_B_SWEEP})
        res = run_sweep(c, blocks)
        for scheme in c.schemes:
            if scheme not in res.bits:
                continue
            xb = FIG9_XI_B[mean] if scheme == "tt" else None
            curve = res.ber_curve(scheme, "peak", xb)
            rows += [(mean, scheme, xb, xa, v) for xa, v in zip(c.xi_a["peak"], curve)]
            opt_b, opt_a, st = res.best(scheme, "peak")
            lo, hi = st.wilson
            best_rows.append((mean, scheme, opt_b, opt_a, st.errors, st.bits, st.ber, lo, hi))
    write_rows(out / "curves.csv", ["mean_ms", "scheme", "xi_b", "xi_a", "ber"], rows)
    write_rows(out / "best.csv", ["mean_ms", "scheme", "xi_b", "xi_a", "errors", "bits", "ber",
                                  "ci_low", "ci_high"], best_rows)
    return ["curves.csv", "best.csv"], res


def _label(x: float) -> str:
    return f"{x:g}"


FIGURES = {
    "fig3": fig3, "fig4": fig4, "fig5": fig5,
    "fig6a": fig6a, "fig6b": fig6b, "fig6c": fig6c,
    "fig7": fig7, "fig8": fig8, "fig9": fig9,
}
TRACE_FIGURES = ("fig3", "fig4", "fig5")


def reproduce_figure(name: str, out_dir, cfg: ExperimentConfig | None = None, blocks: int | None = None):
    """Write the CSVs of figure ``name`` (plus a manifest) into ``out_dir``."""
    if name not in FIGURES:
        raise ValueError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}")
    cfg = cfg or ExperimentConfig.from_dict({})
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    if name in TRACE_FIGURES:
        files = FIGURES[name](cfg, out)
    else:
        files, _ = FIGURES[name](cfg, out, blocks)
    write_manifest(out, cfg, time.perf_counter() - t0, files, {"figure": name, "blocks": blocks or cfg.blocks})
    return [out / f for f in files]
