"""Seeded Monte Carlo over blocks, threshold sweeps and result files.

Every block draws one timeline and one noisy trace. All threshold cells
(``xi_a`` for the detectors, ``xi_b`` for TT) are evaluated on that same
trace, so curves over thresholds share their random numbers.
"""

from __future__ import annotations

import csv
import json
import os
import subprocess
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import kernels
from .config import ExperimentConfig
from .detect import decide, interval_statistics, intervals_from_sync
from .metrics import BerStats, SyncErrorStats, start_error_stats, wilson_interval, zone_error_stats
from .observe import SamplingGrid, expected_counts, sample_trace
from .sync import ml_synchronize, perfect_sync, po_config_from_model, po_synchronize, tt_synchronize
from .timeline import sample_timeline


class BlockError(RuntimeError):
    def __init__(self, block: int, cause: Exception):
        super().__init__(f"block {block}: {cause!r}")
        self.block = block


def block_seeds(cfg: ExperimentConfig, block: int):
    """(timing, symbols, noise) seed sequences of one block."""
    root = np.random.SeedSequence([cfg.seed, block])
    timing, noise = root.spawn(2)
    if cfg.timing_seed is not None:
        timing = np.random.SeedSequence([int(cfg.timing_seed), block])
    symbols = None if cfg.symbol_seed is None else np.random.SeedSequence([int(cfg.symbol_seed), block])
    return timing, symbols, noise


def simulate_block(cfg: ExperimentConfig, block: int):
    """Timeline, grid, expected counts and observed trace of one block."""
    timing, symbols, noise = block_seeds(cfg, block)
    tl = sample_timeline(cfg.spec, timing, symbols)
    grid = SamplingGrid.covering(tl, cfg.dt, cfg.tail)
    expected = expected_counts(tl, (cfg.model_a, cfg.model_b), grid)
    return tl, grid, expected, sample_trace(expected, noise)


@dataclass
class BlockResult:
    """Per-cell error counts of one block.

    ``ber[(scheme, detector, xi_b)]`` holds one error count per ``xi_a``
    value; ``xi_b`` is None except for TT.
    """

    block: int
    bits: dict = field(default_factory=dict)
    ber: dict = field(default_factory=dict)
    sync: dict = field(default_factory=dict)


def _bit_errors(stat, xi_a, symbols, assign=None) -> np.ndarray:
    d = decide(stat, np.asarray(xi_a))
    if assign is not None:
        # unpaired intervals have no decision and default to 0
        full = np.zeros((d.shape[0], len(symbols)), dtype=np.int8)
        ok = assign >= 0
        full[:, ok] = d[:, assign[ok]]
        d = full
    return np.count_nonzero(d != symbols[None, :], axis=1).astype(np.int64)


def run_block(cfg: ExperimentConfig, block: int) -> BlockResult:
    try:
        return _run_block(cfg, block)
    except Exception as exc:
        raise BlockError(block, exc) from exc


def _run_block(cfg: ExperimentConfig, block: int) -> BlockResult:
    tl, grid, _, tr = simulate_block(cfg, block)
    spec = cfg.spec
    out = BlockResult(block)

    def score(scheme, result, xi_b=None, assign=None):
        iv = intervals_from_sync(result, spec, grid)
        means, peaks = interval_statistics(tr.r_a, iv)
        for det in cfg.detectors:
            stat = means if det == "mean" else peaks
            out.ber[(scheme, det, xi_b)] = _bit_errors(stat, cfg.xi_a[det], tl.symbols, assign)
        out.bits[scheme] = spec.K

    for scheme in cfg.schemes:
        if scheme == "perfect":
            score("perfect", perfect_sync(tl.starts, grid.dt))
        elif scheme == "ml":
            if block >= cfg.ml_blocks:
                continue
            res = ml_synchronize(tr, spec, cfg.model_b, cfg.ml, tl.starts)
            out.sync[("ml", None)] = start_error_stats(res.starts, tl.starts, spec)
            score("ml", res)
        elif scheme == "po":
            po = po_config_from_model(cfg.model_b, cfg.po_genie)
            res = po_synchronize(tr, spec, po.t_p, po.genie, tl.starts)
            out.sync[("po", None)] = start_error_stats(res.starts, tl.starts, spec)
            score("po", res)
        elif scheme == "tt":
            for tt in cfg.tt_configs():
                res = tt_synchronize(tr, tt)
                stats, assign = zone_error_stats(res.zone_times[:, 0], tl.starts, spec)
                out.sync[("tt", tt.xi_b)] = stats
                score("tt", res, tt.xi_b, assign)
    return out


@dataclass
class SweepResult:
    """Merged block results over the full (scheme, detector, xi_b, xi_a) grid."""

    cfg: ExperimentConfig
    blocks: dict = field(default_factory=dict)
    bits: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    sync: dict = field(default_factory=dict)

    def add(self, br: BlockResult):
        for s, b in br.bits.items():
            self.bits[s] = self.bits.get(s, 0) + b
            self.blocks[s] = self.blocks.get(s, 0) + 1
        for key, e in br.ber.items():
            self.errors[key] = self.errors[key] + e if key in self.errors else e.copy()
        for key, st in br.sync.items():
            self.sync[key] = self.sync[key].merge(st) if key in self.sync else st

    def cells(self):
        """Yield ``(scheme, detector, xi_b, xi_a, BerStats)`` for every cell."""
        for (scheme, det, xi_b), errs in sorted(self.errors.items(), key=_cell_order):
            for xa, e in zip(self.cfg.xi_a[det], errs):
                yield scheme, det, xi_b, xa, BerStats(int(e), self.bits[scheme])

    def ber_curve(self, scheme, detector, xi_b=None) -> np.ndarray:
        return self.errors[(scheme, detector, xi_b)] / self.bits[scheme]

    def best(self, scheme, detector, xi_b=None):
        """Lowest-BER cell; TT searches all ``xi_b`` unless one is given.

        Returns ``(xi_b, xi_a, BerStats)``; ties go to the first cell.
        """
        keys = [k for k in self.errors if k[0] == scheme and k[1] == detector
                and (xi_b is None or k[2] == xi_b)]
        if not keys:
            raise KeyError((scheme, detector, xi_b))
        best = None
        for key in sorted(keys, key=_cell_order):
            errs = self.errors[key]
            i = int(np.argmin(errs))
            if best is None or errs[i] < best[2].errors:
                best = (key[2], self.cfg.xi_a[detector][i], BerStats(int(errs[i]), self.bits[scheme]))
        return best

    def tt_min_curve(self, detector) -> tuple[list, np.ndarray]:
        """Minimum-over-``xi_a`` BER for each TT ``xi_b``."""
        xs = sorted(k[2] for k in self.errors if k[0] == "tt" and k[1] == detector)
        return xs, np.array([self.errors[("tt", detector, x)].min() / self.bits["tt"] for x in xs])


def _cell_order(item):
    key = item[0] if isinstance(item[0], tuple) else item
    scheme, det, xi_b = key
    return scheme, det, -1.0 if xi_b is None else xi_b


def _run_chunk(args):
    cfg, blocks = args
    return [run_block(cfg, b) for b in blocks]


def run_sweep(cfg: ExperimentConfig, blocks: int | None = None, workers: int | None = None) -> SweepResult:
    """Evaluate every sweep cell over ``blocks`` blocks.

    Blocks are merged in index order, so the result does not depend on the
    number of workers.
    """
    n = cfg.blocks if blocks is None else blocks
    workers = cfg.workers if workers is None else workers
    res = SweepResult(cfg)
    if workers <= 1 or n < 2:
        for b in range(n):
            res.add(run_block(cfg, b))
        return res
    chunks = [list(c) for c in np.array_split(np.arange(n), min(n, 4 * workers)) if len(c)]
    with ProcessPoolExecutor(workers) as pool:
        for part in pool.map(_run_chunk, [(cfg, [int(b) for b in c]) for c in chunks]):
            for br in part:
                res.add(br)
    return res


# ---------------------------------------------------------------- output files

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.10g}"


def write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else _fmt(v) for v in row])


def write_ber_csv(path, res: SweepResult):
    rows = []
    for scheme, det, xi_b, xa, st in res.cells():
        lo, hi = st.wilson
        rows.append((scheme, det, xi_b, xa, st.errors, st.bits, st.ber, lo, hi))
    write_rows(path, ["scheme", "detector", "xi_b", "xi_a", "errors", "bits", "ber", "ci_low", "ci_high"], rows)


def write_best_csv(path, res: SweepResult):
    rows = []
    for scheme in res.cfg.schemes:
        if scheme not in res.bits:
            continue
        for det in res.cfg.detectors:
            xi_b, xa, st = res.best(scheme, det)
            lo, hi = st.wilson
            rows.append((scheme, det, xi_b, xa, st.errors, st.bits, st.ber, lo, hi))
    write_rows(path, ["scheme", "detector", "xi_b", "xi_a", "errors", "bits", "ber", "ci_low", "ci_high"], rows)


def write_sync_csv(path, res: SweepResult):
    rows = []
    for (scheme, xi_b), st in sorted(res.sync.items(), key=lambda kv: (kv[0][0], kv[0][1] or -1.0)):
        frac = st.fraction_beyond(0.5)
        k = int(round(frac * st.scored)) if st.scored else 0
        lo, hi = wilson_interval(k, st.scored)
        rows.append((scheme, xi_b, st.scored, st.deletions, st.insertions, st.zones,
                     float(np.mean(st.errors)) if st.scored else float("nan"), frac, lo, hi))
    write_rows(path, ["scheme", "xi_b", "scored", "deletions", "insertions", "zones",
                      "mean_error", "frac_abs_gt_0.5", "ci_low", "ci_high"], rows)


def write_histogram_csv(path, stats: SyncErrorStats, bin_width: float = 0.05):
    centers, density, _ = stats.histogram(bin_width)
    write_rows(path, ["bin_center", "density"], zip(centers, density))


def git_describe() -> str:
    try:
        here = Path(__file__).resolve().parent
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"], cwd=here,
                             capture_output=True, text=True, timeout=10)
        return out.stdout.strip() or "unknown"
    except (OSError, subprocess.SubprocessError):
        return "unknown"


def write_manifest(out_dir, cfg: ExperimentConfig, wall_time: float, files, extra=None):
    """Run manifest. Kept separate from the CSVs, which stay byte-reproducible."""
    doc = {
        "config": cfg.raw,
        "seed": cfg.seed,
        "git_describe": git_describe(),
        "wall_time_s": round(wall_time, 3),
        "backend": kernels.BACKEND,
        "files": sorted(str(f) for f in files),
    }
    if extra:
        doc.update(extra)
    path = Path(out_dir) / "manifest.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n")
    return path


def write_sweep_outputs(out_dir, res: SweepResult) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = [out / "ber.csv", out / "best.csv", out / "sync_errors.csv"]
    write_ber_csv(files[0], res)
    write_best_csv(files[1], res)
    write_sync_csv(files[2], res)
    for (scheme, xi_b), st in sorted(res.sync.items(), key=lambda kv: (kv[0][0], kv[0][1] or -1.0)):
        name = f"hist_{scheme}.csv" if xi_b is None else f"hist_{scheme}_xib{_fmt(xi_b)}.csv"
        write_histogram_csv(out / name, st, res.cfg.hist_bin)
        files.append(out / name)
    (out / "config.yaml").write_text(yaml.safe_dump(res.cfg.raw, sort_keys=True))
    files.append(out / "config.yaml")
    return files


def simulate(cfg: ExperimentConfig, out_dir, blocks: int | None = None) -> SweepResult:
    """Run a sweep and write every output file plus the manifest."""
    t0 = time.perf_counter()
    res = run_sweep(cfg, blocks)
    files = write_sweep_outputs(out_dir, res)
    write_manifest(out_dir, cfg, time.perf_counter() - t0, [os.path.basename(f) for f in files],
                   {"blocks": dict(res.blocks)})
    return res
