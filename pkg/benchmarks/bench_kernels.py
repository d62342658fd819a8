"""Compiled vs pure-Python kernels on one default-sized block (50 symbols).

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np
from scipy.special import gammaln

from mcsync import _kernels_py
from mcsync.config import ExperimentConfig
from mcsync.harness import simulate_block

try:
    from mcsync import _kernels
except ImportError:  # extension not built
    _kernels = None


def workload(seed=1):
    cfg = ExperimentConfig.from_dict({"run": {"seed": seed}})
    tl, grid, _, tr = simulate_block(cfg, 0)
    r = np.ascontiguousarray(tr.r_b, dtype=np.int64)
    lnfact = gammaln(r + 1.0)
    w = int(round(cfg.ml.t_ow / grid.dt)) + 1
    pulse = np.ascontiguousarray(cfg.model_b(np.arange(w) * grid.dt))
    base = np.full(grid.n, cfg.model_b.noise)
    # one search set per symbol, as in a full ML pass
    spans = [(grid.index_at_or_after(s + cfg.spec.t_min), grid.index_at_or_before(s + cfg.spec.t_max))
             for s in tl.starts[:-1]]
    return r, lnfact, base, pulse, spans


def run_ml(mod, r, lnfact, base, pulse, spans):
    for lo, hi in spans:
        mod.ml_scan(r, lnfact, base, pulse, lo, hi)


def run_tt(mod, r):
    for xi in range(4, 31):
        mod.tt_scan(r, float(xi), 80)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    r, lnfact, base, pulse, spans = workload()
    mods = [("python", _kernels_py)] + ([("cython", _kernels)] if _kernels else [])
    print(f"{'kernel':22s}" + "".join(f"{name:>12s}" for name, _ in mods))
    for label, fn in (("ml_scan (1 block)", lambda m: run_ml(m, r, lnfact, base, pulse, spans)),
                      ("tt_scan (27 xi_b)", lambda m: run_tt(m, r))):
        times = [min(timeit.repeat(lambda: fn(m), number=1, repeat=args.repeat)) for _, m in mods]
        print(f"{label:22s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
              + (f"   speedup {times[0] / times[1]:.1f}x" if len(times) > 1 else ""))


if __name__ == "__main__":
    main()
