"""Render PNGs from the CSVs written by ``mcsync figure``.

    mcsync figure fig6a --out out/fig6a
    python scripts/plot_figures.py fig6a out/fig6a

Needs matplotlib (``pip install -e .[plot]``). Not used by the library.
"""

import argparse
import csv
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def col(rows, key):
    return [float(r[key]) for r in rows]


def trace(d: Path, ax):
    rows = read(d / "trace.csv")
    t = [x * 1e3 for x in col(rows, "t_n")]
    ax.plot(t, col(rows, "r_B"), lw=0.6, label="r_B")
    ax.plot(t, col(rows, "rbar_B"), lw=1.2, label="mean B")
    ax.set_xlabel("t [ms]")
    ax.legend()
    return rows


def plot_trace_figure(name, d, out):
    fig, axes = plt.subplots(2 if name == "fig3" else 1, 1, figsize=(8, 6 if name == "fig3" else 3.5),
                             squeeze=False)
    ax = axes[0, 0]
    trace(d, ax)
    starts = read(d / "starts.csv")
    for r in starts:
        ax.axvline(float(r["t_true"]) * 1e3, color="k", ls=":", lw=0.8)
        if "t_est" in r:
            ax.axvline(float(r["t_est"]) * 1e3, color="r", ls="--", lw=0.8)
    if name == "fig5":
        for z in read(d / "zones.csv"):
            ax.axvspan(float(z["t_start"]) * 1e3, float(z["t_end"]) * 1e3, color="g", alpha=0.15)
    if name == "fig3":
        by_k = defaultdict(list)
        for r in read(d / "ml_metric.csv"):
            by_k[r["symbol"]].append((float(r["t_hyp"]) * 1e3, float(r["log_likelihood"])))
        for k, pts in by_k.items():
            axes[1, 0].plot(*zip(*pts), label=f"symbol {k}")
        axes[1, 0].set_xlabel("hypothesis t [ms]")
        axes[1, 0].set_ylabel("log-likelihood")
        axes[1, 0].legend()
    fig.tight_layout()
    fig.savefig(out)


def plot_hist(d, out):
    fig, ax = plt.subplots(figsize=(7, 4))
    for f in sorted(d.glob("hist_*.csv")):
        rows = read(f)
        ax.step(col(rows, "bin_center"), col(rows, "density"), where="mid", label=f.stem[5:])
    ax.set_xlabel("normalized synchronization error")
    ax.set_ylabel("density")
    ax.set_xlim(-0.6, 0.6)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out)


def plot_curves(name, d, out):
    rows = read(d / "curves.csv")
    fig, ax = plt.subplots(figsize=(7, 4))
    series = defaultdict(list)
    if name == "fig7":
        for r in rows:
            series[f"{r['detector']} xi_a={r['xi_a']}"].append((float(r["xi_b"]), float(r["ber"])))
        ax.set_xlabel("xi_B")
    elif name == "fig8":
        for r in rows:
            series[f"{r['scheme']} {r['detector']}"].append((float(r["xi_a"]), float(r["ber"])))
        ax.set_xlabel("xi_A")
    else:
        for r in rows:
            series[f"{r['scheme']} T={r['mean_ms']} ms"].append((float(r["xi_a"]), float(r["ber"])))
        ax.set_xlabel("xi_A")
    for label, pts in series.items():
        ax.semilogy(*zip(*pts), label=label)
    ax.set_ylabel("BER")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("name")
    ap.add_argument("dir", type=Path)
    ap.add_argument("--png", type=Path)
    args = ap.parse_args()
    out = args.png or args.dir / f"{args.name}.png"
    if args.name in ("fig3", "fig4", "fig5"):
        plot_trace_figure(args.name, args.dir, out)
    elif args.name.startswith("fig6"):
        plot_hist(args.dir, out)
    else:
        plot_curves(args.name, args.dir, out)
    print(out)


if __name__ == "__main__":
    main()
