"""Command line entry point: ``mcsync {simulate,sweep,figure,validate}``."""

from __future__ import annotations

import argparse
import sys

import yaml

from .config import ConfigError, ExperimentConfig
from .figures import FIGURES, reproduce_figure
from .harness import BlockError, simulate


def _load(args) -> ExperimentConfig:
    doc = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            doc = yaml.safe_load(fh) or {}
    run = doc.setdefault("run", {})
    if getattr(args, "seed", None) is not None:
        run["seed"] = args.seed
    if getattr(args, "blocks", None) is not None:
        run["blocks"] = args.blocks
    if getattr(args, "ml_blocks", None) is not None:
        run["ml_blocks"] = args.ml_blocks
    if getattr(args, "workers", None) is not None:
        run["workers"] = args.workers
    for item in getattr(args, "set", None) or []:
        key, _, value = item.partition("=")
        node = doc
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
        node[parts[-1]] = yaml.safe_load(value)
    return ExperimentConfig.from_dict(doc)


def _run_args(p, config_required=True):
    p.add_argument("--config", required=config_required, help="YAML experiment file")
    p.add_argument("--blocks", type=int, help="number of blocks")
    p.add_argument("--ml-blocks", type=int, dest="ml_blocks", help="blocks that also run ML")
    p.add_argument("--seed", type=int, help="base seed")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a config entry, e.g. --set tt.xi_b=[10,12,14]")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mcsync", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Monte Carlo run of one configuration")
    _run_args(p)
    p.add_argument("--out", default="out", help="output directory")

    p = sub.add_parser("sweep", help="threshold sweep; same outputs as simulate")
    _run_args(p)
    p.add_argument("--out", default="out", help="output directory")

    p = sub.add_parser("figure", help="write the CSVs of one figure")
    p.add_argument("name", choices=sorted(FIGURES))
    _run_args(p, config_required=False)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("validate", help="check a configuration and print it resolved")
    p.add_argument("--config", required=True)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            cfg = _load(args)
            print(yaml.safe_dump(cfg.raw, sort_keys=True), end="")
            print("config OK", file=sys.stderr)
            return 0
        cfg = _load(args)
        if args.command in ("simulate", "sweep"):
            res = simulate(cfg, args.out)
            for scheme in cfg.schemes:
                if scheme not in res.bits:
                    continue
                for det in cfg.detectors:
                    xi_b, xa, st = res.best(scheme, det)
                    tag = f" xi_b={xi_b:g}" if xi_b is not None else ""
                    print(f"{scheme:8s} {det:5s}{tag} xi_a={xa:g} BER={st.ber:.3e} ({st.errors}/{st.bits})")
        else:
            blocks = args.blocks if args.blocks is not None else None
            for f in reproduce_figure(args.name, args.out, cfg, blocks):
                print(f)
    except (ConfigError, BlockError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
