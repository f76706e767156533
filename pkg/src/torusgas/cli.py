"""Command-line entry point for the experiment runners.

Each subcommand names an experiment; a JSON config may override the
defaults, and the common flags select the output directory, the base
seed, and the worker-thread count.  The process exits 0 exactly when the
experiment's verdict is a pass.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import lab

_SUBCOMMANDS = {name.replace("_", "-"): name for name in lab.EXPERIMENTS}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torusgas",
        description=(
            "Numerical laboratory for a periodic compressible gas flow: "
            "scaling studies and the nonuniform-dependence experiment."
        ),
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config", metavar="PATH", help="JSON file with experiment parameters"
    )
    common.add_argument(
        "--out", metavar="DIR", help="directory for the CSV and summary.json"
    )
    common.add_argument("--seed", type=int, help="base seed for random families")
    common.add_argument("--threads", type=int, help="worker threads for sweeps")
    subparsers = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "nonuniform": "shrinking initial distances against persistent separation",
        "residue-scaling": "norm decay of the family residue",
        "error-scaling": "distance of evolved runs to the approximate family",
        "exact-check": "propagation accuracy on the exact family",
        "higher-norm": "growth of the above-regularity norm",
        "inequalities": "seeded sweeps of the inequality toolbox",
    }
    for command in _SUBCOMMANDS:
        subparsers.add_parser(
            command, parents=[common], help=descriptions[command]
        )
    return parser


def _load_config(args: argparse.Namespace) -> lab.ExperimentConfig:
    experiment = _SUBCOMMANDS[args.command]
    if args.config:
        with open(args.config, "r", encoding="utf-8") as handle:
            data = json.load(handle)
        cfg = lab.config_from_dict(data, experiment)
    else:
        cfg = lab.default_config(experiment)
    overrides = {}
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.threads is not None:
        overrides["threads"] = args.threads
    return replace(cfg, **overrides) if overrides else cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = _load_config(args)
    report = lab.run_experiment(cfg)
    summary = report.summary()
    verdict = "PASS" if summary["pass"] else "FAIL"
    line = f"{summary['experiment']}: {verdict}"
    if "fitted_slope" in summary:
        line += (
            f" (fitted slope {summary['fitted_slope']:+.4f}, "
            f"predicted {summary['predicted_slope']:+.4f})"
        )
    print(line)
    if cfg.output_dir:
        print(f"reports written to {cfg.output_dir}")
    return 0 if summary["pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
