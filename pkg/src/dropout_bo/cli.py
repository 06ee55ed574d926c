"""Command-line harness: run experiments, compare algorithms, list registries.

Exit codes: 0 success, 1 configuration error, 2 runtime/objective error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from ._backend import backend_name
from .dropout import ObjectiveError
from .harness import (
    ALGORITHMS,
    ConfigError,
    emit_plot_data,
    emit_runs_csv,
    emit_summary_csv,
    parse_config,
    points_path,
    run_experiment,
    summarize,
)
from .objectives import OBJECTIVES


class _Parser(argparse.ArgumentParser):
    # usage problems are configuration errors -> exit code 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_overrides(sub):
    sub.add_argument("--seed", type=int, default=None, help="override base_seed")
    sub.add_argument("--reps", type=int, default=None, help="override replications")
    sub.add_argument("--iters", type=int, default=None, help="override iterations")


def _overrides(args) -> dict:
    out = {}
    if args.seed is not None:
        out["base_seed"] = args.seed
    if args.reps is not None:
        out["replications"] = args.reps
    if args.iters is not None:
        out["iterations"] = args.iters
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dropout-bo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one experiment, write CSVs")
    p_run.add_argument("--config", required=True, help="flat key=value config file")
    _add_overrides(p_run)

    p_cmp = sub.add_parser("compare", help="run several configs, emit joint plot data")
    p_cmp.add_argument("--configs", nargs="+", required=True)
    p_cmp.add_argument("--out", required=True, help="output directory")
    _add_overrides(p_cmp)

    sub.add_parser("list", help="print objective and algorithm registries")
    return parser


def _summary_line(name: str, records) -> str:
    curve = summarize(records)
    return (
        f"{name}: {len(records)} runs, final best "
        f"{curve.mean[-1]:.6g} +- {curve.stderr[-1]:.2g}"
    )


def cmd_run(args) -> int:
    cfg = parse_config(args.config, _overrides(args))
    records = run_experiment(cfg)
    emit_runs_csv(records, cfg.output)
    summary_path = points_path(cfg.output).replace(".points.csv", ".summary.csv")
    emit_summary_csv(summarize(records), summary_path)
    print(_summary_line(cfg.name, records))
    print(f"wrote {cfg.output}, {points_path(cfg.output)}, {summary_path}")
    return 0


def cmd_compare(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    curves = {}
    for path in args.configs:
        cfg = parse_config(path, _overrides(args))
        records = run_experiment(cfg)
        label = cfg.algorithm or cfg.name
        stem = os.path.join(args.out, label.replace("/", "-"))
        emit_runs_csv(records, f"{stem}.csv")
        curve = summarize(records)
        emit_summary_csv(curve, f"{stem}.summary.csv")
        if label in curves:
            raise ConfigError(f"duplicate algorithm label {label!r} in comparison")
        curves[label] = curve
        print(_summary_line(label, records))
    joint = os.path.join(args.out, "comparison.csv")
    emit_plot_data(curves, joint)
    print(f"wrote {joint}")
    return 0


def cmd_list() -> int:
    print("objectives:")
    for name in sorted(OBJECTIVES):
        print(f"  {name}")
    print("algorithms:")
    for name in sorted(ALGORITHMS):
        print(f"  {name}")
    print(f"backend: {backend_name()}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "compare":
            return cmd_compare(args)
        return cmd_list()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (ObjectiveError, RuntimeError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
