"""Command-line entry point: run <config> | metrics <dir> | front ... | validate <config>."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .harness import ConfigError, parse_config, recompute_metrics, run_batch
from .problems import sample_reference_front


def _cmd_run(args) -> int:
    config = parse_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.snapshot_every is not None:
        overrides["snapshot_every"] = args.snapshot_every
    if args.output_dir is not None:
        overrides["output_dir"] = args.output_dir
    if overrides:
        config = replace(config, **overrides)
    run_batch(config)
    print(f"batch complete; outputs under {config.output_dir}")
    return 0


def _cmd_metrics(args) -> int:
    for line in recompute_metrics(args.manifest_dir):
        print(line)
    return 0


def _cmd_front(args) -> int:
    front = sample_reference_front(args.problem, args.m, args.count)
    lines = [",".join(f"{v:.9e}" for v in point) for point in front.points]
    Path(args.out).write_text("\n".join([",".join(f"f{i + 1}" for i in range(front.m))] + lines) + "\n")
    print(f"wrote {front.count} front points to {args.out}")
    return 0


def _cmd_validate(args) -> int:
    config = parse_config(args.config)
    print(f"ok: {len(config.problems)} problem(s), {len(config.algorithms)} algorithm(s), "
          f"n_r={config.n_r}, seed_policy={config.seed_policy}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lmomcts",
        description="Tree-search large-scale multiobjective optimizer and experiment harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a batch of seeded runs")
    p_run.add_argument("config")
    p_run.add_argument("--seed", type=int, default=None, help="override master seed")
    p_run.add_argument("--workers", type=int, default=None, help="parallel run workers")
    p_run.add_argument("--snapshot-every", type=int, default=None,
                       help="trace granularity in evaluations")
    p_run.add_argument("--output-dir", default=None, help="override output directory")
    p_run.set_defaults(func=_cmd_run)

    p_metrics = sub.add_parser("metrics", help="recompute batch metrics from stored per-run CSVs")
    p_metrics.add_argument("manifest_dir")
    p_metrics.set_defaults(func=_cmd_metrics)

    p_front = sub.add_parser("front", help="export a reference front as CSV")
    p_front.add_argument("problem")
    p_front.add_argument("m", type=int)
    p_front.add_argument("count", type=int)
    p_front.add_argument("out")
    p_front.set_defaults(func=_cmd_front)

    p_validate = sub.add_parser("validate", help="parse and validate a config file")
    p_validate.add_argument("config")
    p_validate.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
