"""Command-line entry point.

Subcommands: ``run`` (execute a config file), ``validate`` (schema-check a
config file), ``list-generators``. Exit codes: 0 success, 1 config error,
2 runtime error.
"""

from __future__ import annotations

import argparse
import sys

from banditmatch import harness


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="banditmatch",
        description="Matching-market bandit experiment runner",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("--config", required=True, help="TOML config path")
    p_run.add_argument("--out", help="output directory (overrides config)")
    p_run.add_argument("--seed", type=int, help="master seed (overrides config)")
    p_run.add_argument(
        "--threads",
        type=int,
        help=f"worker count (overrides config and ${harness.THREADS_ENV_VAR})",
    )

    p_val = sub.add_parser("validate", help="check a config and list violations")
    p_val.add_argument("--config", required=True, help="TOML config path")

    sub.add_parser("list-generators", help="describe the named instance generators")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-generators":
        print(harness.list_generators())
        return 0

    try:
        config = harness.load_config(args.config)
    except FileNotFoundError:
        print(f"config not found: {args.config}", file=sys.stderr)
        return 1
    except harness.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    if args.command == "validate":
        errors = harness.validate_config(config)
        if errors:
            for err in errors:
                print(f"config error: {err}", file=sys.stderr)
            return 1
        print("ok")
        return 0

    if args.seed is not None:
        config.seed = args.seed
    errors = harness.validate_config(config)
    if errors:
        for err in errors:
            print(f"config error: {err}", file=sys.stderr)
        return 1
    try:
        result = harness.run(config, out_dir=args.out, threads=args.threads)
    except harness.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"run failed: {exc}", file=sys.stderr)
        return 2
    for algorithm, path in sorted(result.aggregate_paths.items()):
        print(f"wrote {path}")
    if result.raw_path:
        print(f"wrote {result.raw_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
