"""``plot`` command: render a regret-comparison chart.

Either point at a TOML plot spec::

    plot --spec chart.toml

with keys ``csv`` (list of paths), ``labels`` (list), ``out``, and optional
``kind`` ("optimal" | "pessimal") and ``title``; or pass everything as flags::

    plot --csv a.csv --label random --csv b.csv --label weighted \
         --kind optimal --out fig.png

Exit codes: 0 success, 1 bad spec/input, 2 unexpected failure.
"""

from __future__ import annotations

import argparse
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from regretplots.render import AggregateCsvError, PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plot", description=__doc__.splitlines()[0])
    parser.add_argument("--spec", help="TOML plot spec path")
    parser.add_argument("--csv", action="append", default=[], help="aggregate CSV (repeatable)")
    parser.add_argument("--label", action="append", default=[], help="series label (repeatable)")
    parser.add_argument("--kind", choices=("optimal", "pessimal"), default="optimal")
    parser.add_argument("--out", help="output PNG path")
    parser.add_argument("--title", default="")
    return parser


def spec_from_toml(path: str) -> PlotSpec:
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    unknown = set(doc) - {"csv", "labels", "out", "kind", "title"}
    if unknown:
        raise AggregateCsvError(f"unknown plot spec key(s): {sorted(unknown)}")
    return PlotSpec(
        csv_paths=list(doc.get("csv", [])),
        labels=list(doc.get("labels", [])),
        out_path=doc.get("out", ""),
        kind=doc.get("kind", "optimal"),
        title=doc.get("title", ""),
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.spec:
            if args.csv or args.label or args.out:
                print("use either --spec or the flag form, not both", file=sys.stderr)
                return 1
            spec = spec_from_toml(args.spec)
        else:
            spec = PlotSpec(
                csv_paths=args.csv,
                labels=args.label,
                out_path=args.out or "",
                kind=args.kind,
                title=args.title,
            )
        path = render(spec)
    except (AggregateCsvError, FileNotFoundError) as exc:
        print(f"plot error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"plot failed: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
