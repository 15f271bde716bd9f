"""CSV parsing and chart rendering.

Rendering is deterministic: fixed figure geometry, fixed style, and PNG
metadata stripped, so identical inputs produce identical bytes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

REQUIRED_COLUMNS = (
    "algorithm",
    "local_round",
    "mean_optimal",
    "std_optimal",
    "mean_pessimal",
    "std_pessimal",
)

REGRET_KINDS = ("optimal", "pessimal")


class AggregateCsvError(ValueError):
    """An input file does not match the aggregate CSV schema."""


@dataclass
class PlotSpec:
    """One chart: a list of aggregate CSVs, one label per file, which regret
    column pair to draw, and where to write the PNG."""

    csv_paths: list
    labels: list
    out_path: str
    kind: str = "optimal"
    title: str = ""

    def validate(self) -> None:
        if not self.csv_paths:
            raise AggregateCsvError("at least one input CSV is required")
        if len(self.labels) != len(self.csv_paths):
            raise AggregateCsvError(
                f"{len(self.csv_paths)} CSV path(s) but {len(self.labels)} label(s)"
            )
        if self.kind not in REGRET_KINDS:
            raise AggregateCsvError(f"kind must be one of {REGRET_KINDS}")
        if not self.out_path:
            raise AggregateCsvError("an output path is required")


@dataclass
class Series:
    rounds: list
    mean: list
    std: list
    algorithm: str


def load_series(path: str, kind: str) -> Series:
    """Parse one aggregate CSV into a plottable series."""
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise AggregateCsvError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing:
            raise AggregateCsvError(f"{path}: missing column(s) {missing}")
        rounds, mean, std = [], [], []
        groups = set()
        for row in reader:
            groups.add((row["algorithm"], row.get("player", "")))
            try:
                rounds.append(int(row["local_round"]))
                mean.append(float(row[f"mean_{kind}"]))
                std.append(float(row[f"std_{kind}"]))
            except (TypeError, ValueError) as exc:
                raise AggregateCsvError(f"{path}: malformed row {row}") from exc
    if not rounds:
        raise AggregateCsvError(f"{path}: no data rows")
    if len(groups) > 1:
        raise AggregateCsvError(
            f"{path}: multiple series in one file {sorted(groups)}; plot one per file"
        )
    return Series(rounds=rounds, mean=mean, std=std, algorithm=next(iter(groups))[0])


def render(spec: PlotSpec) -> str:
    """Draw the comparison chart and write the PNG; returns the output path."""
    spec.validate()
    series = [load_series(path, spec.kind) for path in spec.csv_paths]
    axis = series[0].rounds
    for s, path in zip(series, spec.csv_paths):
        if s.rounds != axis:
            raise AggregateCsvError(
                f"{path}: round axis differs from {spec.csv_paths[0]}"
            )

    fig, ax = plt.subplots(figsize=(7.0, 4.5), dpi=120)
    for s, label in zip(series, spec.labels):
        ax.plot(s.rounds, s.mean, label=label, linewidth=1.6)
        lower = [m - d for m, d in zip(s.mean, s.std)]
        upper = [m + d for m, d in zip(s.mean, s.std)]
        ax.fill_between(s.rounds, lower, upper, alpha=0.2, linewidth=0)
    ax.set_xlabel("local round")
    ax.set_ylabel(f"cumulative {spec.kind} stable regret")
    if spec.title:
        ax.set_title(spec.title)
    ax.legend(loc="upper left")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(spec.out_path, format="png", metadata={"Software": None})
    plt.close(fig)
    return spec.out_path
