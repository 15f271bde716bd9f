"""Charting for matching-bandit experiment aggregates.

Reads the experiment runner's aggregate CSV schema (algorithm, local_round,
mean_optimal, std_optimal, mean_pessimal, std_pessimal) and renders regret
comparison charts: one line per input file, mean cumulative regret versus
local round, shaded by one across-instance standard deviation.
"""

from regretplots.render import AggregateCsvError, PlotSpec, load_series, render

__all__ = ["AggregateCsvError", "PlotSpec", "load_series", "render"]
