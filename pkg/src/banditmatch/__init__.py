"""banditmatch: bandit learning in two-sided matching markets whose players,
arms, arm preferences, and capacities can change from round to round.

Subpackages by layer:

* ``matching``    stable-matching engine (deferred acceptance, stability
  certification, brute-force oracle)
* ``environment`` ground-truth market description and Bernoulli reward model
* ``policies``    platform-side learning policies (confidence-bound matching
  and explore-then-match, with uniform or weighted exploration)
* ``regret``      per-round stable baselines, regret ledgers, diagnostics
* ``instances``   problem-instance generators (randomized experiment family
  and adversarial availability schedules)
* ``harness``     experiment orchestration, aggregation, CSV emission
"""

from banditmatch.matching import (
    MatchInstance,
    UNMATCHED,
    arm_proposing_gs,
    enumerate_stable_matchings,
    find_blocking_pairs,
    find_blocking_triplets,
    player_proposing_gs,
)
from banditmatch.environment import EnvironmentSpec, local_clock, make_rng, min_gap, step, view

__all__ = [
    "MatchInstance",
    "UNMATCHED",
    "arm_proposing_gs",
    "enumerate_stable_matchings",
    "find_blocking_pairs",
    "find_blocking_triplets",
    "player_proposing_gs",
    "EnvironmentSpec",
    "local_clock",
    "make_rng",
    "min_gap",
    "step",
    "view",
]
