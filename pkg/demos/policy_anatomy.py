"""
Inside the policies
===================

Confidence indices, the interval-separation test that switches
explore-then-match into exploitation, and the two exploration schemes.
"""

import numpy as np

from banditmatch.environment import RoundView, make_rng
from banditmatch.policies import (
    PolicyState,
    ac_etgs_round,
    ac_ucb_round,
    explore_uniform,
    explore_weighted,
    indices,
    separation_check,
    update,
)

rv = RoundView(
    t=1,
    players=(0, 1),
    arms=(0, 1, 2),
    arm_prefs={a: (0, 1) for a in (0, 1, 2)},
    capacities={a: 1 for a in (0, 1, 2)},
)

# A fresh state knows nothing: indices are infinite so every arm gets tried,
# and the explore-then-match policy necessarily explores.
state = PolicyState.fresh(2, 3)
print("unexplored index pair:", indices(state, 0, 0))
print("cold-start mode:", ac_etgs_round(state, rv, make_rng(0)).mode)

# Feed a few hundred observations and the intervals tighten around the true
# means; once every present player's arms separate, the policy exploits.
rng = make_rng(1)
mu = np.array([[0.8, 0.5, 0.2], [0.2, 0.5, 0.8]])
for _ in range(600):
    matching = explore_uniform(rv, rng)
    rewards = {p: (0 if a is None else int(rng.random() < mu[p][a])) for p, a in matching.items()}
    update(state, rv, matching, rewards)
print("separated after 600 random rounds:", separation_check(state, rv))
decision = ac_etgs_round(state, rv, rng)
print("mode:", decision.mode, "matching:", decision.matching)

# The confidence-bound matcher never switches modes; it feeds index-sorted
# rankings straight into deferred acceptance every round.
print("index matcher rankings:", ac_ucb_round(state, rv).rankings)

# Uniform exploration spreads samples blindly; weighted exploration solves a
# max-weight assignment with weight 1/(count+1), chasing the rarest pairs.
state.counts = [[40, 2, 40], [40, 40, 1]]
print("weighted exploration picks the starved pairs:", explore_weighted(rv, state))
tallies = np.zeros((2, 3), dtype=int)
for _ in range(2000):
    m = explore_uniform(rv, rng)
    for p, a in m.items():
        if a is not None:
            tallies[p][a] += 1
print("uniform exploration pair counts over 2000 rounds:\n", tallies)
