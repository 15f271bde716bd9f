"""
Stable matching in one sitting
==============================

Build a capacity-aware matching instance, run both proposal algorithms,
certify stability, and cross-check against the brute-force oracle.
"""

from banditmatch.matching import (
    MatchInstance,
    arm_proposing_gs,
    enumerate_stable_matchings,
    find_blocking_pairs,
    find_blocking_triplets,
    player_proposing_gs,
)

# A classic tension: each player's favorite arm favors the other player.
inst = MatchInstance(
    players=(0, 1),
    arms=(0, 1),
    player_prefs={0: (0, 1), 1: (1, 0)},
    arm_prefs={0: (1, 0), 1: (0, 1)},
    capacities={0: 1, 1: 1},
)
print(inst.render())

# Player-proposing deferred acceptance returns the player-optimal stable
# matching; the arm-proposing dual returns the player-pessimal one.
best = player_proposing_gs(inst)
worst = arm_proposing_gs(inst)
print("player-optimal:", best)
print("player-pessimal:", worst)

# The oracle enumerates every stable matching; here the lattice has exactly
# the two endpoints above.
print("all stable matchings:", enumerate_stable_matchings(inst))

# Break stability on purpose; the report names the pair, and the triplet
# form adds the player's current arm (None means unmatched).
print("blocking pairs of the pessimal matching:", find_blocking_pairs(inst, worst))
print("blocking triplets after unmatching player 1:", find_blocking_triplets(inst, {0: 0, 1: None}))

# Capacities make arms hold several players at once: one arm with two seats
# takes both proposers.
wide = MatchInstance(
    players=(0, 1),
    arms=(0,),
    player_prefs={0: (0,), 1: (0,)},
    arm_prefs={0: (1, 0)},
    capacities={0: 2},
)
print("two seats, one arm:", player_proposing_gs(wide))
