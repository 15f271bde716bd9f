"""
Schedules that keep greedy matchers paying
==========================================

Two availability constructions with a unique stable matching every round.
On the fresh-competitor schedule, each newcomer must re-learn its
preferences, and its exploration repeatedly bumps the resident player off
their stable arm, so the resident's regret never flattens.
"""

import numpy as np

from banditmatch.harness import simulate_trial, trial_rngs
from banditmatch.instances import (
    HardInstanceParams41,
    HardInstanceParams42,
    gen_hard_41,
    gen_hard_42,
)
from banditmatch.matching import enumerate_stable_matchings
from banditmatch.policies import make_policy
from banditmatch.regret import true_preference_instance

# Rotating variable arm: arms 0..1 always on, one of arms 2..4 per round.
# Every round has exactly one stable matching.
spec = gen_hard_42(HardInstanceParams42(n_players=3, n_arms=5, horizon=6))
for t in range(1, 4):
    stable = enumerate_stable_matchings(true_preference_instance(spec, t))
    print(f"round {t}: arms {spec.arms_at[t-1]}, stable matchings {stable}")

# The "variant" flag flips one competing player's preference toward one
# variable arm; in that arm's rounds the last player gets displaced.
flipped = gen_hard_42(HardInstanceParams42(n_players=3, n_arms=5, horizon=6, variant=(0, 3)))
stable = enumerate_stable_matchings(true_preference_instance(flipped, 2))
print("flipped variant, arm-3 round:", stable)

# Fresh-competitor blocks: player 0 is always present; each block of 100
# rounds brings a brand-new rival that both arms prefer.
params = HardInstanceParams41(horizon=10_000, exponent=0.5, gap=0.2)
spec41 = gen_hard_41(params)
L = params.resolved_block_length()
print(f"\nblock length {L}, competitors {spec41.n_players - 1}")

ledger, _ = simulate_trial(
    spec41, make_policy("ac-ucb"), *trial_rngs(42, 0, 0)
)
series = np.array(ledger.pessimal[0])
per_block = np.diff(np.concatenate([[0.0], series[np.arange(L - 1, 10_000, L)]]))
print("resident player's regret in the first five blocks:", np.round(per_block[:5], 2))
print("... and in the last five blocks:              ", np.round(per_block[-5:], 2))
print("each fresh rival restarts the bleeding; the per-block cost never decays.")
