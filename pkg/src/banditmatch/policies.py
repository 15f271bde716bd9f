"""Platform-side learning policies.

Two families, both centralized and aware of per-round availability:

* confidence-bound matching ("ac-ucb"): every round, rank each present
  player's available arms by upper confidence index and run player-proposing
  deferred acceptance against the arms' true rankings and capacities.
* explore-then-match ("ac-etgs-random" / "ac-etgs-weighted"): match randomly
  (uniform or count-weighted) until every present player's available arms are
  pairwise separated by their confidence intervals, then exploit with the
  same deferred-acceptance step.

Index convention for player i at local round t_i with T_ij prior matches on
arm j: ucb/lcb = mean_ij +/- sqrt(log(t_i) / T_ij), natural log, and
(+inf, -inf) while T_ij = 0 so that every arm gets tried.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from banditmatch.environment import RoundView
from banditmatch.matching import MatchInstance, UNMATCHED, player_proposing_gs

MODE_UCB_GS = "ucb-gs"
MODE_EXPLOIT = "exploit"
MODE_EXPLORE = "explore"

EXPLORATION_MODES = ("uniform", "weighted")


class IndexPair(NamedTuple):
    ucb: float
    lcb: float


@dataclass
class PolicyState:
    """Per-(player, arm) match counts and empirical means, plus each player's
    local round counter (rounds attended so far + 1).

    Stored as plain nested lists; the simulation loop reads and writes single
    cells millions of times and ndarray scalar access is several times slower.
    Use ``counts_matrix``/``means_matrix`` for array views.
    """

    counts: list[list[int]]
    means: list[list[float]]
    local_rounds: list[int]

    @classmethod
    def fresh(cls, n_players: int, n_arms: int) -> "PolicyState":
        return cls(
            counts=[[0] * n_arms for _ in range(n_players)],
            means=[[0.0] * n_arms for _ in range(n_players)],
            local_rounds=[1] * n_players,
        )

    @property
    def n_players(self) -> int:
        return len(self.counts)

    @property
    def n_arms(self) -> int:
        return len(self.counts[0]) if self.counts else 0

    def counts_matrix(self) -> np.ndarray:
        return np.array(self.counts, dtype=np.int64)

    def means_matrix(self) -> np.ndarray:
        """Empirical means; entries with zero count are 0.0 placeholders."""
        return np.array(self.means, dtype=float)

    def copy(self) -> "PolicyState":
        return PolicyState(
            counts=[row[:] for row in self.counts],
            means=[row[:] for row in self.means],
            local_rounds=self.local_rounds[:],
        )


@dataclass
class RoundDecision:
    matching: dict
    mode: str
    rankings: dict | None = None  # per-player index-descending rankings (audit)


def confidence_radius(t_local, count: int) -> float:
    """sqrt(log t / count); +inf while the pair is unexplored."""
    if count == 0:
        return math.inf
    return math.sqrt(math.log(t_local) / count)


def indices(state: PolicyState, player: int, arm: int) -> IndexPair:
    """Confidence pair for one (player, arm) cell at the player's current
    local round."""
    count = state.counts[player][arm]
    if count == 0:
        return IndexPair(math.inf, -math.inf)
    radius = confidence_radius(state.local_rounds[player], count)
    mean = state.means[player][arm]
    return IndexPair(mean + radius, mean - radius)


def ucb_rankings(state: PolicyState, rv: RoundView) -> dict[int, tuple[int, ...]]:
    """Each present player's available arms sorted by UCB descending, ties
    broken toward the lowest arm index."""
    rankings = {}
    for i in rv.players:
        lt = math.log(state.local_rounds[i])
        counts_i = state.counts[i]
        means_i = state.means[i]
        keyed = []
        for a in rv.arms:
            c = counts_i[a]
            u = means_i[a] + math.sqrt(lt / c) if c else math.inf
            keyed.append((-u, a))
        keyed.sort()
        rankings[i] = tuple(a for _, a in keyed)
    return rankings


def _gs_decision(state: PolicyState, rv: RoundView, mode: str) -> RoundDecision:
    rankings = ucb_rankings(state, rv)
    inst = MatchInstance(
        players=rv.players,
        arms=rv.arms,
        player_prefs=rankings,
        arm_prefs=rv.arm_prefs,
        capacities=rv.capacities,
    )
    matching = player_proposing_gs(inst, validate=False)
    return RoundDecision(matching=matching, mode=mode, rankings=rankings)


def ac_ucb_round(state: PolicyState, rv: RoundView) -> RoundDecision:
    """One confidence-bound matching round: UCB-descending rankings fed into
    player-proposing deferred acceptance against the round's true arm side."""
    return _gs_decision(state, rv, MODE_UCB_GS)


def separation_check(state: PolicyState, rv: RoundView) -> bool:
    """True iff for every present player some ordering of the available arms
    has each arm's LCB strictly above the next arm's UCB. Only the UCB
    descending order can qualify, so that order is checked directly; any
    unexplored pair (infinite interval) fails the check unless the round
    offers a single arm."""
    arms = rv.arms
    if len(arms) <= 1:
        return True
    for i in rv.players:
        lt = math.log(state.local_rounds[i])
        counts_i = state.counts[i]
        means_i = state.means[i]
        bounds = []
        for a in arms:
            c = counts_i[a]
            if c == 0:
                return False
            r = math.sqrt(lt / c)
            m = means_i[a]
            bounds.append((m + r, m - r))
        bounds.sort(key=lambda b: -b[0])
        for k in range(len(bounds) - 1):
            if bounds[k][1] <= bounds[k + 1][0]:
                return False
    return True


def explore_uniform(rv: RoundView, rng: np.random.Generator) -> dict:
    """Uniformly random matching of min(|players|, |arms|) distinct pairs,
    ignoring capacities beyond one player per arm."""
    players, arms = rv.players, rv.arms
    matching = {p: UNMATCHED for p in players}
    n, k = len(players), len(arms)
    if n == 0 or k == 0:
        return matching
    if n <= k:
        for p, pos in zip(players, rng.permutation(k)[:n]):
            matching[p] = arms[pos]
    else:
        for a, pos in zip(arms, rng.permutation(n)[:k]):
            matching[players[pos]] = a
    return matching


def _lexicographic_refine(weights, assigned: list, n: int, k: int) -> None:
    # Among assignments with the same float total weight, walk toward the one
    # whose (arm per player-position, None last) vector is lexicographically
    # smallest, via weight-preserving exchanges. assigned holds arm positions.
    for _ in range(n * k + 1):
        changed = False
        taken = {a for a in assigned if a is not None}
        for i in range(n):
            ai = assigned[i]
            if ai is not None:
                for a in range(ai):  # move to a smaller-index free arm, same weight
                    if a not in taken and weights[i][a] == weights[i][ai]:
                        assigned[i] = a
                        taken.discard(ai)
                        taken.add(a)
                        ai = a
                        changed = True
                        break
            for i2 in range(i + 1, n):
                a2 = assigned[i2]
                if ai is None and a2 is not None:
                    if weights[i][a2] == weights[i2][a2]:
                        assigned[i], assigned[i2] = a2, None
                        ai = a2
                        changed = True
                elif ai is not None and a2 is not None and a2 < ai:
                    if weights[i][a2] + weights[i2][ai] == weights[i][ai] + weights[i2][a2]:
                        assigned[i], assigned[i2] = a2, ai
                        ai = a2
                        changed = True
        if not changed:
            return


def explore_weighted(rv: RoundView, state: PolicyState) -> dict:
    """Maximum-total-weight one-to-one matching of available players to
    available arms with weight 1/(count+1) per pair, so rarely sampled pairs
    are matched first. Deterministic: equal-weight optima are reduced toward
    the lexicographically smallest (player, arm) assignment by exchange
    moves (all-equal counts yield the identity-by-index matching)."""
    players, arms = rv.players, rv.arms
    matching = {p: UNMATCHED for p in players}
    n, k = len(players), len(arms)
    if n == 0 or k == 0:
        return matching
    weights = [
        [1.0 / (state.counts[p][a] + 1) for a in arms]
        for p in players
    ]
    rows, cols = linear_sum_assignment(np.array(weights), maximize=True)
    assigned: list = [None] * n
    for r, c in zip(rows, cols):
        assigned[r] = int(c)
    _lexicographic_refine(weights, assigned, n, k)
    for i, pos in enumerate(assigned):
        if pos is not None:
            matching[players[i]] = arms[pos]
    return matching


def ac_etgs_round(
    state: PolicyState,
    rv: RoundView,
    rng: np.random.Generator,
    exploration: str = "uniform",
) -> RoundDecision:
    """One explore-then-match round: exploit with deferred acceptance once the
    separation check passes, otherwise explore per ``exploration`` mode."""
    if exploration not in EXPLORATION_MODES:
        raise ValueError(f"exploration must be one of {EXPLORATION_MODES}")
    if separation_check(state, rv):
        return _gs_decision(state, rv, MODE_EXPLOIT)
    if exploration == "uniform":
        matching = explore_uniform(rv, rng)
    else:
        matching = explore_weighted(rv, state)
    return RoundDecision(matching=matching, mode=MODE_EXPLORE, rankings=None)


def update(state: PolicyState, rv: RoundView, matching: dict, rewards: dict) -> PolicyState:
    """Fold one round's outcome into the state (in place; also returned).

    Matched pairs get a count increment and a running-mean update; every
    present player's local round advances, matched or not."""
    counts, means = state.counts, state.means
    for p in rv.players:
        a = matching.get(p, UNMATCHED)
        if a is not UNMATCHED:
            if a not in rv.capacities:
                raise ValueError(f"player {p} matched to unavailable arm {a}")
            try:
                r = rewards[p]
            except KeyError:
                raise ValueError(f"matched player {p} has no reward") from None
            if not 0.0 <= r <= 1.0:
                raise ValueError(f"reward for player {p} outside [0, 1]")
            c = counts[p][a]
            means[p][a] = (means[p][a] * c + r) / (c + 1)
            counts[p][a] = c + 1
        state.local_rounds[p] += 1
    return state


class AcUcb:
    """Policy wrapper for the confidence-bound matcher."""

    name = "ac-ucb"

    def decide(self, state: PolicyState, rv: RoundView, rng: np.random.Generator) -> RoundDecision:
        return ac_ucb_round(state, rv)


class AcEtgs:
    """Policy wrapper for explore-then-match with a fixed exploration mode."""

    def __init__(self, exploration: str):
        if exploration not in EXPLORATION_MODES:
            raise ValueError(f"exploration must be one of {EXPLORATION_MODES}")
        self.exploration = exploration
        self.name = "ac-etgs-random" if exploration == "uniform" else "ac-etgs-weighted"

    def decide(self, state: PolicyState, rv: RoundView, rng: np.random.Generator) -> RoundDecision:
        return ac_etgs_round(state, rv, rng, self.exploration)


POLICY_NAMES = ("ac-ucb", "ac-etgs-random", "ac-etgs-weighted")


def make_policy(name: str):
    if name == "ac-ucb":
        return AcUcb()
    if name == "ac-etgs-random":
        return AcEtgs("uniform")
    if name == "ac-etgs-weighted":
        return AcEtgs("weighted")
    raise ValueError(f"unknown policy {name!r}; valid: {', '.join(POLICY_NAMES)}")
