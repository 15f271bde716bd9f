"""Stable-matching baselines, regret ledgers, and diagnostics.

Each round owns two baselines under the true preferences: the player-optimal
and player-pessimal stable matchings (outputs of the two deferred-acceptance
variants). A ledger accumulates, per player and local round, the signed gap
between each baseline's mean reward and what the realized matching delivered.
By default the gap uses known means in place of sampled rewards
(pseudo-regret), which strips reward noise from the curves; realized-reward
accounting is available behind a flag. Increments are stored unclamped, so a
round in which a player beats a baseline subtracts from the series.
"""

from __future__ import annotations

import math
from typing import NamedTuple

from banditmatch.environment import EnvironmentSpec, min_gap
from banditmatch.matching import MatchInstance, UNMATCHED, arm_proposing_gs, player_proposing_gs
from banditmatch.policies import PolicyState


class RoundBaselines(NamedTuple):
    optimal: dict
    pessimal: dict


def true_preference_instance(spec: EnvironmentSpec, t: int) -> MatchInstance:
    """The round's matching problem with player rankings taken from the true
    means (descending over the round's available arms)."""
    players = spec.players_at[t - 1]
    arms = spec.arms_at[t - 1]
    mu_rows = spec.mu_rows
    prefs = {}
    for p in players:
        row = mu_rows[p]
        prefs[p] = tuple(sorted(arms, key=lambda a: (-row[a], a)))
    return MatchInstance(
        players=players,
        arms=arms,
        player_prefs=prefs,
        arm_prefs=dict(zip(arms, spec.arm_prefs_at[t - 1])),
        capacities=dict(zip(arms, spec.capacities_at[t - 1])),
    )


class BaselineCache:
    """Lazily computed per-round baselines, memoized by round configuration
    (schedules repeat configurations heavily)."""

    def __init__(self, spec: EnvironmentSpec):
        self.spec = spec
        self._by_config: dict[int, RoundBaselines] = {}

    def at(self, t: int) -> RoundBaselines:
        cid = int(self.spec.round_config_ids[t - 1])
        hit = self._by_config.get(cid)
        if hit is None:
            inst = true_preference_instance(self.spec, t)
            hit = RoundBaselines(
                optimal=player_proposing_gs(inst, validate=False),
                pessimal=arm_proposing_gs(inst, validate=False),
            )
            self._by_config[cid] = hit
        return hit


def baselines(spec: EnvironmentSpec, t: int) -> RoundBaselines:
    """Player-optimal and player-pessimal stable matchings of round t under
    the true preferences (uncached convenience form)."""
    if not 1 <= t <= spec.horizon:
        raise ValueError(f"round {t} outside 1..{spec.horizon}")
    return BaselineCache(spec).at(t)


class RegretLedger:
    """Per-player cumulative optimal/pessimal stable-regret series, indexed by
    local round. ``delta_max[i]`` caches max_j mu[i, j] over all arms."""

    def __init__(self, spec: EnvironmentSpec, *, realized: bool = False):
        self.spec = spec
        self.realized = realized
        self.delta_max = [max(row) for row in spec.mu_rows]
        n = spec.n_players
        self.optimal: list[list[float]] = [[] for _ in range(n)]
        self.pessimal: list[list[float]] = [[] for _ in range(n)]
        self._opt_total = [0.0] * n
        self._pess_total = [0.0] * n
        self._baselines = BaselineCache(spec)


def record_round(
    ledger: RegretLedger, spec: EnvironmentSpec, t: int, matching: dict, rewards=None
) -> RegretLedger:
    """Append round t's signed regret increments for every present player."""
    if spec is not ledger.spec:
        raise ValueError("ledger belongs to a different spec")
    base = ledger._baselines.at(t)
    mu_rows = spec.mu_rows
    opt_m, pess_m = base.optimal, base.pessimal
    realized = ledger.realized
    if realized and rewards is None:
        raise ValueError("realized-reward ledger needs the round's rewards")
    opt_total, pess_total = ledger._opt_total, ledger._pess_total
    for p in spec.players_at[t - 1]:
        row = mu_rows[p]
        a = matching.get(p, UNMATCHED)
        if realized:
            got = float(rewards[p]) if a is not UNMATCHED else 0.0
        else:
            got = row[a] if a is not UNMATCHED else 0.0
        ob = opt_m[p]
        pb = pess_m[p]
        opt_total[p] += (row[ob] if ob is not UNMATCHED else 0.0) - got
        pess_total[p] += (row[pb] if pb is not UNMATCHED else 0.0) - got
        ledger.optimal[p].append(opt_total[p])
        ledger.pessimal[p].append(pess_total[p])
    return ledger


class FailureDiagnostics:
    """Count, per player, the local rounds on which the round-level
    confidence-failure event held."""

    def __init__(self, n_players: int):
        self.counts = [0] * n_players

    def add(self, flagged) -> None:
        for p in flagged:
            self.counts[p] += 1


def failure_event(state: PolicyState, spec: EnvironmentSpec, t: int):
    """Players whose current local round is a failure round at global round t.

    The event holds when ANY present (player, arm) pair's empirical mean sits
    outside its confidence radius sqrt(log t_j / T_jk); it then flags every
    player present at t (the event is a property of the round). ``state``
    must be the pre-update snapshot for round t, so that local_rounds[j] is
    j's local index of t. Unexplored pairs never violate."""
    players = spec.players_at[t - 1]
    arms = spec.arms_at[t - 1]
    mu_rows = spec.mu_rows
    for j in players:
        lt = math.log(state.local_rounds[j])
        counts_j = state.counts[j]
        means_j = state.means[j]
        row = mu_rows[j]
        for a in arms:
            c = counts_j[a]
            if c and abs(means_j[a] - row[a]) > math.sqrt(lt / c):
                return set(players)
    return set()


def kl_bernoulli(p: float, q: float) -> float:
    """KL divergence between Bernoulli(p) and Bernoulli(q), natural log.

    p may touch {0, 1} (the 0 log 0 = 0 convention applies); a q of 0 or 1
    gives +inf unless p matches it exactly."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    if q == 0.0:
        return 0.0 if p == 0.0 else math.inf
    if q == 1.0:
        return 0.0 if p == 1.0 else math.inf
    total = 0.0
    if p > 0.0:
        total += p * math.log(p / q)
    if p < 1.0:
        total += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return total


def min_gap_regret_envelope(
    spec: EnvironmentSpec, t_local, coeff: float, k_power: int = 1, gap: float | None = None
) -> float:
    """coeff * N * K^k_power * log(t_local) / gap^2, the scaled acceptance
    envelope for regret growth on this spec. ``gap`` overrides the computed
    minimum gap (needed when the spec never co-offers two arms)."""
    if gap is None:
        gap = min_gap(spec)
    if gap <= 0:
        raise ValueError("gap must be positive")
    return coeff * spec.n_players * spec.n_arms**k_power * math.log(t_local) / gap**2


def pessimal_regret_envelope(
    spec: EnvironmentSpec, t_local, player=None, gap: float | None = None
) -> float:
    """Explicit constant path for the confidence-bound matcher's pessimal
    regret: delta_max * N * K * (4K + 8 log(t_local) / gap^2). ``player``
    selects whose delta_max to use; default is the worst over players."""
    if gap is None:
        gap = min_gap(spec)
    if gap <= 0:
        raise ValueError("gap must be positive")
    rows = spec.mu_rows
    dmax = max(max(r) for r in rows) if player is None else max(rows[player])
    n, k = spec.n_players, spec.n_arms
    return dmax * n * k * (4 * k + 8 * math.log(t_local) / gap**2)
