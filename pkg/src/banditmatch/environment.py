"""Ground-truth market environment.

An :class:`EnvironmentSpec` pins down a whole problem instance: the mean
reward matrix, and per-round availability sets, arm preference rankings, and
arm capacities, stored explicitly for every round so that runs replay exactly.
Rounds are numbered 1..T in every public signature; players and arms are
0-indexed. Rewards are Bernoulli draws in {0, 1}; an unmatched player earns 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


def make_rng(*key) -> np.random.Generator:
    """Counter-based generator for a hierarchical seed key, e.g.
    ``make_rng(master, instance, trial, stream)``. Equal keys give equal
    streams; distinct keys give statistically independent ones."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def derive_seed(*key) -> int:
    """Stable 64-bit seed derived from a hierarchical key."""
    return int(np.random.SeedSequence(key).generate_state(1, dtype=np.uint64)[0])


class RoundView(NamedTuple):
    """Slice of an EnvironmentSpec at one round (arm side fully visible)."""

    t: int
    players: tuple[int, ...]
    arms: tuple[int, ...]
    arm_prefs: dict[int, tuple[int, ...]]
    capacities: dict[int, int]


@dataclass(eq=False)
class EnvironmentSpec:
    """Complete description of a problem instance.

    mu:            (N, K) matrix of mean rewards, all strictly inside (0, 1)
    players_at:    tuple of T tuples, the player ids present each round
    arms_at:       tuple of T tuples, the arm ids present each round
    arm_prefs_at:  per round, rankings aligned with ``arms_at[t]``; each is a
                   strict total order over that round's players
    capacities_at: per round, capacities aligned with ``arms_at[t]``

    Instances are immutable after construction; mutate nothing. Two rounds
    with identical (players, arms, prefs, capacities) share a config id,
    which downstream caches key on.
    """

    mu: np.ndarray
    players_at: tuple
    arms_at: tuple
    arm_prefs_at: tuple
    capacities_at: tuple
    round_config_ids: np.ndarray = field(init=False, repr=False)
    round_configs: list = field(init=False, repr=False)

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        if self.mu.ndim != 2:
            raise ValueError("mu must be an N x K matrix")
        for name in ("players_at", "arms_at", "arm_prefs_at", "capacities_at"):
            value = getattr(self, name)
            if not isinstance(value, tuple):
                setattr(self, name, tuple(value))
        T = len(self.players_at)
        if not (len(self.arms_at) == len(self.arm_prefs_at) == len(self.capacities_at) == T):
            raise ValueError("schedule lengths disagree")
        self._index_configs()
        self._validate()
        self.mu.setflags(write=False)

    # -- derived sizes ----------------------------------------------------
    @property
    def n_players(self) -> int:
        return self.mu.shape[0]

    @property
    def n_arms(self) -> int:
        return self.mu.shape[1]

    @property
    def horizon(self) -> int:
        return len(self.players_at)

    @property
    def mu_rows(self) -> list[list[float]]:
        """mu as plain nested lists (cached); fast scalar access in hot loops."""
        rows = getattr(self, "_mu_rows", None)
        if rows is None:
            rows = self.mu.tolist()
            object.__setattr__(self, "_mu_rows", rows)
        return rows

    # -- construction helpers ---------------------------------------------
    def _index_configs(self):
        id_cache: dict[tuple, int] = {}
        value_cache: dict[tuple, int] = {}
        configs: list[tuple] = []
        ids = np.empty(len(self.players_at), dtype=np.int32)
        for t in range(len(self.players_at)):
            quad = (
                self.players_at[t],
                self.arms_at[t],
                self.arm_prefs_at[t],
                self.capacities_at[t],
            )
            ikey = (id(quad[0]), id(quad[1]), id(quad[2]), id(quad[3]))
            cid = id_cache.get(ikey)
            if cid is None:
                cid = value_cache.get(quad)
                if cid is None:
                    cid = len(configs)
                    configs.append(quad)
                    value_cache[quad] = cid
                id_cache[ikey] = cid
            ids[t] = cid
        self.round_config_ids = ids
        self.round_configs = configs

    def _validate(self):
        N, K = self.mu.shape
        if not np.all((self.mu > 0.0) & (self.mu < 1.0)):
            raise ValueError("all mean rewards must lie strictly inside (0, 1)")
        all_players = range(N)
        for cid, (players, arms, prefs, caps) in enumerate(self.round_configs):
            pset = set(players)
            if len(pset) != len(players) or not all(0 <= p < N for p in players):
                raise ValueError(f"bad player set in round config {cid}")
            if len(set(arms)) != len(arms) or not all(0 <= a < K for a in arms):
                raise ValueError(f"bad arm set in round config {cid}")
            if len(prefs) != len(arms) or len(caps) != len(arms):
                raise ValueError(f"misaligned prefs/capacities in round config {cid}")
            for a, ranking in zip(arms, prefs):
                if len(ranking) != len(players) or set(ranking) != pset:
                    raise ValueError(
                        f"arm {a} ranking is not a total order over the round's players"
                    )
            for a, c in zip(arms, caps):
                if not isinstance(c, int) or c < 1:
                    raise ValueError(f"arm {a} capacity must be an integer >= 1")
        self._validate_distinctness()

    def _validate_distinctness(self):
        # Collisions within a player's row are legal only for arm pairs that
        # are never simultaneously available in a round the player attends.
        collisions: list[tuple[int, int, int]] = []
        for i, row in enumerate(self.mu_rows):
            by_value: dict[float, list[int]] = {}
            for j, v in enumerate(row):
                by_value.setdefault(v, []).append(j)
            for arms in by_value.values():
                if len(arms) > 1:
                    for x in range(len(arms)):
                        for y in range(x + 1, len(arms)):
                            collisions.append((i, arms[x], arms[y]))
        if not collisions:
            return
        for players, arms, _prefs, _caps in self.round_configs:
            arm_set = set(arms)
            pset = set(players)
            for i, j, j2 in collisions:
                if i in pset and j in arm_set and j2 in arm_set:
                    raise ValueError(
                        f"player {i} sees arms {j} and {j2} with equal mean "
                        f"{self.mu_rows[i][j]} in the same round"
                    )

    # -- serialization ------------------------------------------------------
    def to_json(self) -> str:
        """Canonical textual form: ``{"mu": [[..]], "rounds": [{"players":
        [..], "arms": [..], "arm_prefs": [[..]..], "capacities": [..]}..]}``
        with sorted keys and no whitespace, so equal specs serialize equal."""
        doc = {
            "mu": [list(map(float, row)) for row in self.mu_rows],
            "rounds": [
                {
                    "players": list(self.players_at[t]),
                    "arms": list(self.arms_at[t]),
                    "arm_prefs": [list(r) for r in self.arm_prefs_at[t]],
                    "capacities": list(self.capacities_at[t]),
                }
                for t in range(self.horizon)
            ],
        }
        return json.dumps(doc, separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "EnvironmentSpec":
        doc = json.loads(text)
        rounds = doc["rounds"]
        return cls(
            mu=np.array(doc["mu"], dtype=float),
            players_at=tuple(tuple(r["players"]) for r in rounds),
            arms_at=tuple(tuple(r["arms"]) for r in rounds),
            arm_prefs_at=tuple(tuple(tuple(p) for p in r["arm_prefs"]) for r in rounds),
            capacities_at=tuple(tuple(r["capacities"]) for r in rounds),
        )


def static_spec(mu, horizon: int, arm_prefs=None, capacities=None) -> EnvironmentSpec:
    """Spec in which every player and arm is present every round.

    ``arm_prefs`` maps arm id -> ranking over all players (default: by player
    index); ``capacities`` maps arm id -> seats (default 1 everywhere).
    """
    mu = np.asarray(mu, dtype=float)
    N, K = mu.shape
    players = tuple(range(N))
    arms = tuple(range(K))
    if arm_prefs is None:
        arm_prefs = {a: players for a in arms}
    prefs = tuple(tuple(arm_prefs[a]) for a in arms)
    if capacities is None:
        capacities = {a: 1 for a in arms}
    caps = tuple(int(capacities[a]) for a in arms)
    return EnvironmentSpec(
        mu=mu,
        players_at=(players,) * horizon,
        arms_at=(arms,) * horizon,
        arm_prefs_at=(prefs,) * horizon,
        capacities_at=(caps,) * horizon,
    )


def view(spec: EnvironmentSpec, t: int) -> RoundView:
    """Exact slice of the spec at global round t (1-based)."""
    if not 1 <= t <= spec.horizon:
        raise ValueError(f"round {t} outside 1..{spec.horizon}")
    arms = spec.arms_at[t - 1]
    return RoundView(
        t=t,
        players=spec.players_at[t - 1],
        arms=arms,
        arm_prefs=dict(zip(arms, spec.arm_prefs_at[t - 1])),
        capacities=dict(zip(arms, spec.capacities_at[t - 1])),
    )


def step(spec: EnvironmentSpec, t: int, matching, rng: np.random.Generator) -> dict[int, int]:
    """Sample one round of rewards for ``matching`` at round t.

    Returns {player id -> reward} over every player present at t; unmatched
    players (and players missing from ``matching``) earn 0. Raises ValueError
    if the matching references absent players/arms or breaks a capacity.
    """
    if not 1 <= t <= spec.horizon:
        raise ValueError(f"round {t} outside 1..{spec.horizon}")
    players = spec.players_at[t - 1]
    arms = spec.arms_at[t - 1]
    caps = dict(zip(arms, spec.capacities_at[t - 1]))
    pset = set(players)
    load: dict[int, int] = {}
    matched: list[tuple[int, int]] = []
    for p, a in matching.items():
        if p not in pset:
            raise ValueError(f"player {p} not available at round {t}")
        if a is None:
            continue
        if a not in caps:
            raise ValueError(f"arm {a} not available at round {t}")
        load[a] = load.get(a, 0) + 1
        if load[a] > caps[a]:
            raise ValueError(f"arm {a} over capacity at round {t}")
        matched.append((p, a))
    rewards = {p: 0 for p in players}
    if matched:
        matched.sort()
        draws = rng.random(len(matched))
        mu_rows = spec.mu_rows
        for (p, a), u in zip(matched, draws):
            rewards[p] = 1 if u < mu_rows[p][a] else 0
    return rewards


class LocalClock:
    """Per-player attendance bookkeeping: the sorted global rounds each player
    attends, their counts, and the two-way local/global index maps."""

    def __init__(self, spec: EnvironmentSpec):
        N, T = spec.n_players, spec.horizon
        rounds: list[list[int]] = [[] for _ in range(N)]
        local = np.zeros((N, T + 1), dtype=np.int32)  # 0 marks absence
        for t in range(1, T + 1):
            for p in spec.players_at[t - 1]:
                rounds[p].append(t)
                local[p, t] = len(rounds[p])
        self.rounds_of: tuple[tuple[int, ...], ...] = tuple(tuple(r) for r in rounds)
        self.counts: tuple[int, ...] = tuple(len(r) for r in rounds)
        self._local = local

    def global_round(self, player: int, t_local: int) -> int:
        """h_i(t_i): the global index of the player's t_local-th attended round."""
        seq = self.rounds_of[player]
        if not 1 <= t_local <= len(seq):
            raise ValueError(f"player {player} has no local round {t_local}")
        return seq[t_local - 1]

    def local_round(self, player: int, t: int) -> int:
        """Inverse map: the local index of global round t for the player."""
        idx = int(self._local[player, t])
        if idx == 0:
            raise ValueError(f"player {player} absent at round {t}")
        return idx

    def attends(self, player: int, t: int) -> bool:
        return self._local[player, t] != 0


def local_clock(spec: EnvironmentSpec) -> LocalClock:
    return LocalClock(spec)


def min_gap(spec: EnvironmentSpec) -> float:
    """Minimum |mu_ij - mu_ij'| over all players, rounds they attend, and arm
    pairs simultaneously available in those rounds."""
    seen: dict[tuple, set[int]] = {}
    for players, arms, _prefs, _caps in spec.round_configs:
        if len(arms) >= 2 and players:
            seen.setdefault(arms, set()).update(players)
    best = math.inf
    mu_rows = spec.mu_rows
    for arms, players in seen.items():
        for i in players:
            row = sorted(mu_rows[i][a] for a in arms)
            for x in range(len(row) - 1):
                d = row[x + 1] - row[x]
                if d < best:
                    best = d
    if math.isinf(best):
        raise ValueError("no round offers two co-available arms; gap undefined")
    return best
