"""Problem-instance generators.

Two families:

* a randomized experiment family (``fig1``/``fig2``/``fig3`` presets): mean
  rewards are a per-player random permutation of K linearly spaced values,
  player/arm availability is sampled independently per round from per-entity
  unavailability probabilities, and arm rankings are either redrawn every
  round or drawn once and held fixed;
* adversarial availability schedules (``hard41``/``hard42``) on which greedy
  confidence-bound matching provably keeps paying: a fresh-competitor block
  schedule over two arms, and a rotating-variable-arm schedule with a
  hierarchy of fixed arms. Both come in a reference flavor and per-target
  "flipped preference" flavors, and have a unique stable matching each round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from banditmatch.environment import EnvironmentSpec, make_rng


@dataclass
class ExperimentFamilyParams:
    """Knobs for the randomized experiment family.

    Unavailability vectors default to values linearly spaced in [0.1, 0.9]
    (one value per player / per arm). ``fixed_pref_seed`` pins the rankings
    of ``arm_pref_mode="fixed"`` independently of ``seed`` so that a whole
    ensemble of instances can share one set of arm rankings.
    """

    n_players: int
    n_arms: int
    horizon: int
    reward_lo: float = 0.1
    reward_hi: float = 0.9
    player_unavailability: tuple | None = None
    arm_unavailability: tuple | None = None
    arm_pref_mode: str = "per-round"  # "per-round" | "fixed"
    seed: int = 0
    fixed_pref_seed: int | None = None

    def validate(self) -> None:
        if self.n_players < 1 or self.n_arms < 1 or self.horizon < 1:
            raise ValueError("n_players, n_arms, horizon must all be >= 1")
        if not self.reward_lo < self.reward_hi:
            raise ValueError("reward_lo must be < reward_hi")
        if not (0.0 < self.reward_lo and self.reward_hi < 1.0):
            raise ValueError("reward grid must sit strictly inside (0, 1)")
        for name, probs, count in (
            ("player_unavailability", self.player_unavailability, self.n_players),
            ("arm_unavailability", self.arm_unavailability, self.n_arms),
        ):
            if probs is None:
                continue
            if len(probs) != count:
                raise ValueError(f"{name} must have one entry per entity")
            if not all(0.0 <= p < 1.0 for p in probs):
                raise ValueError(f"{name} entries must lie in [0, 1)")
        if self.arm_pref_mode not in ("per-round", "fixed"):
            raise ValueError("arm_pref_mode must be 'per-round' or 'fixed'")


def _default_unavailability(count: int) -> np.ndarray:
    if count == 1:
        return np.array([0.1])
    return np.linspace(0.1, 0.9, count)


def gen_experiment_instance(
    params: ExperimentFamilyParams, rng: np.random.Generator | None = None
) -> EnvironmentSpec:
    """Sample one instance of the experiment family. Identical params (and
    default rng) reproduce the instance byte for byte."""
    params.validate()
    if rng is None:
        rng = make_rng(params.seed)
    N, K, T = params.n_players, params.n_arms, params.horizon

    grid = np.linspace(params.reward_lo, params.reward_hi, K)
    mu = np.vstack([rng.permutation(grid) for _ in range(N)])

    pu = (
        np.asarray(params.player_unavailability, dtype=float)
        if params.player_unavailability is not None
        else _default_unavailability(N)
    )
    au = (
        np.asarray(params.arm_unavailability, dtype=float)
        if params.arm_unavailability is not None
        else _default_unavailability(K)
    )
    player_mask = rng.random((T, N)) >= pu
    arm_mask = rng.random((T, K)) >= au

    fixed_ranks = None
    scores = None
    if params.arm_pref_mode == "fixed":
        pref_rng = (
            make_rng(params.fixed_pref_seed) if params.fixed_pref_seed is not None else rng
        )
        fixed_ranks = [tuple(int(p) for p in pref_rng.permutation(N)) for _ in range(K)]
    else:
        scores = rng.random((T, K, N))

    unit_caps = [(1,) * n for n in range(K + 1)]
    players_at, arms_at, prefs_at, caps_at = [], [], [], []
    for t in range(T):
        players = tuple(int(i) for i in np.nonzero(player_mask[t])[0])
        arms = tuple(int(a) for a in np.nonzero(arm_mask[t])[0])
        if fixed_ranks is not None:
            pset = set(players)
            prefs = tuple(
                tuple(p for p in fixed_ranks[a] if p in pset) for a in arms
            )
        else:
            srow = scores[t]
            prefs = tuple(
                tuple(sorted(players, key=lambda p, a=a: srow[a][p])) for a in arms
            )
        players_at.append(players)
        arms_at.append(arms)
        prefs_at.append(prefs)
        caps_at.append(unit_caps[len(arms)])
    return EnvironmentSpec(
        mu=mu,
        players_at=tuple(players_at),
        arms_at=tuple(arms_at),
        arm_prefs_at=tuple(prefs_at),
        capacities_at=tuple(caps_at),
    )


@dataclass
class HardInstanceParams41:
    """Fresh-competitor block schedule over two always-on arms.

    Player 0 attends every round. Round blocks of length ``block_length``
    (default round(horizon^(1 - exponent))) each bring one fresh competitor
    (player ids 1, 2, ...) that both arms rank above player 0. In the
    reference table the competitor prefers arm 1 while player 0 prefers
    arm 0; ``variant=k`` flips competitor k's rewards so it prefers arm 0.
    """

    horizon: int
    exponent: float = 0.5
    gap: float = 0.2
    block_length: int | None = None
    variant: int | None = None

    def validate(self) -> None:
        if self.horizon < 2:
            raise ValueError("horizon must be >= 2")
        if not 0.0 < self.exponent < 1.0:
            raise ValueError("exponent must lie in (0, 1)")
        if not 0.0 < self.gap < 0.25:
            raise ValueError("gap must lie in (0, 0.25)")
        L = self.resolved_block_length()
        if L < 2:
            raise ValueError("block_length must be >= 2")
        if L > self.horizon:
            raise ValueError("block_length exceeds horizon")
        if self.variant is not None and not 1 <= self.variant <= self.horizon // L:
            raise ValueError("variant must name a competitor player id")

    def resolved_block_length(self) -> int:
        if self.block_length is not None:
            return self.block_length
        return max(2, round(self.horizon ** (1.0 - self.exponent)))


def gen_hard_41(params: HardInstanceParams41) -> EnvironmentSpec:
    params.validate()
    T = params.horizon
    L = params.resolved_block_length()
    d = params.gap
    blocks = T // L
    mu = np.empty((blocks + 1, 2))
    mu[0] = (0.5 + d, 0.5)
    mu[1:] = (0.5, 0.5 + d)
    if params.variant is not None:
        mu[params.variant] = (0.5 + 2 * d, 0.5 + d)

    arms = (0, 1)
    caps = (1, 1)
    players_at, prefs_at = [], []
    for b in range(blocks):
        competitor = b + 1
        players = (0, competitor)
        prefs = ((competitor, 0), (competitor, 0))
        players_at.extend([players] * L)
        prefs_at.extend([prefs] * L)
    leftover = T - blocks * L
    if leftover:
        players_at.extend([(0,)] * leftover)
        prefs_at.extend([((0,), (0,))] * leftover)
    return EnvironmentSpec(
        mu=mu,
        players_at=tuple(players_at),
        arms_at=(arms,) * T,
        arm_prefs_at=tuple(prefs_at),
        capacities_at=(caps,) * T,
    )


@dataclass
class HardInstanceParams42:
    """Rotating-variable-arm schedule with a fixed arm hierarchy.

    Arms 0..N-2 are always on; exactly one of the variable arms N-1..K-1 is
    on per round (round-robin, so every variable arm gets at least
    floor(T / (K - N + 1)) rounds). All arms rank players 0 > 1 > ... > N-1,
    so the last player loses every contention. In the reference table each
    competing player i < N-1 mildly dislikes the variable arms while the last
    player loves them; ``variant=(i, k)`` lifts competing player i's reward
    on variable arm k just above their own fixed arm's.
    """

    n_players: int
    n_arms: int
    horizon: int
    gap: float = 0.1
    tilt: float = 0.005
    variant: tuple[int, int] | None = None

    def validate(self) -> None:
        if self.n_players < 2:
            raise ValueError("need at least 2 players")
        if self.n_players > self.n_arms:
            raise ValueError("n_players must be <= n_arms")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if not 0.0 < self.gap <= 0.15:
            raise ValueError("gap must lie in (0, 0.15]")
        if not 0.0 < self.tilt < 0.1 * self.gap:
            raise ValueError("tilt must lie in (0, 0.1 * gap)")
        if self.variant is not None:
            i, k = self.variant
            if not 0 <= i <= self.n_players - 2:
                raise ValueError("variant player must be a competing player")
            if not self.n_players - 1 <= k <= self.n_arms - 1:
                raise ValueError("variant arm must be a variable arm")


def gen_hard_42(params: HardInstanceParams42) -> EnvironmentSpec:
    params.validate()
    N, K, T = params.n_players, params.n_arms, params.horizon
    gap, tilt = params.gap, params.tilt
    n_var = K - N + 1
    victim = N - 1

    mu = np.empty((N, K))
    for i in range(N - 1):
        for j in range(N - 1):
            mu[i, j] = 0.5 if j == i else 0.5 - 2 * gap - (j + 1) * gap / K
        mu[i, N - 1 :] = 0.5 - gap
    mu[victim, : N - 1] = np.linspace(0.3, 0.5 - gap, N - 1)
    mu[victim, N - 1 :] = np.linspace(0.6, 0.7, n_var)
    if params.variant is not None:
        i, k = params.variant
        mu[i, k] = 0.5 + tilt

    players = tuple(range(N))
    prefs = (players,) * N
    caps = (1,) * N
    fixed = tuple(range(N - 1))
    arm_tuples = [fixed + (N - 1 + v,) for v in range(n_var)]
    arms_at = tuple(arm_tuples[t % n_var] for t in range(T))
    return EnvironmentSpec(
        mu=mu,
        players_at=(players,) * T,
        arms_at=arms_at,
        arm_prefs_at=((prefs),) * T,
        capacities_at=(caps,) * T,
    )


# -- named generator registry (RunConfig interface) --------------------------

GENERATOR_NAMES = ("fig1", "fig2", "fig3", "hard41", "hard42")


def _params_from_dict(cls, raw: dict):
    known = {f.name for f in fields(cls)}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown parameter(s) {sorted(unknown)}; valid: {sorted(known)}")
    kwargs = dict(raw)
    for key in ("player_unavailability", "arm_unavailability"):
        if key in kwargs and kwargs[key] is not None:
            kwargs[key] = tuple(kwargs[key])
    if "variant" in kwargs and isinstance(kwargs["variant"], list):
        kwargs["variant"] = tuple(kwargs["variant"])
    return cls(**kwargs)


def build_named_instance(
    name: str,
    raw_params: dict,
    instance_seed: int,
    shared_pref_seed: int | None = None,
) -> EnvironmentSpec:
    """Build a spec for one of the named generators.

    ``instance_seed`` drives all randomized draws. The figure presets differ
    in availability and arm-ranking behavior: fig1 = heterogeneous player
    unavailability with per-round rankings, fig2 = all players unavailable
    with probability 0.5 (otherwise as fig1), fig3 = as fig2 but rankings
    drawn once from ``shared_pref_seed`` and held fixed, so every instance of
    an ensemble shares them. hard41/hard42 are deterministic (the seed is
    ignored).
    """
    if name in ("fig1", "fig2", "fig3"):
        raw = dict(raw_params)
        if name in ("fig2", "fig3") and "player_unavailability" not in raw:
            raw["player_unavailability"] = (0.5,) * int(raw["n_players"])
        if name == "fig3":
            raw.setdefault("arm_pref_mode", "fixed")
            if raw.get("fixed_pref_seed") is None:
                raw["fixed_pref_seed"] = shared_pref_seed
        params = _params_from_dict(ExperimentFamilyParams, raw)
        params.seed = instance_seed
        return gen_experiment_instance(params)
    if name == "hard41":
        return gen_hard_41(_params_from_dict(HardInstanceParams41, raw_params))
    if name == "hard42":
        return gen_hard_42(_params_from_dict(HardInstanceParams42, raw_params))
    raise ValueError(f"unknown generator {name!r}; valid: {', '.join(GENERATOR_NAMES)}")
