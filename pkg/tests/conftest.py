import numpy as np
import pytest

from banditmatch.environment import EnvironmentSpec
from banditmatch.matching import MatchInstance


def random_instance(rng, max_players=5, max_arms=4, max_cap=3, complete=False) -> MatchInstance:
    """Random matching instance with strict rankings; player rankings cover a
    random subset of arms unless ``complete``."""
    n = int(rng.integers(1, max_players + 1))
    k = int(rng.integers(1, max_arms + 1))
    players = tuple(range(n))
    arms = tuple(range(k))
    player_prefs = {}
    for p in players:
        size = k if complete else int(rng.integers(0, k + 1))
        player_prefs[p] = tuple(int(a) for a in rng.permutation(k)[:size])
    arm_prefs = {a: tuple(int(p) for p in rng.permutation(n)) for a in arms}
    capacities = {a: int(rng.integers(1, max_cap + 1)) for a in arms}
    return MatchInstance(players, arms, player_prefs, arm_prefs, capacities)


def random_spec(rng, n_players=3, n_arms=3, horizon=20, max_cap=2) -> EnvironmentSpec:
    """Random small environment: availability, per-round rankings and
    capacities all drawn fresh; means drawn distinct."""
    mu = (np.arange(1, n_players * n_arms + 1) / (n_players * n_arms + 1.0)).reshape(
        n_players, n_arms
    )
    mu = rng.permuted(mu.ravel()).reshape(n_players, n_arms)
    players_at, arms_at, prefs_at, caps_at = [], [], [], []
    for _ in range(horizon):
        players = tuple(int(p) for p in np.nonzero(rng.random(n_players) < 0.7)[0])
        arms = tuple(int(a) for a in np.nonzero(rng.random(n_arms) < 0.7)[0])
        prefs = tuple(tuple(int(p) for p in rng.permutation(players)) for _ in arms)
        caps = tuple(int(rng.integers(1, max_cap + 1)) for _ in arms)
        players_at.append(players)
        arms_at.append(arms)
        prefs_at.append(prefs)
        caps_at.append(caps)
    return EnvironmentSpec(
        mu=mu,
        players_at=tuple(players_at),
        arms_at=tuple(arms_at),
        arm_prefs_at=tuple(prefs_at),
        capacities_at=tuple(caps_at),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
