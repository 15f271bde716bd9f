import math

import numpy as np
import pytest

from banditmatch.environment import (
    EnvironmentSpec,
    local_clock,
    make_rng,
    min_gap,
    static_spec,
    step,
    view,
)
from conftest import random_spec


def sparse_attendance_spec():
    # player 0 present only at rounds 2, 5, 9 of 9; player 1 always present
    present = {2, 5, 9}
    players_at = tuple((0, 1) if t in present else (1,) for t in range(1, 10))
    return EnvironmentSpec(
        mu=np.array([[0.3, 0.6], [0.7, 0.2]]),
        players_at=players_at,
        arms_at=((0, 1),) * 9,
        arm_prefs_at=tuple((p, p) for p in players_at),
        capacities_at=(((1, 1)),) * 9,
    )


class TestView:
    def test_all_available(self):
        spec = static_spec(np.array([[0.2, 0.5], [0.6, 0.3]]), 4)
        for t in (1, 4):
            rv = view(spec, t)
            assert rv.players == (0, 1)
            assert rv.arms == (0, 1)
            assert rv.capacities == {0: 1, 1: 1}

    def test_out_of_range(self):
        spec = static_spec(np.array([[0.5]]), 3)
        for t in (0, 4):
            with pytest.raises(ValueError):
                view(spec, t)

    def test_slices_follow_schedule(self):
        spec = sparse_attendance_spec()
        assert view(spec, 2).players == (0, 1)
        assert view(spec, 3).players == (1,)


class TestStep:
    def test_unmatched_players_earn_zero(self):
        spec = static_spec(np.array([[0.9, 0.8], [0.7, 0.6]]), 3)
        rewards = step(spec, 1, {0: None, 1: None}, make_rng(0))
        assert rewards == {0: 0, 1: 0}

    def test_same_seed_same_sample(self):
        spec = static_spec(np.array([[0.4, 0.5], [0.6, 0.3]]), 3)
        m = {0: 1, 1: 0}
        a = step(spec, 2, m, make_rng(123))
        b = step(spec, 2, m, make_rng(123))
        assert a == b

    def test_sample_mean_concentrates(self):
        # Hoeffding at delta = 1e-6 gives radius ~0.0085 for n = 1e5
        spec = static_spec(np.array([[0.999]]), 1)
        rng = make_rng(7)
        n = 100_000
        total = sum(step(spec, 1, {0: 0}, rng)[0] for _ in range(n))
        assert abs(total / n - 0.999) < 0.01

    def test_rejects_absent_player_and_arm(self):
        spec = sparse_attendance_spec()
        with pytest.raises(ValueError):
            step(spec, 3, {0: 0}, make_rng(0))  # player 0 absent at t=3
        spec2 = static_spec(np.array([[0.5, 0.5 + 0.1]]), 2)
        with pytest.raises(ValueError):
            step(spec2, 1, {0: 9}, make_rng(0))

    def test_rejects_capacity_violation(self):
        spec = static_spec(np.array([[0.2, 0.4], [0.5, 0.7]]), 2)
        with pytest.raises(ValueError):
            step(spec, 1, {0: 0, 1: 0}, make_rng(0))


class TestLocalClock:
    def test_sparse_attendance(self):
        clk = local_clock(sparse_attendance_spec())
        assert clk.rounds_of[0] == (2, 5, 9)
        assert clk.counts[0] == 3
        assert clk.global_round(0, 2) == 5
        assert clk.local_round(0, 9) == 3
        with pytest.raises(ValueError):
            clk.local_round(0, 3)

    def test_all_available_is_identity(self):
        spec = static_spec(np.array([[0.2, 0.5], [0.6, 0.3]]), 6)
        clk = local_clock(spec)
        for i in range(2):
            assert clk.counts[i] == 6
            for t in range(1, 7):
                assert clk.global_round(i, t) == t

    def test_consistency_with_view(self, rng):
        for _ in range(10):
            spec = random_spec(rng)
            clk = local_clock(spec)
            for t in range(1, spec.horizon + 1):
                present = set(view(spec, t).players)
                for i in range(spec.n_players):
                    assert clk.attends(i, t) == (i in present)


class TestMinGap:
    def test_all_co_available(self):
        spec = static_spec(np.array([[0.1, 0.5, 0.9]]), 2)
        assert min_gap(spec) == pytest.approx(0.4)

    def test_never_co_available_pair_excluded(self):
        # arms 0 (0.1) and 1 (0.11) alternate; arm 2 (0.5) always present
        spec = EnvironmentSpec(
            mu=np.array([[0.1, 0.11, 0.5]]),
            players_at=((0,),) * 4,
            arms_at=((0, 2), (1, 2), (0, 2), (1, 2)),
            arm_prefs_at=(((0,), (0,)),) * 4,
            capacities_at=((1, 1),) * 4,
        )
        assert min_gap(spec) == pytest.approx(0.39)

    def test_undefined_without_pairs(self):
        spec = static_spec(np.array([[0.5]]), 2)
        with pytest.raises(ValueError):
            min_gap(spec)


class TestValidation:
    def test_rejects_mu_outside_open_interval(self):
        for bad in (0.0, 1.0):
            with pytest.raises(ValueError):
                static_spec(np.array([[bad, 0.5]]), 1)

    def test_rejects_equal_means_when_co_available(self):
        with pytest.raises(ValueError):
            static_spec(np.array([[0.5, 0.5]]), 1)

    def test_allows_equal_means_when_never_co_available(self):
        spec = EnvironmentSpec(
            mu=np.array([[0.5, 0.5]]),
            players_at=((0,), (0,)),
            arms_at=((0,), (1,)),
            arm_prefs_at=(((0,),), ((0,),)),
            capacities_at=((1,), (1,)),
        )
        assert spec.horizon == 2

    def test_rejects_partial_arm_ranking(self):
        with pytest.raises(ValueError):
            EnvironmentSpec(
                mu=np.array([[0.3, 0.6], [0.7, 0.2]]),
                players_at=((0, 1),),
                arms_at=((0, 1),),
                arm_prefs_at=(((0,), (0, 1)),),
                capacities_at=((1, 1),),
            )


class TestSerialization:
    def test_roundtrip(self, rng):
        spec = random_spec(rng)
        text = spec.to_json()
        clone = EnvironmentSpec.from_json(text)
        assert clone.to_json() == text
        assert np.array_equal(clone.mu, spec.mu)
        assert clone.players_at == spec.players_at
        assert clone.arm_prefs_at == spec.arm_prefs_at

    def test_config_ids_group_identical_rounds(self):
        spec = static_spec(np.array([[0.2, 0.5], [0.6, 0.3]]), 10)
        assert len(spec.round_configs) == 1
        assert set(spec.round_config_ids.tolist()) == {0}


def test_make_rng_reproducible():
    assert np.array_equal(make_rng(1, 2, 3).random(4), make_rng(1, 2, 3).random(4))
    assert not np.array_equal(make_rng(1, 2, 3).random(4), make_rng(1, 2, 4).random(4))
