import numpy as np
import pytest

from banditmatch.environment import local_clock, make_rng, min_gap, view
from banditmatch.instances import (
    ExperimentFamilyParams,
    HardInstanceParams41,
    HardInstanceParams42,
    build_named_instance,
    gen_experiment_instance,
    gen_hard_41,
    gen_hard_42,
)
from banditmatch.matching import enumerate_stable_matchings
from banditmatch.regret import baselines, true_preference_instance


class TestExperimentFamily:
    def test_reward_rows_permute_linear_grid(self):
        params = ExperimentFamilyParams(n_players=5, n_arms=10, horizon=5, seed=3)
        spec = gen_experiment_instance(params)
        grid = np.linspace(0.1, 0.9, 10)
        assert grid[1] == pytest.approx(0.1888888888888889)
        for i in range(5):
            assert np.allclose(sorted(spec.mu_rows[i]), grid)

    def test_zero_unavailability_keeps_everyone(self):
        params = ExperimentFamilyParams(
            n_players=3,
            n_arms=4,
            horizon=50,
            player_unavailability=(0.0,) * 3,
            arm_unavailability=(0.0,) * 4,
            seed=1,
        )
        spec = gen_experiment_instance(params)
        for t in range(1, 51):
            rv = view(spec, t)
            assert rv.players == (0, 1, 2)
            assert rv.arms == (0, 1, 2, 3)

    def test_half_unavailability_frequency(self):
        # every player sleeps with probability 0.5; empirical frequency 0.5 +- 0.01
        params = ExperimentFamilyParams(
            n_players=5,
            n_arms=3,
            horizon=100_000,
            player_unavailability=(0.5,) * 5,
            arm_pref_mode="fixed",
            seed=11,
        )
        spec = gen_experiment_instance(params)
        clk = local_clock(spec)
        for i in range(5):
            assert abs(clk.counts[i] / spec.horizon - 0.5) < 0.01

    def test_same_seed_reproduces_byte_for_byte(self):
        params = ExperimentFamilyParams(n_players=3, n_arms=4, horizon=40, seed=5)
        a = gen_experiment_instance(params)
        b = gen_experiment_instance(params)
        assert a.to_json() == b.to_json()

    def test_fixed_mode_rankings_constant_and_shareable(self):
        common = dict(n_players=4, n_arms=3, horizon=60, arm_pref_mode="fixed",
                      fixed_pref_seed=99)
        a = gen_experiment_instance(ExperimentFamilyParams(seed=1, **common))
        b = gen_experiment_instance(ExperimentFamilyParams(seed=2, **common))
        full_rank = {}
        for spec in (a, b):
            for t in range(spec.horizon):
                players = set(spec.players_at[t])
                for a_id, ranking in zip(spec.arms_at[t], spec.arm_prefs_at[t]):
                    if len(players) == spec.n_players:
                        full_rank.setdefault(a_id, set()).add(ranking)
                    # every restricted ranking is a subsequence of one global order
        for a_id, rankings in full_rank.items():
            assert len(rankings) == 1  # identical across rounds AND instances

    def test_per_round_mode_varies_rankings(self):
        params = ExperimentFamilyParams(
            n_players=4, n_arms=2, horizon=200,
            player_unavailability=(0.0,) * 4, arm_unavailability=(0.0,) * 2, seed=8,
        )
        spec = gen_experiment_instance(params)
        distinct = {spec.arm_prefs_at[t][0] for t in range(200)}
        assert len(distinct) > 1

    def test_validation(self):
        with pytest.raises(ValueError):
            ExperimentFamilyParams(1, 1, 1, reward_lo=0.9, reward_hi=0.1).validate()
        with pytest.raises(ValueError):
            ExperimentFamilyParams(
                2, 2, 1, player_unavailability=(1.0, 0.5)
            ).validate()
        with pytest.raises(ValueError):
            ExperimentFamilyParams(2, 2, 1, arm_pref_mode="other").validate()


class TestHard41:
    def test_block_structure(self):
        spec = gen_hard_41(HardInstanceParams41(horizon=100, exponent=0.5, gap=0.2))
        assert spec.n_players == 11  # target + 10 fresh competitors
        clk = local_clock(spec)
        assert clk.rounds_of[2] == tuple(range(11, 21))
        assert clk.counts[0] == 100
        for k in range(1, 11):
            assert clk.counts[k] == 10

    def test_reference_unique_stable_matching(self):
        spec = gen_hard_41(HardInstanceParams41(horizon=40, block_length=10, gap=0.2))
        for t in (1, 15, 40):
            competitor = (t - 1) // 10 + 1
            stable = enumerate_stable_matchings(true_preference_instance(spec, t))
            assert stable == [{0: 0, competitor: 1}]

    def test_variant_flips_one_block(self):
        spec = gen_hard_41(
            HardInstanceParams41(horizon=40, block_length=10, gap=0.2, variant=3)
        )
        stable = enumerate_stable_matchings(true_preference_instance(spec, 25))
        assert stable == [{0: 1, 3: 0}]  # target displaced in the flipped block
        stable = enumerate_stable_matchings(true_preference_instance(spec, 5))
        assert stable == [{0: 0, 1: 1}]

    def test_leftover_rounds_have_target_alone(self):
        spec = gen_hard_41(HardInstanceParams41(horizon=25, block_length=10, gap=0.1))
        assert view(spec, 25).players == (0,)
        assert baselines(spec, 25).optimal == {0: 0}

    def test_min_gap_is_gap_parameter(self):
        spec = gen_hard_41(HardInstanceParams41(horizon=30, block_length=10, gap=0.15))
        assert min_gap(spec) == pytest.approx(0.15)

    def test_validation(self):
        with pytest.raises(ValueError):
            HardInstanceParams41(horizon=100, gap=0.3).validate()
        with pytest.raises(ValueError):
            HardInstanceParams41(horizon=100, block_length=1).validate()
        with pytest.raises(ValueError):
            HardInstanceParams41(horizon=100, block_length=10, variant=11).validate()


class TestHard42:
    def test_balanced_rotation(self):
        spec = gen_hard_42(HardInstanceParams42(n_players=3, n_arms=5, horizon=12))
        counts = {a: 0 for a in (2, 3, 4)}
        for t in range(1, 13):
            arms = view(spec, t).arms
            assert arms[:2] == (0, 1)
            counts[arms[2]] += 1
        assert counts == {2: 4, 3: 4, 4: 4}

    def test_reference_unique_stable_matching(self):
        spec = gen_hard_42(HardInstanceParams42(n_players=3, n_arms=5, horizon=6))
        for t in range(1, 7):
            variable = spec.arms_at[t - 1][-1]
            stable = enumerate_stable_matchings(true_preference_instance(spec, t))
            assert stable == [{0: 0, 1: 1, 2: variable}]

    def test_alternative_displaces_victim(self):
        spec = gen_hard_42(
            HardInstanceParams42(n_players=3, n_arms=5, horizon=6, variant=(0, 3))
        )
        for t in range(1, 7):
            variable = spec.arms_at[t - 1][-1]
            stable = enumerate_stable_matchings(true_preference_instance(spec, t))
            if variable == 3:
                assert stable == [{0: 3, 1: 1, 2: 0}]
            else:
                assert stable == [{0: 0, 1: 1, 2: variable}]

    def test_min_gap_at_most_gap_parameter(self):
        spec = gen_hard_42(HardInstanceParams42(n_players=3, n_arms=5, horizon=6, gap=0.1))
        assert min_gap(spec) <= 0.1 + 1e-12

    def test_validation(self):
        with pytest.raises(ValueError):
            HardInstanceParams42(n_players=6, n_arms=5, horizon=4).validate()
        with pytest.raises(ValueError):
            HardInstanceParams42(n_players=3, n_arms=5, horizon=4, tilt=0.02).validate()
        with pytest.raises(ValueError):
            HardInstanceParams42(n_players=3, n_arms=5, horizon=4, variant=(2, 3)).validate()
        with pytest.raises(ValueError):
            HardInstanceParams42(n_players=3, n_arms=5, horizon=4, variant=(0, 1)).validate()


class TestNamedRegistry:
    def test_fig2_fixes_player_unavailability(self):
        spec = build_named_instance(
            "fig2", dict(n_players=3, n_arms=3, horizon=2000), instance_seed=4
        )
        clk = local_clock(spec)
        for i in range(3):
            assert abs(clk.counts[i] / 2000 - 0.5) < 0.05

    def test_fig3_shares_rankings_across_instances(self):
        specs = [
            build_named_instance(
                "fig3",
                dict(n_players=3, n_arms=2, horizon=100),
                instance_seed=s,
                shared_pref_seed=123,
            )
            for s in (10, 20)
        ]
        orders: dict[int, set] = {}
        for spec in specs:
            for t in range(100):
                if len(spec.players_at[t]) == 3:
                    for arm, ranking in zip(spec.arms_at[t], spec.arm_prefs_at[t]):
                        orders.setdefault(arm, set()).add(ranking)
        assert orders and all(len(seen) == 1 for seen in orders.values())

    def test_hard_generators_ignore_seed(self):
        a = build_named_instance("hard41", dict(horizon=50, block_length=10), 1)
        b = build_named_instance("hard41", dict(horizon=50, block_length=10), 2)
        assert a.to_json() == b.to_json()

    def test_unknown_parameters_rejected(self):
        with pytest.raises(ValueError, match="unknown parameter"):
            build_named_instance("hard41", dict(horizon=50, bogus=1), 0)
        with pytest.raises(ValueError, match="unknown generator"):
            build_named_instance("fig9", dict(), 0)
