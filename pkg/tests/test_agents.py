import math

import numpy as np
import pytest

from caviar.agents import (
    BaselinePolicy,
    LearningConfig,
    OraclePolicy,
    QPolicy,
    QTable,
    baseline_action,
    epsilon_at,
    evaluate,
    oracle_action,
    q_update,
    train,
)
from caviar.beams import dft_codebook, equivalent_magnitudes
from caviar.channel import PathComponent, synthesize_channel
from caviar.config import load_config
from caviar.env import BeamSelectionEnv

from conftest import small_config


def on_grid_theta_deg(q, n):
    u = 2 * q / n
    if u > 1.0:
        u -= 2.0
    return math.degrees(math.asin(u))


class TestOracle:
    def test_example(self):
        assert oracle_action(np.array([1.0, 5.0, 2.0])) == 1

    def test_on_grid_los(self):
        n = 64
        ct, cr = dft_codebook(n), dft_codebook(1)
        for q in (0, 9, 31):
            theta = math.radians(on_grid_theta_deg(q, n))
            h = synthesize_channel([PathComponent(1 + 0j, theta, theta, True)], n, 1)
            assert oracle_action(equivalent_magnitudes(h, ct, cr)) == q


class TestBaseline:
    def test_on_grid_angles(self):
        n = 16
        ct = dft_codebook(n)
        for q in range(n):
            assert baseline_action(on_grid_theta_deg(q, n), ct) == q

    def test_equals_oracle_under_single_path_los(self):
        n = 32
        ct, cr = dft_codebook(n), dft_codebook(1)
        rng = np.random.default_rng(12)
        for _ in range(500):
            theta_deg = rng.uniform(-85.0, 85.0)
            chi = rng.uniform(0, 2 * math.pi)
            gain = complex(math.cos(chi), math.sin(chi))
            theta = math.radians(theta_deg)
            h = synthesize_channel([PathComponent(gain, theta, theta, True)], n, 1)
            m = equivalent_magnitudes(h, ct, cr)
            assert baseline_action(theta_deg, ct) == oracle_action(m)


class TestQUpdate:
    def test_full_overwrite(self):
        table = QTable(1, (0.0, 90.0), 4)
        cfg = LearningConfig(learning_rate=1.0, discount=0.0)
        q_update(table, 10.0, 2, 7.5, 11.0, cfg)
        assert table.values[0, 2] == 7.5
        assert table.visit_counts[0, 2] == 1

    def test_geometric_convergence_matches_recurrence(self):
        # repeated (s, a, r): Q_k = r * (1 - (1-alpha)^k)
        table = QTable(1, (0.0, 90.0), 2)
        cfg = LearningConfig(learning_rate=0.1, discount=0.0)
        r = 3.0
        for k in range(1, 60):
            q_update(table, 5.0, 1, r, 5.0, cfg)
            expected = r * (1.0 - 0.9**k)
            assert table.values[0, 1] == pytest.approx(expected, rel=1e-12)

    def test_locality(self):
        table = QTable(8, (0.0, 80.0), 4)
        table.values[:] = 1.0
        before = table.values.copy()
        cfg = LearningConfig()
        q_update(table, 25.0, 3, 9.0, 26.0, cfg)
        s = table.bin_of(25.0)
        touched = np.zeros_like(before, dtype=bool)
        touched[s, 3] = True
        np.testing.assert_array_equal(table.values[~touched], before[~touched])

    def test_discounted_target_uses_next_bin_max(self):
        table = QTable(2, (0.0, 20.0), 2)
        table.values[1] = [0.0, 4.0]
        cfg = LearningConfig(learning_rate=1.0, discount=0.5)
        q_update(table, 5.0, 0, 1.0, 15.0, cfg)
        assert table.values[0, 0] == 1.0 + 0.5 * 4.0

    def test_action_range_checked(self):
        table = QTable(1, (0.0, 90.0), 2)
        with pytest.raises(ValueError):
            q_update(table, 0.0, 2, 1.0, 0.0, LearningConfig())

    def test_bin_clamping(self):
        table = QTable(10, (0.0, 50.0), 2)
        assert table.bin_of(-5.0) == 0
        assert table.bin_of(1000.0) == 9
        assert table.bin_of(0.0) == 0
        assert table.bin_of(49.999) == 9


class TestBanditConvergence:
    def test_single_bin_two_arms(self):
        # stationary rewards (1.0, 3.0): greedy settles on arm 1 and
        # Q(s, 1) approaches 3.0 geometrically
        table = QTable(1, (0.0, 90.0), 2)
        cfg = LearningConfig(learning_rate=0.1, discount=0.0)
        rewards = (1.0, 3.0)
        explore = np.random.default_rng(0)
        for step in range(500):
            eps = epsilon_at(step, 500, cfg)
            if explore.random() < eps:
                action = int(explore.integers(2))
            else:
                action = int(np.argmax(table.values[0]))
            q_update(table, 0.0, action, rewards[action], 0.0, cfg)
        assert int(np.argmax(table.values[0])) == 1
        assert abs(table.values[0, 1] - 3.0) < 0.05


class TestTraining:
    def test_zero_episodes(self):
        cfg = load_config(small_config())
        env = BeamSelectionEnv(cfg.env)
        learn = LearningConfig(episodes=0, theta_bins=4, theta_range_deg=(0.0, 90.0))
        table, curve = train(env, learn)
        assert curve == []
        assert np.all(table.values == 0.0)

    def test_training_is_deterministic(self):
        cfg = load_config(small_config())
        env = BeamSelectionEnv(cfg.env)
        learn = LearningConfig(episodes=3, theta_bins=8, theta_range_deg=(0.0, 70.0))
        t1, c1 = train(env, learn)
        t2, c2 = train(env, learn)
        assert c1 == c2
        np.testing.assert_array_equal(t1.values, t2.values)

    def test_epsilon_schedule(self):
        cfg = LearningConfig(epsilon_start=1.0, epsilon_end=0.1, epsilon_decay_fraction=0.5)
        assert epsilon_at(0, 100, cfg) == 1.0
        assert epsilon_at(25, 100, cfg) == pytest.approx(0.55)
        assert epsilon_at(50, 100, cfg) == pytest.approx(0.1)
        assert epsilon_at(99, 100, cfg) == pytest.approx(0.1)

    def test_bad_learning_config(self):
        with pytest.raises(ValueError):
            LearningConfig(learning_rate=0.0)
        with pytest.raises(ValueError):
            LearningConfig(discount=1.5)
        with pytest.raises(ValueError):
            LearningConfig(episodes=-1)


class TestQTableIO:
    def test_round_trip(self, tmp_path):
        table = QTable(4, (0.0, 66.0), 8)
        table.values[:] = np.arange(32, dtype=float).reshape(4, 8)
        table.visit_counts[:] = 2
        table.save(tmp_path / "q.json")
        back = QTable.load(tmp_path / "q.json")
        assert back.bins == 4
        assert back.theta_range_deg == (0.0, 66.0)
        np.testing.assert_array_equal(back.values, table.values)
        np.testing.assert_array_equal(back.visit_counts, table.visit_counts)

    def test_reloaded_policy_greedy_actions_match(self, tmp_path):
        cfg = load_config(small_config())
        env = BeamSelectionEnv(cfg.env)
        learn = LearningConfig(episodes=2, theta_bins=8, theta_range_deg=(0.0, 70.0))
        table, _ = train(env, learn)
        table.save(tmp_path / "q.json")
        back = QTable.load(tmp_path / "q.json")
        for theta in np.linspace(0.0, 70.0, 57):
            assert back.greedy_action(theta) == table.greedy_action(theta)


class TestEvaluate:
    def test_oracle_summary_equals_optimum(self):
        cfg = load_config(small_config())
        env = BeamSelectionEnv(cfg.env)
        report = evaluate(env, [OraclePolicy()], seeds=[1, 2])
        assert report.policies["oracle"].mean == pytest.approx(report.optimum.mean)
        np.testing.assert_allclose(report.rewards["oracle"], report.optimum_trace)

    def test_oracle_dominates_pointwise(self):
        cfg = load_config(small_config())
        env = BeamSelectionEnv(cfg.env)
        table = QTable(8, (0.0, 70.0), env.n_actions)
        report = evaluate(
            env,
            [BaselinePolicy(env.tx_codebook), QPolicy(table)],
            seeds=[0],
        )
        for trace in report.rewards.values():
            assert np.all(trace <= report.optimum_trace + 1e-12)

    def test_baseline_equals_oracle_in_pure_los(self):
        cfg = load_config(
            small_config(
                **{
                    "channel.num_paths": 1,
                    "scene.nlos_angle_masks_deg": [],
                }
            )
        )
        env = BeamSelectionEnv(cfg.env)
        report = evaluate(env, [BaselinePolicy(env.tx_codebook)], seeds=[0, 1, 2])
        np.testing.assert_allclose(
            report.rewards["baseline"], report.optimum_trace, atol=1e-12
        )

    def test_reward_scale_equivariance(self):
        base = small_config()
        scaled = small_config(
            **{
                "channel.los_amplitude": 3.0,
                "channel.nlos_sigma": 1.5,
            }
        )
        c = 3.0
        env_a = BeamSelectionEnv(load_config(base).env)
        env_b = BeamSelectionEnv(load_config(scaled).env)
        rep_a = evaluate(env_a, [BaselinePolicy(env_a.tx_codebook)], seeds=[4])
        rep_b = evaluate(env_b, [BaselinePolicy(env_b.tx_codebook)], seeds=[4])
        np.testing.assert_allclose(rep_b.optimum_trace, c * rep_a.optimum_trace, rtol=1e-12)
        np.testing.assert_allclose(
            rep_b.rewards["baseline"], c * rep_a.rewards["baseline"], rtol=1e-12
        )

    def test_los_nlos_split(self):
        cfg = load_config(small_config())
        env = BeamSelectionEnv(cfg.env)
        report = evaluate(env, [BaselinePolicy(env.tx_codebook)], seeds=[0])
        los = report.los
        np.testing.assert_allclose(
            report.optimum.mean_los, report.optimum_trace[los].mean()
        )
        np.testing.assert_allclose(
            report.optimum.mean_nlos, report.optimum_trace[~los].mean()
        )


class TestLearningCurve:
    def test_curve_trends_upward_with_decaying_exploration(self):
        cfg = load_config(small_config(**{"train.episodes": 30}))
        env = BeamSelectionEnv(cfg.env)
        learn = LearningConfig(episodes=30, theta_bins=16, theta_range_deg=(0.0, 70.0))
        _, curve = train(env, learn)
        assert len(curve) == 30
        assert np.mean(curve[-10:]) > np.mean(curve[:10])
