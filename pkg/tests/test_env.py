import math

import numpy as np
import pytest

from hdbandit.env import SyntheticEnv, best_action, reward_prob, sample_context, sample_reward
from hdbandit.hypervec import DimensionMismatchError


class TestParameters:
    def test_shapes_and_ranges(self):
        env = SyntheticEnv(10, 5, seed=3)
        assert env.theta.shape == (10, 5) and env.beta.shape == (10,)
        assert np.all(np.abs(env.theta) <= 1) and np.all(np.abs(env.beta) <= 1)

    def test_seed_determines_model(self):
        a, b, c = SyntheticEnv(4, 3, seed=1), SyntheticEnv(4, 3, seed=1), SyntheticEnv(4, 3, seed=2)
        np.testing.assert_array_equal(a.theta, b.theta)
        np.testing.assert_array_equal(a.beta, b.beta)
        assert not np.array_equal(a.theta, c.theta)

    def test_json_round_trip(self, tmp_path):
        env = SyntheticEnv(3, 2, seed=17)
        path = tmp_path / "env.json"
        env.save(path)
        back = SyntheticEnv.load(path)
        np.testing.assert_array_equal(back.theta, env.theta)
        np.testing.assert_array_equal(back.beta, env.beta)
        assert back.seed == 17
        np.testing.assert_array_equal(back.sample_context(), env.sample_context())

    def test_from_dict_missing_fields(self):
        with pytest.raises(ValueError):
            SyntheticEnv.from_dict({"seed": 0, "N": 1})


class TestContexts:
    def test_moments(self):
        env = SyntheticEnv(2, 4, seed=5)
        xs = env.sample_contexts(100_000)
        assert np.all(np.abs(xs.mean(axis=0)) <= 0.02)
        assert np.all(np.abs(xs.var(axis=0) - 1) <= 0.05)

    def test_batch_equals_single_draws(self):
        a, b = SyntheticEnv(2, 3, seed=8), SyntheticEnv(2, 3, seed=8)
        batch = a.sample_contexts(10)
        singles = np.stack([sample_context(b) for _ in range(10)])
        np.testing.assert_array_equal(batch, singles)

    def test_stream_separation(self):
        a, b = SyntheticEnv(3, 2, seed=4), SyntheticEnv(3, 2, seed=4)
        x = a.sample_context()
        b.sample_context()
        for _ in range(25):
            a.sample_reward(x, 1)
        np.testing.assert_array_equal(a.sample_context(), b.sample_context())


class TestRewards:
    def test_zero_model_is_half(self):
        env = SyntheticEnv(2, 3, theta=np.zeros((2, 3)), beta=np.zeros(2))
        assert reward_prob(env, np.array([5.0, -1.0, 2.0]), 0) == 0.5

    def test_logistic_value(self):
        env = SyntheticEnv(1, 3, theta=[[1.0, 0, 0]], beta=[0.0])
        assert env.reward_prob(np.array([1.0, 0, 0]), 0) == pytest.approx(1 / (1 + math.exp(-1)))
        assert env.reward_prob(np.array([1.0, 0, 0]), 0) == pytest.approx(0.7311, abs=1e-4)

    def test_monotone_in_beta(self):
        x = np.array([0.3, -0.7])
        probs = [SyntheticEnv(1, 2, theta=[[0.5, 0.5]], beta=[b]).reward_prob(x, 0)
                 for b in np.linspace(-3, 3, 13)]
        assert np.all(np.diff(probs) > 0)

    def test_probabilities_in_open_interval(self):
        env = SyntheticEnv(10, 15, seed=1)
        p = env.reward_probs(env.sample_contexts(5000))
        assert np.all((p > 0) & (p < 1))

    def test_bernoulli_frequency(self):
        env = SyntheticEnv(3, 4, seed=2)
        x = env.sample_context()
        p = env.reward_prob(x, 2)
        draws = np.array([sample_reward(env, x, 2) for _ in range(100_000)])
        assert set(np.unique(draws)) <= {0, 1}
        assert abs(draws.mean() - p) <= 0.01

    def test_uniform_block_reproduces_sample_reward(self):
        a, b = SyntheticEnv(3, 2, seed=6), SyntheticEnv(3, 2, seed=6)
        xs = a.sample_contexts(50)
        acts = np.random.default_rng(0).integers(0, 3, 50)
        u = b.reward_uniforms(50)
        expected = [int(u[t] < b.reward_prob(xs[t], acts[t])) for t in range(50)]
        assert [a.sample_reward(xs[t], acts[t]) for t in range(50)] == expected
        assert a.reward_draws == b.reward_draws == 50

    def test_same_seed_same_rewards(self):
        seqs = []
        for _ in range(2):
            env = SyntheticEnv(4, 3, seed=12)
            seqs.append([env.sample_reward(env.sample_context(), t % 4) for t in range(200)])
        assert seqs[0] == seqs[1]

    def test_errors(self):
        env = SyntheticEnv(3, 2, seed=0)
        with pytest.raises(IndexError):
            env.reward_prob(np.zeros(2), 3)
        with pytest.raises(IndexError):
            env.sample_reward(np.zeros(2), -1)
        with pytest.raises(DimensionMismatchError):
            env.reward_prob(np.zeros(3), 0)


class TestBestAction:
    def test_single_arm(self):
        env = SyntheticEnv(1, 3, seed=0)
        assert best_action(env, env.sample_context())[0] == 0

    def test_scaled_weights_win(self):
        theta0 = np.array([0.4, -0.2])
        env = SyntheticEnv(2, 2, theta=[theta0, 2 * theta0], beta=[0.1, 0.1])
        x = np.array([1.0, 0.5])
        assert x @ theta0 > 0
        assert env.best_action(x)[0] == 1

    def test_ties_to_lowest_index(self):
        env = SyntheticEnv(3, 2, theta=np.zeros((3, 2)), beta=np.zeros(3))
        assert env.best_action(np.ones(2)) == (0, 0.5)

    def test_dominates_every_arm(self):
        env = SyntheticEnv(8, 5, seed=9)
        for x in env.sample_contexts(300):
            a, p = env.best_action(x)
            assert all(p >= env.reward_prob(x, b) for b in range(8))

    def test_environment_is_learnable(self):
        env = SyntheticEnv(10, 5, seed=10)
        probs = env.reward_probs(env.sample_contexts(1000))
        assert probs.max(axis=1).mean() > probs.mean()
