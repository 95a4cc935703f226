from collections import Counter

import pytest

from banditlab.environments import (BernoulliEnv, DatasetEnv, parse_bernoulli, per_step_regret,
                                    pull_bernoulli, step_dataset)
from banditlab.rng import RandomStream


class TestBernoulli:
    def test_degenerate_arms(self):
        env, rng = BernoulliEnv((1.0, 0.0)), RandomStream(0)
        assert all(pull_bernoulli(env, 0, rng) == 1 for _ in range(1000))
        assert all(pull_bernoulli(env, 1, rng) == 0 for _ in range(1000))

    def test_mean(self):
        env, rng = BernoulliEnv((0.3, 0.5)), RandomStream(1)
        n = 100_000
        assert 0.294 <= sum(env.pull(0, rng) for _ in range(n)) / n <= 0.306

    def test_regret(self):
        env = BernoulliEnv((0.9, 0.1))
        assert per_step_regret(env, 1, 1) == pytest.approx(0.8)
        assert per_step_regret(env, 0, 0) == 0.0
        assert env.mu_star == 0.9

    @pytest.mark.parametrize("probs", [(0.5,), (0.5, 1.2), (-0.1, 0.5)])
    def test_invalid(self, probs):
        with pytest.raises(ValueError):
            BernoulliEnv(probs)

    def test_out_of_range_arm(self):
        with pytest.raises(IndexError):
            BernoulliEnv((0.1, 0.2)).pull(2, RandomStream(0))

    def test_parse(self):
        env = parse_bernoulli("bernoulli:0.9,0.1")
        assert env.probs == (0.9, 0.1)
        assert env.name == "bernoulli:0.9,0.1"
        with pytest.raises(ValueError):
            parse_bernoulli("bernoulli:a,b")
        with pytest.raises(ValueError):
            parse_bernoulli("gauss:0.1,0.2")


def emitted(env, rng, steps, arm=0):
    out = []
    for _ in range(steps):
        env.step(arm, rng)
        out.append(env.last_index)
    return out


class TestDataset:
    def test_per_pass_reward(self):
        env, rng = DatasetEnv([0, 0, 1], 2), RandomStream(2)
        for _ in range(5):
            assert sum(step_dataset(env, 0, rng)[0] for _ in range(3)) == 2

    def test_class_frequency(self):
        labels = [0] * 600 + [1] * 300 + [2] * 100
        env, rng = DatasetEnv(labels, 3), RandomStream(3)
        rewards = [env.step(0, rng)[0] for _ in range(10_000)]
        assert 0.58 <= sum(rewards) / len(rewards) <= 0.62

    def test_reshuffles(self):
        env, rng = DatasetEnv([0, 1, 2], 3), RandomStream(4)
        idx = emitted(env, rng, 7)
        assert env.passes >= 2
        for k in range(0, 6, 3):
            assert sorted(idx[k:k + 3]) == [0, 1, 2]
        assert env.cursor == 1

    def test_passes_are_fresh_permutations(self):
        env, rng = DatasetEnv([0, 1, 2, 0], 3), RandomStream(5)
        idx = emitted(env, rng, 4 * 3000)
        orders = Counter(tuple(idx[k:k + 4]) for k in range(0, len(idx), 4))
        # all 24 orders occur with roughly equal frequency
        assert len(orders) == 24
        assert max(orders.values()) < 3 * min(orders.values())

    def test_label_multiset_per_pass(self):
        labels = [0] * 5 + [1] * 3 + [2] * 2
        env, rng = DatasetEnv(labels, 3), RandomStream(6)
        for _ in range(50):
            seen = [env.step(1, rng)[1] for _ in range(len(labels))]
            assert Counter(seen) == Counter(labels)

    def test_non_stationary(self):
        env, rng = DatasetEnv([0, 1] * 10, 2), RandomStream(7)
        rewards = {env.step(0, rng)[0] for _ in range(20)}
        assert rewards == {0, 1}

    def test_regret(self):
        env = DatasetEnv([0, 1], 2)
        assert per_step_regret(env, 0, 1) == 0.0
        assert per_step_regret(env, 0, 0) == 1.0

    def test_reward_matches_label(self):
        env, rng = DatasetEnv([0, 1, 2, 1], 3), RandomStream(8)
        for t in range(100):
            arm = t % 3
            reward, label = env.step(arm, rng)
            assert reward == int(arm == label)

    def test_reset(self):
        env = DatasetEnv(list(range(5)), 5)
        a = emitted(env, RandomStream(9), 8)
        env.reset()
        assert emitted(env, RandomStream(9), 8) == a

    def test_one_draw_per_step(self):
        env, rng, ref = DatasetEnv([0, 1, 1], 2), RandomStream(10), RandomStream(10)
        emitted(env, rng, 5)
        for _ in range(5):
            ref.uniform()
        assert rng.uniform() == ref.uniform()

    @pytest.mark.parametrize("labels,k", [([], 2), ([0, 1], 1), ([0, 3], 3)])
    def test_invalid(self, labels, k):
        with pytest.raises(ValueError):
            DatasetEnv(labels, k)

    def test_out_of_range_arm(self):
        with pytest.raises(IndexError):
            DatasetEnv([0, 1], 2).step(5, RandomStream(0))
