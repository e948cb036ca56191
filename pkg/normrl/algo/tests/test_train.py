"""Test the training loop and the ablation modes."""
import math
import os
import tempfile

import numpy as np
from numpy.testing import TestCase, assert_allclose, assert_array_equal, assert_equal
import pytest

from normrl.algo import (train, METRIC_COLUMNS, value_targets, load_policy,
                         load_value_function)
from normrl.config import TrainConfig, AblationMode, Algorithm
from normrl.diag import estimated_std_curve, empirical_return_std, trend
from normrl.policy import GaussianPolicy
from normrl.rollout import episode_rewards, evaluate
from normrl.schedule import EpisodeStats
from normrl.stats import quantile_z_grid
from normrl.util.utils import mean_and_stderr
from normrl.value import QuantileValueFunction, ScalarValueFunction
from normrl.value.quantile import call_counts


def tiny(**overrides):
    settings = {'env': 'point_mass_reach', 'env_max_steps': 20, 'epochs': 2,
                'steps_per_epoch': 60, 'n_quantiles': 8, 'quantile_hidden': (16,),
                'value_hidden': (16,), 'policy_hidden': (8,), 'train_pi_iters': 3,
                'train_v_iters': 3, 'value_minibatch': 16}
    settings.update(overrides)
    return TrainConfig(**settings)


def read(path):
    with open(path, 'rb') as f:
        return f.read()


class TestTrain(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def run_dir(self, name):
        return os.path.join(self.tmp.name, name)

    def test_metrics(self):
        result = train(tiny())
        assert_equal(len(result.metrics), 2)
        for epoch, row in enumerate(result.metrics):
            assert_equal(tuple(row), METRIC_COLUMNS)
            assert_equal(row['epoch'], epoch)
            assert_equal(row['env_steps'], 60 * (epoch + 1))
            assert_equal(row['ep_len_mean'], 20.0)
            assert 0.5 < row['mean_w'] <= 1.0
        assert_equal(result.stats.l_cur, 20.0)
        assert isinstance(result.value_fn, QuantileValueFunction)

    def test_baseline_never_uses_quantiles(self):
        before = dict(call_counts)
        result = train(tiny(mode=AblationMode.BASELINE_SCALAR))
        assert_equal(dict(call_counts), before)
        assert isinstance(result.value_fn, ScalarValueFunction)
        assert all(row['mean_w'] == 1.0 for row in result.metrics)

    def test_unweighted_modes(self):
        for mode in [AblationMode.MCCLT_NO_W, AblationMode.DVF_BELLMAN]:
            result = train(tiny(mode=mode))
            assert all(row['mean_w'] == 1.0 for row in result.metrics)

    def test_weight_neutrality(self):
        train(tiny(mode=AblationMode.MCCLT_NO_W, epochs=3), self.run_dir('no_w'))
        train(tiny(mode=AblationMode.MCCLT_FULL, epochs=3, force_unit_weight=True),
              self.run_dir('unit'))
        assert_equal(read(os.path.join(self.run_dir('no_w'), 'metrics.csv')),
                     read(os.path.join(self.run_dir('unit'), 'metrics.csv')))

    def test_deterministic(self):
        for algorithm in Algorithm:
            cfg = tiny(algorithm=algorithm, policy_minibatch=20)
            train(cfg, self.run_dir('a'))
            train(cfg, self.run_dir('b'))
            assert_equal(read(os.path.join(self.run_dir('a'), 'metrics.csv')),
                         read(os.path.join(self.run_dir('b'), 'metrics.csv')))
            other = train(tiny(algorithm=algorithm, policy_minibatch=20, seed=1))
            first = train(cfg)
            assert other.metrics != first.metrics

    def test_trpo_trust_region(self):
        # twenty updates; rejected steps report a KL of exactly zero
        cfg = tiny(algorithm=Algorithm.TRPO, epochs=20, steps_per_epoch=100)
        kls = [row['mean_kl'] for row in train(cfg).metrics]
        assert_equal(len(kls), 20)
        assert all(kl <= cfg.kl_delta for kl in kls)
        assert sum(kl > 0.0 for kl in kls) >= 10

    def test_no_completed_episode(self):
        with self.assertWarns(UserWarning):
            result = train(tiny(env_max_steps=100, epochs=1), self.run_dir('long'))
        assert math.isnan(result.metrics[0]['ep_ret_mean'])
        assert_equal(len(result.stats), 0)
        with open(os.path.join(self.run_dir('long'), 'metrics.csv'), encoding='utf-8') as f:
            assert 'nan' in f.read().split('\n')[1]

    def test_checkpoints(self):
        result = train(tiny(), self.run_dir('full'))
        ckpt = os.path.join(self.run_dir('full'), 'checkpoints')
        policy, meta = load_policy(os.path.join(ckpt, 'policy.ckpt'))
        assert_array_equal(policy.get_flat(), result.policy.get_flat())
        assert_equal(meta['env'], 'point_mass_reach')
        vf, meta = load_value_function(os.path.join(ckpt, 'quantile_value.ckpt'))
        assert_array_equal(vf.net.get_flat(), result.value_fn.net.get_flat())
        assert_equal(vf.kappa, 1.0)
        assert not os.path.exists(os.path.join(ckpt, 'scalar_value.ckpt'))
        with self.assertRaises(ValueError):
            load_value_function(os.path.join(ckpt, 'policy.ckpt'))

        train(tiny(mode=AblationMode.BASELINE_SCALAR), self.run_dir('base'))
        ckpt = os.path.join(self.run_dir('base'), 'checkpoints')
        assert os.path.exists(os.path.join(ckpt, 'scalar_value.ckpt'))
        assert not os.path.exists(os.path.join(ckpt, 'quantile_value.ckpt'))
        with self.assertRaises(ValueError):
            load_policy(os.path.join(ckpt, 'scalar_value.ckpt'))

    def test_dump_trajectories(self):
        train(tiny(dump_trajectories=True), self.run_dir('dump'))
        names = sorted(os.listdir(os.path.join(self.run_dir('dump'), 'trajectories')))
        assert_equal(names, ['epoch0000.jsonl', 'epoch0001.jsonl'])


class TestValueTargets(TestCase):
    def setUp(self):
        self.data = {'rew': np.array([1.0, 2.0]), 'done': np.array([False, True]),
                     'next_obs': np.zeros((2, 2)), 'obs': np.zeros((2, 2)),
                     't': np.array([0, 5]), 'ret': np.array([4.0, 2.0]),
                     'rtg': np.array([3.0, 2.0])}
        self.vf = QuantileValueFunction(2, n_quantiles=3, hidden=(4,))
        self.vf.net.biases[-1][:] = [0.0, 1.0, 2.0]

    def test_baseline(self):
        cfg = tiny(mode=AblationMode.BASELINE_SCALAR)
        vf = ScalarValueFunction(2, hidden=(4,))
        assert_array_equal(value_targets(self.data, cfg, vf, EpisodeStats()), [4.0, 2.0])

    def test_bellman(self):
        cfg = tiny(mode=AblationMode.DVF_BELLMAN, n_quantiles=3, gamma=0.5)
        targets = value_targets(self.data, cfg, self.vf, EpisodeStats())
        assert_allclose(targets, [[1.0, 1.5, 2.0], [2.0, 2.0, 2.0]])

    def test_bellman_bootstraps_through_time_limit(self):
        # only a true termination zeroes the next bars; a time-limit end keeps them
        data = dict(self.data, done=np.array([False, False]),
                    truncated=np.array([False, True]))
        cfg = tiny(mode=AblationMode.DVF_BELLMAN, n_quantiles=3, gamma=0.5)
        targets = value_targets(data, cfg, self.vf, EpisodeStats())
        assert_allclose(targets, [[1.0, 1.5, 2.0], [2.0, 2.5, 3.0]])

    def test_normal_targets(self):
        z = quantile_z_grid(3).z
        # no episode seen yet: G_cur = 0, so the variance is the floor everywhere
        cfg = tiny(mode=AblationMode.MCCLT_NO_W, n_quantiles=3, sigma_sq_min=4.0, gamma=1.0)
        targets = value_targets(self.data, cfg, self.vf, EpisodeStats())
        assert_allclose(targets, np.array([[3.0], [2.0]]) + 2.0 * z)
        # discounted problems centre on the discounted return
        cfg = tiny(mode=AblationMode.MCCLT_NO_W, n_quantiles=3, sigma_sq_min=4.0,
                   gamma=0.99)
        targets = value_targets(self.data, cfg, self.vf, EpisodeStats())
        assert_allclose(targets, np.array([[4.0], [2.0]]) + 2.0 * z)

        cfg = tiny(mode=AblationMode.MCCLT_FULL, n_quantiles=3, sigma_sq_min=4.0,
                   target_mean='td', gamma=0.5)
        targets = value_targets(self.data, cfg, self.vf, EpisodeStats())
        # r + gamma * mean(q(s')) before termination, r after
        assert_allclose(targets, np.array([[1.5], [2.0]]) + 2.0 * z)


@pytest.mark.slow
class TestLearningTrends(TestCase):
    """Longer runs checking the qualitative behaviour of the modes."""

    def settings(self, **overrides):
        settings = {'steps_per_epoch': 2000, 'epochs': 25, 'quantile_hidden': (64, 64),
                    'n_quantiles': 32}
        settings.update(overrides)
        return TrainConfig(**settings)

    def test_std_curve_contrast(self):
        slopes = {AblationMode.DVF_BELLMAN: [], AblationMode.MCCLT_FULL: []}
        for mode, values in slopes.items():
            for seed in range(5):
                result = train(self.settings(env='lq_chain', mode=mode, seed=seed))
                episodes = episode_rewards(result.policy, 'lq_chain', 10, seed=100 + seed,
                                           deterministic=False, return_states=True)
                t, std = estimated_std_curve(result.value_fn, [s for _, s in episodes])
                values.append(trend(t, std)['spearman'])
        assert sum(s > 0 for s in slopes[AblationMode.DVF_BELLMAN]) >= 4
        assert sum(s < 0 for s in slopes[AblationMode.MCCLT_FULL]) >= 4

    def test_return_std_shrinks_along_the_episode(self):
        result = train(self.settings(env='point_mass_reach'))
        table = empirical_return_std(result.policy, 'point_mass_reach', episodes=100,
                                     seed=7)
        std = table[:, 1]
        assert np.sum(np.diff(std) > 0) <= 1
        assert std[-1] < 0.05 * std[0]

    def test_learns_above_random(self):
        env = 'point_mass_reach'
        random_policy = GaussianPolicy(5, 2, rng=np.random.default_rng(0))
        random_stats = evaluate(random_policy, env, 20, seed=0, deterministic=False)
        for algorithm in Algorithm:
            finals = []
            for seed in range(5):
                result = train(self.settings(env=env, algorithm=algorithm, epochs=50,
                                             seed=seed))
                score = evaluate(result.policy, env, 10, seed=1000 + seed)
                finals.append(score['mean_return'])
            mean, stderr = mean_and_stderr(finals)
            assert mean > random_stats['mean_return'] + 3 * stderr
