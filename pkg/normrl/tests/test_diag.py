"""Test the critic and return diagnostics."""
import json
import math
import os
import tempfile

import numpy as np
from numpy.testing import TestCase, assert_allclose, assert_array_equal, assert_equal

from normrl.diag import (estimated_std_curve, return_to_go_std, empirical_return_std,
                         normality_gap, quantile_crossing_rate, trend, normality_summary,
                         write_csv, write_json, TABLE_FRACTIONS)
from normrl.policy import GaussianPolicy
from normrl.stats import quantile_z_grid
from normrl.uncertainty import uncertainty_error
from normrl.value import QuantileValueFunction, ScalarValueFunction


class SpreadCritic:
    """Normal bars with mean 1 and standard deviation given by the first state entry."""

    def __init__(self, n):
        self.z = quantile_z_grid(n).z

    def predict_quantiles(self, states):
        states = np.atleast_2d(states)
        return 1.0 + np.outer(states[:, 0], self.z)


class TestStdCurve(TestCase):
    def test_constant_spread(self):
        t, std = estimated_std_curve(SpreadCritic(5), [np.full((3, 2), 2.0)])
        assert_array_equal(t, [0, 1, 2])
        assert_allclose(std, [2.0, 2.0, 2.0], rtol=1e-12)

    def test_ragged_average_and_smoothing(self):
        trajectories = [np.array([[1.0], [2.0], [3.0]]), np.array([[3.0], [4.0]])]
        _, raw = estimated_std_curve(SpreadCritic(4), trajectories, smoothing=0.0)
        assert_allclose(raw, [2.0, 3.0, 3.0], rtol=1e-12)
        _, smoothed = estimated_std_curve(SpreadCritic(4), trajectories, smoothing=0.5)
        assert_allclose(smoothed, [2.0, 2.5, 2.75], rtol=1e-12)

    def test_errors(self):
        with self.assertRaises(ValueError):
            estimated_std_curve(ScalarValueFunction(2, hidden=(3,)), [np.zeros((2, 2))])
        with self.assertRaises(ValueError):
            estimated_std_curve(SpreadCritic(4), [np.ones((2, 1))], smoothing=1.0)
        with self.assertRaises(ValueError):
            estimated_std_curve(SpreadCritic(4), [np.zeros((0, 1))])


class TestReturnStd(TestCase):
    def test_hand_computed(self):
        table = return_to_go_std([[1.0, 1.0], [3.0, 1.0]], [0.0, 0.5, 1.0])
        assert_allclose(table, [[0.0, 1.0], [0.5, 0.0], [1.0, 0.0]])

    def test_last_step_and_ragged(self):
        # f = 1 keeps the final reward; episode lengths may differ
        table = return_to_go_std([[0.0, 0.0, 2.0], [5.0, 4.0]], [0.0, 1.0])
        assert_allclose(table[:, 1], [np.std([2.0, 9.0]), np.std([2.0, 4.0])])

    def test_errors(self):
        with self.assertRaises(ValueError):
            return_to_go_std([[1.0]])
        with self.assertRaises(ValueError):
            return_to_go_std([[1.0], []])
        with self.assertRaises(ValueError):
            return_to_go_std([[1.0], [2.0]], [1.5])

    def test_policy_table(self):
        policy = GaussianPolicy(4, 1, hidden=(4,), rng=np.random.default_rng(0))
        table = empirical_return_std(policy, 'lq_chain', episodes=8, seed=2,
                                     max_episode_steps=10)
        assert_array_equal(table[:, 0], TABLE_FRACTIONS)
        assert np.all(table[:, 1] >= 0.0)
        again = empirical_return_std(policy, 'lq_chain', episodes=8, seed=2, n_workers=2,
                                     max_episode_steps=10)
        assert_array_equal(table, again)
        with self.assertRaises(ValueError):
            empirical_return_std(policy, 'lq_chain', episodes=1)


class TestNormality(TestCase):
    def test_exact_normal_bars(self):
        for n in [2, 5, 16, 101]:
            q = 3.0 + 2.0 * quantile_z_grid(n).z
            assert_allclose(normality_gap(q), 1.0 / (n + 1), rtol=1e-8)

    def test_equal_bars(self):
        assert_equal(normality_gap(np.full(6, 4.0)), 0.5)

    def test_batch(self):
        z = quantile_z_grid(8).z
        q = np.array([z, np.full(8, 1.0), 10.0 * z[::-1]])
        gaps = normality_gap(q)
        assert_equal(gaps.shape, (3,))
        assert_allclose(gaps[:2], [1.0 / 9, 0.5], rtol=1e-8)
        # reversed bars clamp every sigma_i, so the fitted normal collapses
        assert_allclose(gaps[2], 5.0 / 9, rtol=1e-12)
        assert np.all((gaps >= 0.0) & (gaps <= 1.0))

    def test_agrees_with_uncertainty_error(self):
        z = quantile_z_grid(10).z
        shuffled = 2.0 * z[[0, 1, 2, 3, 4, 5, 6, 8, 7, 9]]
        bars = np.array([2.0 * z, shuffled, 2.0 * z[::-1]])
        gaps = normality_gap(bars)
        errors = uncertainty_error(bars)
        assert np.all(np.diff(gaps) > 0.0)
        assert np.all(np.diff(errors) > 0.0)

    def test_crossing_rate(self):
        assert_allclose(quantile_crossing_rate([0.0, 2.0, 1.0, 3.0]), 1.0 / 3)
        assert_equal(quantile_crossing_rate([[0.0, 1.0], [1.0, 0.0]]), 0.5)
        with self.assertRaises(ValueError):
            quantile_crossing_rate([1.0])

    def test_summary(self):
        vf = QuantileValueFunction(2, n_quantiles=6, hidden=(8,),
                                   rng=np.random.default_rng(0))
        summary = normality_summary(vf, np.random.default_rng(1).standard_normal((5, 2)))
        assert_equal(sorted(summary),
                     ['crossing_rate', 'error_mean', 'gap_max', 'gap_mean', 'states'])
        assert_equal(summary['states'], 5)
        assert summary['gap_mean'] <= summary['gap_max']


class TestTrend(TestCase):
    def test_monotone(self):
        t = np.arange(6)
        assert_allclose(trend(t, t**2)['spearman'], 1.0)
        assert_allclose(trend(t, -t)['spearman'], -1.0)

    def test_constant(self):
        result = trend(np.arange(4), np.ones(4))
        assert math.isnan(result['spearman']) and math.isnan(result['pvalue'])

    def test_errors(self):
        with self.assertRaises(ValueError):
            trend([0, 1], [1.0])


class TestWriters(TestCase):
    def test_files(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'out.csv')
            write_csv(path, ('timestep', 'std'), [(0, 0.1), (1, np.float64(1 / 3))])
            with open(path, encoding='utf-8') as f:
                assert_equal(f.read(), 'timestep,std\n0,0.1\n1,0.3333333333333333\n')

            path = os.path.join(tmp, 'out.json')
            write_json(path, {'b': math.nan, 'a': [np.float64(0.5), np.int64(3)]})
            with open(path, encoding='utf-8') as f:
                text = f.read()
            assert_equal(json.loads(text), {'a': [0.5, 3], 'b': None})
            assert text.index('"a"') < text.index('"b"')
