"""Test GAE and advantage normalization."""
import numpy as np
from numpy.testing import TestCase, assert_allclose

from normrl.advantage import discount_cumsum, gae, normalize_advantages


def gae_double_loop(rewards, values, gamma, lam):
    T = len(rewards)
    deltas = [rewards[t] + gamma * values[t + 1] - values[t] for t in range(T)]
    return np.array([sum((gamma * lam)**(k - t) * deltas[k] for k in range(t, T))
                     for t in range(T)])


class TestGae(TestCase):
    def test_single_step(self):
        est = gae([2.0], [0.5, 0.0], gamma=0.9, lam=0.3)
        assert_allclose(est.advantages, [1.5])

    def test_lambda_zero_is_td_residual(self):
        r = np.array([1.0, -2.0, 0.5])
        v = np.array([0.3, 0.1, -0.4, 0.7])
        est = gae(r, v, gamma=0.95, lam=0.0)
        assert_allclose(est.advantages, r + 0.95 * v[1:] - v[:-1], rtol=1e-14)

    def test_monte_carlo_limit(self):
        r = np.array([1.0, 2.0, 3.0])
        v = np.array([0.5, -1.0, 2.0, 0.0])
        est = gae(r, v, gamma=1.0, lam=1.0)
        assert_allclose(est.advantages, [6.0 - 0.5, 5.0 + 1.0, 3.0 - 2.0])
        assert_allclose(est.returns_to_go, [6.0, 5.0, 3.0])

    def test_double_loop_oracle(self):
        rng = np.random.default_rng(0)
        r = rng.standard_normal(20)
        v = rng.standard_normal(21)
        est = gae(r, v[:-1], gamma=0.99, lam=0.95, terminal_bootstrap=v[-1])
        assert_allclose(est.advantages, gae_double_loop(r, v, 0.99, 0.95), rtol=1e-10)

    def test_shape_error(self):
        with self.assertRaises(ValueError):
            gae([1.0, 2.0], [0.0, 0.0])

    def test_discount_cumsum(self):
        assert_allclose(discount_cumsum([1.0, 1.0, 1.0], 0.5), [1.75, 1.5, 1.0])


class TestNormalize(TestCase):
    def test_examples(self):
        assert_allclose(normalize_advantages([1.0, 3.0]), [-1.0, 1.0])
        assert_allclose(normalize_advantages([5.0, 5.0, 5.0]), [0.0, 0.0, 0.0])

    def test_idempotent(self):
        a = normalize_advantages(np.random.default_rng(1).standard_normal(50))
        assert_allclose(normalize_advantages(a), a, atol=1e-12)

    def test_too_small(self):
        with self.assertRaises(ValueError):
            normalize_advantages([1.0])
