"""Test the normal fit, the uncertainty error and the weight."""
import numpy as np
from numpy.testing import TestCase, assert_allclose
from scipy.special import expit

from normrl.stats import quantile_z_grid
from normrl.uncertainty import fit_normal, uncertainty_error, uncertainty_weight, EPS_SIGMA


class TestFitNormal(TestCase):
    def test_standard_bars(self):
        z = quantile_z_grid(4).z
        fit = fit_normal(z)
        assert_allclose(fit.q_avg, 0.0, atol=1e-15)
        assert_allclose(fit.sigma_avg, 1.0, rtol=1e-14)
        assert_allclose(fit.reconstructed, z, atol=1e-14)

    def test_affine(self):
        z = quantile_z_grid(7).z
        fit = fit_normal(2.5 * z - 1.0)
        assert_allclose(fit.sigma_avg, 2.5, rtol=1e-13)
        assert_allclose(fit.reconstructed, 2.5 * z - 1.0, atol=1e-12)

    def test_clamped_bars(self):
        z = quantile_z_grid(4).z
        fit = fit_normal([0.0, 0.0, 0.0, 1.0])
        sig = np.array([(0 - 0.25) / z[0], (0 - 0.25) / z[1], EPS_SIGMA, 0.75 / z[3]])
        assert_allclose(fit.q_avg, 0.25)
        assert_allclose(fit.sigma_avg, sig.mean(), rtol=1e-14)
        assert_allclose(fit.reconstructed, 0.25 + sig.mean() * z, rtol=1e-14)

    def test_batch(self):
        z = quantile_z_grid(5).z
        q = np.stack([z, 3.0 * z + 1.0])
        fit = fit_normal(q)
        assert_allclose(fit.sigma_avg, [1.0, 3.0], rtol=1e-13)
        assert fit.reconstructed.shape == (2, 5)

    def test_errors(self):
        with self.assertRaises(ValueError):
            fit_normal([1.0])
        with self.assertRaises(ValueError):
            fit_normal([1.0, 2.0, 3.0], quantile_z_grid(4))


class TestUncertaintyError(TestCase):
    def test_exact_normal_bars(self):
        rng = np.random.default_rng(3)
        for _ in range(1000):
            n = int(rng.integers(2, 65))
            mu = rng.uniform(-100, 100)
            sigma = rng.uniform(EPS_SIGMA, 50)
            q = mu + sigma * quantile_z_grid(n).z
            assert uncertainty_error(q) <= 1e-18 * max(1.0, mu**2 + sigma**2) * n

    def test_homogeneity(self):
        rng = np.random.default_rng(4)
        z = quantile_z_grid(10).z
        for _ in range(50):
            q = 2.0 * z + 0.01 * rng.standard_normal(10)
            a = rng.uniform(0.1, 10)
            assert_allclose(uncertainty_error(a * q + 3.0), a**2 * uncertainty_error(q),
                            rtol=1e-9)

    def test_perturbed_bar(self):
        z = quantile_z_grid(4).z
        q = z.copy()
        q[3] += 0.1
        q_avg = q.mean()
        sigma = np.mean((q - q_avg) / z)
        expected = np.sum((q - (q_avg + sigma * z))**2)
        assert_allclose(uncertainty_error(q), expected, rtol=1e-12)


class TestUncertaintyWeight(TestCase):
    def test_values(self):
        assert uncertainty_weight(0.0, 1.0) == 1.0
        assert_allclose(uncertainty_weight(1.0, 1.0), 0.76894, atol=1e-5)
        assert_allclose(uncertainty_weight(1.0, 1.0), expit(-1.0) + 0.5)

    def test_range_and_monotone(self):
        E = np.linspace(0.0, 30.0, 301)
        w = uncertainty_weight(E, 1.0)
        assert np.all(w > 0.5) and np.all(w <= 1.0)
        assert np.all(np.diff(w) < 0)
        # far in the tail the sigmoid underflows and w is 0.5 in floating point
        assert uncertainty_weight(1e4, 1.0) == 0.5

    def test_errors(self):
        with self.assertRaises(ValueError):
            uncertainty_weight(-1.0, 1.0)
        with self.assertRaises(ValueError):
            uncertainty_weight(1.0, 0.0)
        with self.assertRaises(ValueError):
            uncertainty_weight(np.nan, 1.0)
