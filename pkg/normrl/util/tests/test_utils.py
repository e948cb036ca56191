"""Test utils."""
import numpy as np
from numpy.testing import TestCase, assert_allclose, assert_equal

from normrl.util.utils import print_table, mean_and_stderr, spawn_seeds


class TestUtils(TestCase):
    def test_print_table(self):
        table = [['mode', 'return'], ['mcclt_full', '-12.5'], ['baseline_scalar', '-41.0']]
        out = print_table(table, title='ablation', centering='left')
        lines = out.split('\n')
        assert 'ablation' in lines[1]
        assert lines[3].startswith('mode')
        assert set(lines[4]) == {'-'}
        assert lines[5].startswith('mcclt_full')
        assert lines[6].startswith('baseline_scalar')
        assert out.endswith('\n')

    def test_mean_and_stderr(self):
        mean, stderr = mean_and_stderr([1.0, 2.0, 3.0, 4.0])
        assert_equal(mean, 2.5)
        assert_allclose(stderr, np.std([1, 2, 3, 4], ddof=1) / 2.0)
        assert_equal(mean_and_stderr([7.0]), (7.0, None))
        with self.assertRaises(ValueError):
            mean_and_stderr([])

    def test_spawn_seeds(self):
        seeds = spawn_seeds(0, 5)
        assert_equal(len(seeds), 5)
        assert_equal(len(set(seeds)), 5)
        assert_equal(seeds, spawn_seeds(0, 5))
        assert_equal(seeds[:3], spawn_seeds(0, 3))
        assert seeds != spawn_seeds(1, 5)
