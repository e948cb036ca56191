"""Test checkpoint files."""
import os
import tempfile

import numpy as np
from numpy.testing import TestCase, assert_array_equal

from normrl.nn import Mlp, save_checkpoint, load_checkpoint


class TestCheckpoint(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmp.name, 'net.ckpt')

    def tearDown(self):
        self.tmp.cleanup()

    def test_bit_exact(self):
        net = Mlp((4, 7, 3), activation='relu', rng=np.random.default_rng(0))
        extra = np.array([-0.5, np.pi])
        save_checkpoint(self.path, net, extra=extra, kind='policy', env='lq_chain')
        loaded, loaded_extra, meta = load_checkpoint(self.path)
        assert loaded.layer_dims == (4, 7, 3)
        assert loaded.activation == 'relu'
        assert_array_equal(loaded.get_flat(), net.get_flat())
        assert_array_equal(loaded_extra, extra)
        assert meta == {'kind': 'policy', 'env': 'lq_chain'}

    def test_header(self):
        save_checkpoint(self.path, Mlp((2, 1)))
        with open(self.path, encoding='ascii') as f:
            header = f.readline()
        assert header.startswith('normrl-checkpoint v1 activation=tanh dims=2,1 extra=0')

    def test_rejects_bad_files(self):
        with open(self.path, 'w', encoding='ascii') as f:
            f.write('something else\n')
        with self.assertRaises(ValueError):
            load_checkpoint(self.path)

        save_checkpoint(self.path, Mlp((2, 2)))
        with open(self.path, 'a', encoding='ascii') as f:
            f.write('0x1.0p+0\n')
        with self.assertRaises(ValueError):
            load_checkpoint(self.path)

    def test_metadata_without_spaces(self):
        with self.assertRaises(ValueError):
            save_checkpoint(self.path, Mlp((2, 1)), note='two words')
