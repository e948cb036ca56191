"""Test the MLP forward pass, backpropagation and the forward-mode derivative."""
import numpy as np
from numpy.testing import TestCase, assert_allclose, assert_array_equal

from normrl.nn import Mlp, forward, backward
from normrl.nn.mlp import orthogonal
from normrl.util.linalg import approximate_gradient, relative_error


def hand_forward(net, x):
    a = x
    for k, (W, b) in enumerate(zip(net.weights, net.biases)):
        z = a.dot(W) + b
        a = z if k == len(net.weights) - 1 else np.tanh(z)
    return a


class TestForward(TestCase):
    def test_zero_net(self):
        net = Mlp((3, 5, 2))
        net.biases[-1][:] = [0.25, -1.5]
        assert_array_equal(forward(net, np.array([7.0, -3.0, 2.0])), [0.25, -1.5])

    def test_identity_layer(self):
        net = Mlp((3, 3))
        net.weights[0][:] = np.eye(3)
        x = np.array([0.1, -2.0, 3.3])
        assert_array_equal(net.forward(x), x)

    def test_hand_oracle(self):
        net = Mlp((4, 16, 8, 3), activation='tanh', rng=np.random.default_rng(0))
        x = np.random.default_rng(1).standard_normal((5, 4))
        assert_allclose(net.forward(x), hand_forward(net, x), rtol=1e-12)
        assert_allclose(net.forward(x[2]), hand_forward(net, x[2]), rtol=1e-12)

    def test_bad_input(self):
        net = Mlp((4, 3))
        with self.assertRaises(ValueError):
            net.forward(np.zeros(3))
        with self.assertRaises(ValueError):
            Mlp((4,))
        with self.assertRaises(ValueError):
            Mlp((4, 3), activation='sigmoid')

    def test_orthogonal(self):
        W = orthogonal((6, 3), 2.0, np.random.default_rng(2))
        assert_allclose(W.T.dot(W), 4.0 * np.eye(3), atol=1e-12)
        W = orthogonal((3, 6), 1.0, np.random.default_rng(2))
        assert_allclose(W.dot(W.T), np.eye(3), atol=1e-12)

    def test_flat_round_trip(self):
        net = Mlp((3, 4, 2), rng=np.random.default_rng(3))
        other = Mlp((3, 4, 2))
        other.set_flat(net.get_flat())
        x = np.ones(3)
        assert_array_equal(other.forward(x), net.forward(x))
        with self.assertRaises(ValueError):
            other.set_flat(np.zeros(net.size + 1))

    def test_copy_is_independent(self):
        net = Mlp((3, 4, 2), rng=np.random.default_rng(3))
        twin = net.copy()
        twin.weights[0][0, 0] += 1.0
        assert net.weights[0][0, 0] != twin.weights[0][0, 0]


class TestBackward(TestCase):
    def test_zero_output_grad(self):
        net = Mlp((3, 4, 2), rng=np.random.default_rng(0))
        grads, dx = backward(net, np.ones((2, 3)), np.zeros((2, 2)))
        for g in grads:
            assert not np.any(g)
        assert not np.any(dx)

    def test_single_linear_layer(self):
        net = Mlp((3, 2), rng=np.random.default_rng(0))
        x = np.array([1.0, -2.0, 0.5])
        g = np.array([0.3, -1.1])
        grads, dx = net.backward(x, g)
        assert_allclose(grads[0], np.outer(x, g))
        assert_allclose(grads[1], g)
        assert_allclose(dx, net.weights[0].dot(g))

    def test_finite_differences(self):
        for activation in ['tanh', 'relu']:
            rng = np.random.default_rng(5)
            net = Mlp((3, 6, 5, 2), activation=activation, rng=rng)
            for b in net.biases:
                b[:] = 0.1 * rng.standard_normal(b.shape)
            x = rng.standard_normal((4, 3))
            g = rng.standard_normal((4, 2))

            def objective(net=net, x=x, g=g):
                return float(np.sum(g * net.forward(x)))

            grads, dx = net.backward(x, g)
            fd = approximate_gradient(objective, net.params, h=1e-5)
            assert relative_error(grads, fd) < 1e-4
            fdx = approximate_gradient(objective, [x], h=1e-5)
            assert relative_error([dx], fdx) < 1e-4


class TestJvp(TestCase):
    def test_directional_derivative(self):
        rng = np.random.default_rng(7)
        net = Mlp((3, 8, 2), activation='tanh', rng=rng)
        x = rng.standard_normal((5, 3))
        tangents = [rng.standard_normal(p.shape) for p in net.params]
        theta = net.get_flat()
        v = np.concatenate([t.ravel() for t in tangents])
        h = 1e-6
        net.set_flat(theta + h * v)
        fplus = net.forward(x)
        net.set_flat(theta - h * v)
        fminus = net.forward(x)
        net.set_flat(theta)
        assert_allclose(net.jvp(x, tangents), (fplus - fminus) / (2 * h),
                        rtol=1e-6, atol=1e-8)
