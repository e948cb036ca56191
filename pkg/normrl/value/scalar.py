"""Scalar value function baseline."""

import numpy as np

from ..nn import Mlp


class ScalarValueFunction:
    """State to expected return, fitted by mean squared error.

    Attributes
    ----------
    net : Mlp
        relu network with one linear output.

    """

    def __init__(self, obs_dim, hidden=(64, 64), rng=None, activation='relu', net=None):
        if net is None:
            net = Mlp((obs_dim, *hidden, 1), activation=activation, rng=rng)
        elif net.layer_dims[0] != obs_dim or net.layer_dims[-1] != 1:
            raise ValueError(f'{net} is not a scalar value network on {obs_dim} inputs')
        self.net = net

    def __repr__(self):
        """Describe the value function."""
        return f'ScalarValueFunction({self.net})'

    @property
    def params(self):
        """Trainable arrays."""
        return self.net.params

    def value(self, states):
        """Predicted value, shape () or (B,)."""
        return self.net.forward(states)[..., 0]

    def fit_scalar(self, states, returns, optimizer):
        """One Adam step on the mean squared error.

        Parameters
        ----------
        states : array_like
            Shape (B, d).
        returns : array_like
            Regression targets, shape (B,).
        optimizer : AdamState

        Returns
        -------
        float
            Mean squared error before the update.

        """
        states = np.atleast_2d(np.asarray(states, dtype=float))
        returns = np.ravel(np.asarray(returns, dtype=float))
        if states.shape[0] == 0:
            raise ValueError('Cannot fit on an empty batch')
        if returns.shape != (states.shape[0],):
            raise ValueError(f'{returns.size} targets for {states.shape[0]} states')

        err = self.net.forward(states)[:, 0] - returns
        loss = float(np.mean(err**2))
        grads, _ = self.net.backward(states, (2.0 / err.size * err)[:, np.newaxis])
        optimizer.step(self.net.params, grads)
        return loss


def fit_scalar(vf, states, returns, optimizer):
    """One MSE regression step of ``vf``; returns the pre-update loss."""
    return vf.fit_scalar(states, returns, optimizer)
