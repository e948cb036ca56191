"""Distributional value function with quantile Huber regression."""

from collections import Counter

import numpy as np

from ..nn import Mlp
from ..stats import quantile_z_grid

# Number of calls into the quantile code paths, by name.
call_counts = Counter()


def huber(u, kappa=1.0):
    """Huber function.

    Parameters
    ----------
    u : float, array_like
        Residuals.
    kappa : float
        Threshold between the quadratic and linear branches, kappa > 0.

    Returns
    -------
    float, ndarray
        0.5 u^2 for |u| < kappa, kappa (|u| - kappa/2) otherwise.

    Examples
    --------
    >>> from normrl.value import huber
    >>> print(huber(0.5), huber(2.0))
    0.125 1.5

    """
    if not kappa > 0:
        raise ValueError('kappa must be positive')
    u = np.asarray(u, dtype=float)
    a = np.abs(u)
    out = np.where(a < kappa, 0.5 * u * u, kappa * (a - 0.5 * kappa))
    return out if out.ndim else float(out)


def quantile_huber(u, tau, kappa=1.0):
    """Asymmetric Huber penalty |tau - 1{u < 0}| L_kappa(u), elementwise."""
    u = np.asarray(u, dtype=float)
    return np.abs(tau - (u < 0.0)) * huber(u, kappa)


def _residual(pred, target, literal_sign):
    return pred - target if literal_sign else target - pred


def quantile_huber_loss(pred, target, kappa=1.0, literal_sign=False):
    """Mean quantile Huber loss of predicted bars against target bars.

    Parameters
    ----------
    pred, target : array_like
        Bars of shape (N,) or (B, N); tau_i = (i+1)/(N+1) along the last axis.
    kappa : float
        Huber threshold.
    literal_sign : bool
        If True use u = pred - target, otherwise u = target - pred, under
        which bar i converges to the tau_i-quantile.

    Returns
    -------
    float
        Mean over all elements of rho_{tau_i}(u).

    Examples
    --------
    >>> import numpy as np
    >>> from normrl.value import quantile_huber_loss
    >>> print(quantile_huber_loss(np.zeros(4), np.ones(4)))
    0.25

    """
    pred = np.asarray(pred, dtype=float)
    target = np.asarray(target, dtype=float)
    if pred.shape != target.shape:
        raise ValueError(f'Prediction {pred.shape} and target {target.shape} differ')
    n = pred.shape[-1]
    taus = np.arange(1, n + 1, dtype=float) / (n + 1)
    u = _residual(pred, target, literal_sign)
    return float(np.mean(quantile_huber(u, taus, kappa)))


def quantile_huber_grad(pred, target, kappa=1.0, literal_sign=False):
    """Gradient of quantile_huber_loss with respect to pred."""
    pred = np.asarray(pred, dtype=float)
    target = np.asarray(target, dtype=float)
    n = pred.shape[-1]
    taus = np.arange(1, n + 1, dtype=float) / (n + 1)
    u = _residual(pred, target, literal_sign)
    # dL/du = clip(u, -kappa, kappa); du/dpred = -1 (or +1 for the literal order)
    dpred = np.abs(taus - (u < 0.0)) * np.clip(u, -kappa, kappa)
    if not literal_sign:
        dpred = -dpred
    return dpred / pred.size


class QuantileValueFunction:
    """State to N quantile bars of the return distribution.

    Attributes
    ----------
    net : Mlp
        relu network with a linear N-dimensional output.
    n_quantiles : int
        Number of bars N.
    kappa : float
        Huber threshold.
    zgrid : ZGrid
        z-scores of the quantile levels.
    literal_sign : bool
        Residual order of the loss (see quantile_huber_loss).

    """

    def __init__(self, obs_dim, n_quantiles=100, hidden=(512, 512), kappa=1.0,
                 rng=None, activation='relu', literal_sign=False, net=None):
        if not kappa > 0:
            raise ValueError('kappa must be positive')
        if net is None:
            net = Mlp((obs_dim, *hidden, n_quantiles), activation=activation, rng=rng)
        elif net.layer_dims[0] != obs_dim or net.layer_dims[-1] != n_quantiles:
            raise ValueError(f'{net} does not map {obs_dim} inputs to {n_quantiles} bars')
        self.net = net
        self.n_quantiles = n_quantiles
        self.kappa = kappa
        self.literal_sign = literal_sign
        self.zgrid = quantile_z_grid(n_quantiles)

    def __repr__(self):
        """Describe the value function."""
        return (f'QuantileValueFunction({self.net}, N={self.n_quantiles}, '
                f'kappa={self.kappa})')

    @property
    def params(self):
        """Trainable arrays."""
        return self.net.params

    def predict_quantiles(self, states):
        """Predicted bars, shape (N,) or (B, N); not necessarily sorted."""
        call_counts['predict_quantiles'] += 1
        return self.net.forward(states)

    def mean_value(self, states):
        """Mean of the bars, q_avg."""
        return self.predict_quantiles(states).mean(axis=-1)

    def value(self, states):
        """Scalar critic value (the mean of the bars)."""
        return self.mean_value(states)

    def fit_quantiles(self, states, targets, optimizer):
        """One Adam step on the batched quantile Huber loss.

        Parameters
        ----------
        states : array_like
            Shape (B, d).
        targets : array_like
            Target bars, shape (B, N).
        optimizer : AdamState
            Optimizer over ``params``.

        Returns
        -------
        float
            Loss before the update.

        """
        call_counts['fit_quantiles'] += 1
        states = np.atleast_2d(np.asarray(states, dtype=float))
        targets = np.atleast_2d(np.asarray(targets, dtype=float))
        if states.shape[0] == 0:
            raise ValueError('Cannot fit on an empty batch')
        if targets.shape != (states.shape[0], self.n_quantiles):
            raise ValueError(f'Targets of shape {targets.shape} do not match '
                             f'{states.shape[0]} states and {self.n_quantiles} bars')

        pred = self.net.forward(states)
        loss = quantile_huber_loss(pred, targets, self.kappa, self.literal_sign)
        dpred = quantile_huber_grad(pred, targets, self.kappa, self.literal_sign)
        grads, _ = self.net.backward(states, dpred)
        optimizer.step(self.net.params, grads)
        return loss


def predict_quantiles(vf, states):
    """Predicted bars of ``vf`` at ``states``."""
    return vf.predict_quantiles(states)


def mean_value(vf, states):
    """Mean of the predicted bars."""
    return vf.mean_value(states)


def fit_quantiles(vf, states, targets, optimizer):
    """One quantile Huber regression step; returns the pre-update loss."""
    return vf.fit_quantiles(states, targets, optimizer)
