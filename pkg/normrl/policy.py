"""Diagonal Gaussian policy with a tanh network for the mean."""

import numpy as np

from .nn import Mlp

_LOG2PI = np.log(2.0 * np.pi)


class GaussianPolicy:
    """pi(a|s) = N(mu(s), diag(exp(log_std))^2).

    Attributes
    ----------
    trunk : Mlp
        tanh network mapping a state to the action mean.
    log_std : ndarray
        State-independent log standard deviations, shape (act_dim,).

    Methods
    -------
    sample_action(state, rng)
        Draw an action and its log-density.
    log_prob(states, actions)
        Log-density of actions.
    log_prob_grad(states, actions, coeff)
        Gradient of sum_i coeff_i log pi(a_i|s_i) wrt the parameters.
    fisher_vector_product(states, v)
        Product of the mean-KL Hessian with a flat parameter vector.

    Examples
    --------
    >>> import numpy as np
    >>> from normrl.policy import GaussianPolicy
    >>> pi = GaussianPolicy(3, 2, rng=np.random.default_rng(0))
    >>> a, logp = pi.sample_action(np.zeros(3), np.random.default_rng(1))
    >>> a.shape
    (2,)

    """

    def __init__(self, obs_dim, act_dim, hidden=(64, 32), log_std_init=-0.5,
                 rng=None, trunk=None, log_std=None):
        if trunk is None:
            trunk = Mlp((obs_dim, *hidden, act_dim), activation='tanh', rng=rng,
                        output_gain=0.01)
        if trunk.layer_dims[0] != obs_dim or trunk.layer_dims[-1] != act_dim:
            raise ValueError(f'{trunk} does not map {obs_dim} states to {act_dim} actions')
        if log_std is None:
            log_std = np.full(act_dim, float(log_std_init))
        log_std = np.array(log_std, dtype=float)
        if log_std.shape != (act_dim,):
            raise ValueError(f'log_std must have shape ({act_dim},)')
        self.trunk = trunk
        self.log_std = log_std

    def __repr__(self):
        """Describe the policy."""
        return f'GaussianPolicy({self.trunk})'

    @property
    def obs_dim(self):
        """State dimension."""
        return self.trunk.in_dim

    @property
    def act_dim(self):
        """Action dimension."""
        return self.trunk.out_dim

    @property
    def params(self):
        """Trainable arrays: trunk parameters, then log_std."""
        return self.trunk.params + [self.log_std]

    @property
    def std(self):
        """Standard deviations exp(log_std)."""
        return np.exp(self.log_std)

    def copy(self):
        """Independent snapshot of the parameters."""
        return GaussianPolicy(self.obs_dim, self.act_dim, trunk=self.trunk.copy(),
                              log_std=self.log_std.copy())

    def get_flat(self):
        """All parameters as one vector."""
        return np.concatenate([self.trunk.get_flat(), self.log_std])

    def set_flat(self, flat):
        """Overwrite all parameters from a flat vector (in place)."""
        flat = np.asarray(flat, dtype=float)
        n = self.trunk.size
        if flat.shape != (n + self.act_dim,):
            raise ValueError(f'Expected {n + self.act_dim} parameters, got {flat.shape}')
        self.trunk.set_flat(flat[:n])
        self.log_std[...] = flat[n:]

    def flatten(self, arrays):
        """Flatten a list shaped like ``params``."""
        return np.concatenate([np.ravel(a) for a in arrays])

    def unflatten(self, flat):
        """Split a flat vector into arrays shaped like ``params``."""
        out, offset = [], 0
        for p in self.params:
            out.append(np.reshape(flat[offset:offset + p.size], p.shape))
            offset += p.size
        return out

    def mean(self, states):
        """Action means, shape (act_dim,) or (B, act_dim)."""
        return self.trunk.forward(states)

    def sample_action(self, state, rng):
        """Sample a ~ pi(.|state).

        Parameters
        ----------
        state : array_like
            Shape (obs_dim,).
        rng : numpy.random.Generator

        Returns
        -------
        action : ndarray
            mean + std * eps with eps ~ N(0, I).
        log_prob : float

        """
        mu = self.mean(state)
        eps = rng.standard_normal(self.act_dim)
        action = mu + self.std * eps
        logp = -0.5 * np.sum(eps**2) - np.sum(self.log_std) - 0.5 * self.act_dim * _LOG2PI
        return action, float(logp)

    def _check_actions(self, states, actions):
        mu = self.mean(states)
        actions = np.asarray(actions, dtype=float)
        if actions.shape != mu.shape:
            raise ValueError(f'Actions of shape {actions.shape} do not match means '
                             f'of shape {mu.shape}')
        return mu, actions

    def log_prob(self, states, actions):
        """Diagonal Gaussian log-density, shape () or (B,)."""
        mu, actions = self._check_actions(states, actions)
        zscore = (actions - mu) / self.std
        out = (-0.5 * np.sum(zscore**2, axis=-1) - np.sum(self.log_std)
               - 0.5 * self.act_dim * _LOG2PI)
        return out if np.ndim(out) else float(out)

    def log_prob_grad(self, states, actions, coeff):
        """Gradient of sum_i coeff_i log pi(a_i|s_i).

        Parameters
        ----------
        states : array_like
            Shape (B, obs_dim).
        actions : array_like
            Shape (B, act_dim).
        coeff : array_like
            Per-sample weights, shape (B,).

        Returns
        -------
        list of ndarray
            Shaped like ``params``.

        """
        states = np.atleast_2d(states)
        mu, actions = self._check_actions(states, np.atleast_2d(actions))
        coeff = np.asarray(coeff, dtype=float).reshape(-1, 1)
        var = self.std**2
        diff = actions - mu
        # d logp / d mu = (a - mu) / var ;  d logp / d log_std = zscore^2 - 1
        dmu = coeff * diff / var
        dlog_std = np.sum(coeff * (diff**2 / var - 1.0), axis=0)
        grads, _ = self.trunk.backward(states, dmu)
        return grads + [dlog_std]

    def entropy(self):
        """Entropy of the action distribution (state independent)."""
        return float(np.sum(self.log_std) + 0.5 * self.act_dim * (1.0 + _LOG2PI))

    def fisher_vector_product(self, states, v):
        """Hessian of the mean KL at the current parameters times v.

        Parameters
        ----------
        states : array_like
            Shape (B, obs_dim).
        v : ndarray
            Flat parameter direction.

        Returns
        -------
        ndarray
            F v, flat.

        Notes
        -----
        For a Gaussian with state-independent log_std the Fisher matrix is
        block diagonal: J_mu^T diag(1/var) J_mu averaged over states for the
        trunk, and 2 I for log_std.

        """
        states = np.atleast_2d(states)
        tangents = self.unflatten(v)
        jv = self.trunk.jvp(states, tangents[:-1])
        grads, _ = self.trunk.backward(states, jv / self.std**2 / states.shape[0])
        return np.concatenate([self.flatten(grads), 2.0 * tangents[-1]])


def sample_action(policy, state, rng):
    """Sample from ``policy`` at ``state``."""
    return policy.sample_action(state, rng)


def log_prob(policy, states, actions):
    """Log-density of ``actions`` under ``policy``."""
    return policy.log_prob(states, actions)


def mean_kl(policy_old, policy_new, states):
    """Mean over states of KL(pi_old(.|s) || pi_new(.|s)).

    Parameters
    ----------
    policy_old, policy_new : GaussianPolicy
        Parameter snapshots with the same dimensions.
    states : array_like
        Shape (B, obs_dim), B >= 1.

    Returns
    -------
    float

    Notes
    -----
    Per dimension, log(s_new/s_old) + (s_old^2 + (mu_old-mu_new)^2) / (2 s_new^2) - 1/2.

    """
    states = np.atleast_2d(np.asarray(states, dtype=float))
    if states.shape[0] == 0:
        raise ValueError('mean_kl needs at least one state')
    mu_old = policy_old.mean(states)
    mu_new = policy_new.mean(states)
    var_old = policy_old.std**2
    var_new = policy_new.std**2
    kl = (policy_new.log_std - policy_old.log_std
          + (var_old + (mu_old - mu_new)**2) / (2.0 * var_new) - 0.5)
    return float(np.mean(np.sum(kl, axis=-1)))
