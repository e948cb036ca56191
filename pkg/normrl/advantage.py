"""Generalized advantage estimation and advantage normalization."""

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter


@dataclass
class PathEstimates:
    """Per-step estimates along one path.

    Attributes
    ----------
    advantages : ndarray
        GAE advantages.
    returns_to_go : ndarray
        Discounted reward sums plus the discounted bootstrap value.

    """

    advantages: np.ndarray
    returns_to_go: np.ndarray


def discount_cumsum(x, discount):
    """Reverse discounted cumulative sum, y_t = sum_k discount^k x_{t+k}.

    Examples
    --------
    >>> import numpy as np
    >>> from normrl.advantage import discount_cumsum
    >>> print(discount_cumsum(np.array([1.0, 1.0, 1.0]), 0.5))
    [1.75 1.5  1.  ]

    """
    x = np.asarray(x, dtype=float)
    return lfilter([1.0], [1.0, -float(discount)], x[::-1])[::-1]


def gae(rewards, values, gamma=0.99, lam=0.97, terminal_bootstrap=None):
    """Generalized advantage estimation on one path.

    Parameters
    ----------
    rewards : array_like
        r_0..r_{T-1}.
    values : array_like
        v_0..v_T (length T+1, bootstrap value last), or v_0..v_{T-1} with
        the bootstrap passed as ``terminal_bootstrap``.
    gamma : float
        Discount.
    lam : float
        GAE parameter lambda.
    terminal_bootstrap : float, None
        Value of the state after the path (0 at a true episode end).

    Returns
    -------
    PathEstimates

    Notes
    -----
    delta_t = r_t + gamma v_{t+1} - v_t and A_t = sum_k (gamma lam)^k delta_{t+k}.

    """
    rewards = np.ravel(np.asarray(rewards, dtype=float))
    values = np.ravel(np.asarray(values, dtype=float))
    if terminal_bootstrap is not None:
        values = np.append(values, float(terminal_bootstrap))
    if values.shape[0] != rewards.shape[0] + 1:
        raise ValueError(f'{rewards.shape[0]} rewards need {rewards.shape[0] + 1} '
                         f'values, got {values.shape[0]}')

    deltas = rewards + gamma * values[1:] - values[:-1]
    advantages = discount_cumsum(deltas, gamma * lam)
    returns = discount_cumsum(np.append(rewards, values[-1]), gamma)[:-1]
    return PathEstimates(advantages=advantages, returns_to_go=returns)


def normalize_advantages(adv, eps=1e-8):
    """Center and scale a batch of advantages to mean 0 and std 1.

    Parameters
    ----------
    adv : array_like
        Batch, at least two entries.
    eps : float
        Below this standard deviation the batch is only centered.

    Returns
    -------
    ndarray

    Examples
    --------
    >>> from normrl.advantage import normalize_advantages
    >>> print(normalize_advantages([1.0, 3.0]))
    [-1.  1.]

    """
    adv = np.ravel(np.asarray(adv, dtype=float))
    if adv.size < 2:
        raise ValueError('Advantage normalization needs at least two samples')
    centered = adv - adv.mean()
    std = centered.std()
    if std < eps:
        return centered
    return centered / std
