"""Timestep-decaying variance schedule and normal target quantiles.

The return-to-go from timestep t is modelled as normal with a variance that
shrinks linearly from G_cur^2 at t = 0 to a floor sigma^2_min at t = l_cur,
where l_cur and G_cur are the mean length and mean return of the most recent
episodes.
"""

from collections import deque
from dataclasses import dataclass

import numpy as np

WINDOW = 50


class EpisodeStats:
    """Rolling window of recent episode lengths and full-episode returns.

    Attributes
    ----------
    window : deque
        Up to 50 (length, return) pairs, oldest first.
    l_cur : float
        Mean length of the stored episodes (1 before any episode).
    g_cur : float
        Mean return of the stored episodes (0 before any episode).

    """

    def __init__(self, capacity=WINDOW):
        self.window = deque(maxlen=capacity)
        self.l_cur = 1.0
        self.g_cur = 0.0

    def __len__(self):
        """Number of stored episodes."""
        return len(self.window)

    def __repr__(self):
        """Summarise the window."""
        return (f'EpisodeStats(n={len(self.window)}, l_cur={self.l_cur:.6g}, '
                f'g_cur={self.g_cur:.6g})')

    def record(self, length, ret):
        """Add one completed episode; see record_episode."""
        return record_episode(self, length, ret)

    def snapshot(self):
        """Independent copy for read-only use."""
        other = EpisodeStats(self.window.maxlen)
        other.window.extend(self.window)
        other.l_cur = self.l_cur
        other.g_cur = self.g_cur
        return other


def record_episode(stats, length, ret):
    """Push (length, ret) into the window and recompute the means.

    Parameters
    ----------
    stats : EpisodeStats
        Updated in place.
    length : int
        Episode length in steps, >= 1.
    ret : float
        Undiscounted return of the whole episode.

    Returns
    -------
    EpisodeStats
        ``stats``.

    """
    if length < 1:
        raise ValueError('Episode length must be at least 1')
    if not np.isfinite(ret):
        raise ValueError('Episode return must be finite')
    stats.window.append((int(length), float(ret)))
    lengths, returns = np.array(stats.window, dtype=float).T
    stats.l_cur = float(lengths.mean())
    stats.g_cur = float(returns.mean())
    return stats


@dataclass(frozen=True)
class VarianceScheduleConfig:
    """Floor variance and number of quantile bars of the normal targets."""

    sigma_sq_min: float
    n_quantiles: int

    def __post_init__(self):
        if not self.sigma_sq_min > 0:
            raise ValueError('sigma_sq_min must be positive')
        if self.n_quantiles < 1:
            raise ValueError('n_quantiles must be at least 1')


def sigma_sq(stats, cfg, t):
    """Target variance at timestep t.

    Parameters
    ----------
    stats : EpisodeStats
    cfg : VarianceScheduleConfig
    t : int, array_like
        Timesteps, t >= 0.

    Returns
    -------
    float, ndarray
        max(((s_min - G^2) / l) t + G^2, s_min), or s_min everywhere
        when G^2 <= s_min.

    Examples
    --------
    >>> from normrl.schedule import (EpisodeStats, VarianceScheduleConfig,
    ...                              record_episode, sigma_sq)
    >>> stats = record_episode(EpisodeStats(), 100, 50.0)
    >>> cfg = VarianceScheduleConfig(sigma_sq_min=100.0, n_quantiles=4)
    >>> print(sigma_sq(stats, cfg, [0, 50, 100, 200]))
    [2500. 1300.  100.  100.]

    """
    if not stats.l_cur > 0:
        raise ValueError(f'Invalid episode statistics: l_cur = {stats.l_cur}')
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError('Timesteps must be nonnegative')

    smin = cfg.sigma_sq_min
    g2 = stats.g_cur**2
    if g2 <= smin:
        out = np.full_like(t, smin)
    else:
        out = np.maximum((smin - g2) / stats.l_cur * t + g2, smin)
    return out if out.ndim else float(out)


def target_quantiles(mean, t, stats, cfg, zgrid):
    """Normal target quantile bars q'_i = mean + sigma(t) z_i.

    Parameters
    ----------
    mean : float, array_like
        Target means (returns-to-go or TD targets), shape () or (B,).
    t : int, array_like
        Timesteps, broadcastable with mean.
    stats : EpisodeStats
    cfg : VarianceScheduleConfig
    zgrid : ZGrid
        Grid with zgrid.n == cfg.n_quantiles.

    Returns
    -------
    ndarray
        Shape (N,) or (B, N).

    """
    if zgrid.n != cfg.n_quantiles:
        raise ValueError(f'z-grid has {zgrid.n} entries, config expects '
                         f'{cfg.n_quantiles}')
    mean = np.asarray(mean, dtype=float)
    sigma = np.sqrt(sigma_sq(stats, cfg, t))
    mean, sigma = np.broadcast_arrays(mean, sigma)
    return mean[..., np.newaxis] + sigma[..., np.newaxis] * zgrid.z


def distributional_bellman_target(q_next, reward, gamma):
    """Bar-wise distributional Bellman target r + gamma * q(s').

    Parameters
    ----------
    q_next : array_like
        Bars of the next state, shape (N,) or (B, N).
    reward : float, array_like
        Rewards, shape () or (B,).
    gamma : float
        Discount in (0, 1].

    Returns
    -------
    ndarray
        Shape of q_next; its spread is gamma times the spread of q_next.

    """
    if not 0.0 < gamma <= 1.0:
        raise ValueError('gamma must lie in (0, 1]')
    q_next = np.asarray(q_next, dtype=float)
    reward = np.asarray(reward, dtype=float)
    return reward[..., np.newaxis] + gamma * q_next
