"""Diagnostics of trained critics and policies, written as CSV and JSON.

Functions
---------
    - estimated_std_curve : critic std per timestep along trajectories
    - return_to_go_std, empirical_return_std : spread of the return-to-go
    - normality_gap : CDF distance between bars and their best-fit normal
    - quantile_crossing_rate : fraction of out-of-order adjacent bars
    - trend : Spearman rank correlation of a curve against time
"""

import csv
import json
import logging
import math

import numpy as np
from scipy.stats import spearmanr

from .rollout import episode_rewards
from .stats import std_normal_cdf
from .uncertainty import fit_normal, uncertainty_error

log = logging.getLogger(__name__)

TABLE_FRACTIONS = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)


def estimated_std_curve(value_fn, trajectories, smoothing=0.9):
    """Exponentially smoothed critic standard deviation against timestep.

    Parameters
    ----------
    value_fn : QuantileValueFunction
        Critic with ``predict_quantiles``.
    trajectories : sequence of array_like
        Observations per episode; row k of each array is timestep k.
    smoothing : float
        EMA factor in [0, 1); 0 returns the raw per-timestep means.

    Returns
    -------
    timesteps : ndarray
        0..T_max-1.
    std : ndarray
        s_0 = m_0 and s_t = smoothing s_{t-1} + (1 - smoothing) m_t, where
        m_t averages sigma_avg (see fit_normal) over the states visited at t.

    Examples
    --------
    >>> import numpy as np
    >>> from normrl.diag import estimated_std_curve
    >>> from normrl.stats import quantile_z_grid
    >>> class Normal:
    ...     def predict_quantiles(self, s):
    ...         return 1.0 + 2.0 * np.tile(quantile_z_grid(5).z, (len(s), 1))
    >>> t, std = estimated_std_curve(Normal(), [np.zeros((3, 2))])
    >>> print(std.round(12))
    [2. 2. 2.]

    """
    if not hasattr(value_fn, 'predict_quantiles'):
        raise ValueError('The std curve needs a quantile value function; '
                         'scalar critics have no spread')
    if not 0.0 <= smoothing < 1.0:
        raise ValueError('smoothing must lie in [0, 1)')
    trajectories = [np.atleast_2d(np.asarray(s, dtype=float)) for s in trajectories]
    trajectories = [s for s in trajectories if s.shape[0] > 0]
    if not trajectories:
        raise ValueError('Need at least one nonempty trajectory')

    horizon = max(s.shape[0] for s in trajectories)
    total = np.zeros(horizon)
    count = np.zeros(horizon)
    for states in trajectories:
        sigma = fit_normal(value_fn.predict_quantiles(states)).sigma_avg
        total[:sigma.size] += sigma
        count[:sigma.size] += 1
    raw = total / count

    smoothed = np.empty(horizon)
    smoothed[0] = raw[0]
    for t in range(1, horizon):
        smoothed[t] = smoothing * smoothed[t - 1] + (1.0 - smoothing) * raw[t]
    return np.arange(horizon), smoothed


def return_to_go_std(reward_seqs, fractions=TABLE_FRACTIONS):
    """Population std over episodes of the return from a fraction of each horizon.

    Parameters
    ----------
    reward_seqs : sequence of array_like
        Per-episode rewards, at least two episodes.
    fractions : sequence of float
        Values in [0, 1]; episode k starts summing at
        min(floor(f T_k), T_k - 1).

    Returns
    -------
    ndarray
        Rows (fraction, std), shape (len(fractions), 2).

    Examples
    --------
    >>> from normrl.diag import return_to_go_std
    >>> print(return_to_go_std([[1.0, 1.0], [3.0, 1.0]], [0.0, 1.0]))
    [[0. 1.]
     [1. 0.]]

    """
    reward_seqs = [np.ravel(np.asarray(r, dtype=float)) for r in reward_seqs]
    if len(reward_seqs) < 2:
        raise ValueError('Need at least two episodes')
    if any(r.size == 0 for r in reward_seqs):
        raise ValueError('Episodes must have at least one step')
    rows = []
    for f in fractions:
        if not 0.0 <= f <= 1.0:
            raise ValueError(f'Fraction {f} outside [0, 1]')
        tails = [r[min(int(math.floor(f * r.size)), r.size - 1):].sum()
                 for r in reward_seqs]
        rows.append((float(f), float(np.std(tails))))
    return np.array(rows)


def empirical_return_std(policy, env, episodes=100, fractions=TABLE_FRACTIONS, seed=0,
                         deterministic=False, n_workers=1, **env_kwargs):
    """Spread of the return-to-go of a policy at fractions of the horizon.

    Parameters
    ----------
    policy : GaussianPolicy
    env : str
        Environment name; ``env_kwargs`` are passed to make_env.
    episodes : int
        Number of episodes, at least 2.
    fractions : sequence of float
    seed : int
    deterministic : bool
        Act with the policy mean.
    n_workers : int
        Evaluation threads.

    Returns
    -------
    ndarray
        Rows (fraction, std); see return_to_go_std.

    """
    if episodes < 2:
        raise ValueError('Need at least two episodes')
    rewards = episode_rewards(policy, env, episodes, seed, deterministic, n_workers,
                              **env_kwargs)
    return return_to_go_std(rewards, fractions)


def normality_gap(q, zgrid=None):
    """Largest distance between the step CDF of the bars and their fitted normal.

    Parameters
    ----------
    q : array_like
        Bars, shape (N,) or (B, N), N >= 2.
    zgrid : ZGrid, None

    Returns
    -------
    float, ndarray
        In [0, 1].

    Notes
    -----
    The normal N(q_avg, sigma_avg^2) is fitted to the bars in the order given,
    as for uncertainty_error, so crossed bars clamp their sigma_i and widen the
    gap.  The sorted bars x_0 <= ... <= x_{N-1} define a step CDF with jumps
    of 1/(N+1) that reaches tau_i = (i+1)/(N+1) at x_i.  At each bar both
    one-sided limits are compared with the fitted CDF, so exactly normal bars
    give 1/(N+1) and equal bars give 1/2.

    """
    q = np.asarray(q, dtype=float)
    fit = fit_normal(q, zgrid)
    x = np.sort(q, axis=-1)
    n = x.shape[-1]
    zscore = (x - fit.q_avg[..., np.newaxis]) / fit.sigma_avg[..., np.newaxis]
    F = std_normal_cdf(zscore)

    # tied bars share the limits of the whole run of equal values
    right = np.empty_like(x)
    left = np.empty_like(x)
    for row in np.ndindex(x.shape[:-1]):
        xs = x[row]
        last = np.searchsorted(xs, xs, side='right')
        first = np.searchsorted(xs, xs, side='left')
        right[row] = last / (n + 1)
        left[row] = first / (n + 1)
    gap = np.maximum(np.abs(F - left), np.abs(F - right)).max(axis=-1)
    return gap if gap.ndim else float(gap)


def quantile_crossing_rate(q):
    """Fraction of adjacent bars with q_{i+1} < q_i (mean over a batch)."""
    q = np.asarray(q, dtype=float)
    if q.ndim == 0 or q.shape[-1] < 2:
        raise ValueError('Need at least two bars')
    return float(np.mean(np.diff(q, axis=-1) < 0.0))


def trend(timesteps, values):
    """Spearman rank correlation of values against timesteps.

    Returns
    -------
    dict
        spearman and pvalue; both NaN when either input is constant.

    """
    timesteps = np.ravel(np.asarray(timesteps, dtype=float))
    values = np.ravel(np.asarray(values, dtype=float))
    if timesteps.size != values.size or timesteps.size < 2:
        raise ValueError('trend needs two equally long series of at least two points')
    if np.ptp(timesteps) == 0.0 or np.ptp(values) == 0.0:
        return {'spearman': math.nan, 'pvalue': math.nan}
    res = spearmanr(timesteps, values)
    return {'spearman': float(res[0]), 'pvalue': float(res[1])}


def normality_summary(value_fn, states):
    """Normality statistics of the critic over a set of states.

    Returns
    -------
    dict
        gap_mean, gap_max, crossing_rate, error_mean (uncertainty_error)
        and states.

    """
    q = value_fn.predict_quantiles(np.atleast_2d(states))
    gaps = np.atleast_1d(normality_gap(q))
    return {'states': int(q.shape[0]),
            'gap_mean': float(gaps.mean()),
            'gap_max': float(gaps.max()),
            'crossing_rate': quantile_crossing_rate(q),
            'error_mean': float(np.mean(uncertainty_error(q)))}


def write_csv(path, header, rows):
    """Write rows under a header; floats use repr."""
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                             for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return None if not np.isfinite(obj) else float(obj)
    return obj


def write_json(path, obj):
    """Write obj as indented JSON; NaN and infinities become null."""
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(_jsonable(obj), f, indent=2, sort_keys=True)
        f.write('\n')
