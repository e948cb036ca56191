"""Normality of predicted quantile bars and the uncertainty weight.

Bars q_0..q_{N-1} are compared with the quantiles of the normal distribution
N(q_avg, sigma_avg^2) that best explains them; the squared gap E is turned
into a policy-update weight w = sigmoid(-E T) + 0.5 in (0.5, 1].
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .stats import quantile_z_grid

EPS_SIGMA = 1e-6


@dataclass
class NormalFit:
    """Best-fit normal of a set of bars.

    Attributes
    ----------
    q_avg : float, ndarray
        Mean of the bars.
    sigma_avg : float, ndarray
        Mean of the per-bar standard deviations, >= EPS_SIGMA.
    reconstructed : ndarray
        q_avg + sigma_avg z_i, shape of the bars.

    """

    q_avg: np.ndarray
    sigma_avg: np.ndarray
    reconstructed: np.ndarray


def _bars(q, zgrid):
    q = np.asarray(q, dtype=float)
    if q.ndim == 0 or q.shape[-1] < 2:
        raise ValueError('A normal fit needs at least two quantile bars')
    if zgrid is None:
        zgrid = quantile_z_grid(q.shape[-1])
    elif zgrid.n != q.shape[-1]:
        raise ValueError(f'z-grid has {zgrid.n} entries for {q.shape[-1]} bars')
    return q, zgrid


def fit_normal(q, zgrid=None, eps_sigma=EPS_SIGMA):
    """Fit N(q_avg, sigma_avg^2) to quantile bars.

    Parameters
    ----------
    q : array_like
        Bars, shape (N,) or (B, N), N >= 2.
    zgrid : ZGrid, None
        Grid of the N quantile levels (built if None).
    eps_sigma : float
        Lower clamp of the per-bar standard deviations.

    Returns
    -------
    NormalFit

    Notes
    -----
    For each bar with z_i != 0, sigma_i = (q_i - q_avg) / z_i, the standard
    deviation that places q_i at its quantile level.  A bar on the wrong side
    of the mean gives sigma_i < 0 and is clamped to eps_sigma; the middle bar
    of an odd grid is left out of the average.

    Examples
    --------
    >>> import numpy as np
    >>> from normrl.stats import quantile_z_grid
    >>> from normrl.uncertainty import fit_normal
    >>> z = quantile_z_grid(4).z
    >>> fit = fit_normal(3.0 + 2.0 * z)
    >>> print(round(float(fit.sigma_avg), 12))
    2.0

    """
    q, zgrid = _bars(q, zgrid)
    q_avg = q.mean(axis=-1)
    nz = zgrid.nonzero
    sigmas = (q[..., nz] - q_avg[..., np.newaxis]) / zgrid.z[nz]
    sigma_avg = np.maximum(sigmas, eps_sigma).mean(axis=-1)
    reconstructed = q_avg[..., np.newaxis] + sigma_avg[..., np.newaxis] * zgrid.z
    return NormalFit(q_avg=q_avg, sigma_avg=sigma_avg, reconstructed=reconstructed)


def uncertainty_error(q, zgrid=None, eps_sigma=EPS_SIGMA):
    """Sum of squared gaps between bars and their normal reconstruction.

    Returns
    -------
    float, ndarray
        E >= 0, shape () or (B,).

    """
    q, zgrid = _bars(q, zgrid)
    fit = fit_normal(q, zgrid, eps_sigma)
    E = np.sum((q - fit.reconstructed)**2, axis=-1)
    return E if E.ndim else float(E)


def uncertainty_weight(E, temperature):
    """Policy-update weight w = sigmoid(-E T) + 0.5.

    Parameters
    ----------
    E : float, array_like
        Nonnegative errors from uncertainty_error.
    temperature : float
        T > 0.

    Returns
    -------
    float, ndarray
        w in (0.5, 1], equal to 1 iff E = 0.

    Examples
    --------
    >>> from normrl.uncertainty import uncertainty_weight
    >>> print(uncertainty_weight(0.0, 1.0))
    1.0

    """
    if not temperature > 0:
        raise ValueError('temperature must be positive')
    E = np.asarray(E, dtype=float)
    if np.any(E < 0) or np.any(np.isnan(E)):
        raise ValueError('Uncertainty error must be nonnegative')
    w = expit(-E * temperature) + 0.5
    return w if w.ndim else float(w)
