"""Standard normal distribution functions and the quantile z-grid."""

from dataclasses import dataclass

import numpy as np
from scipy.special import erfc


# Coefficients of Acklam's rational approximation to the inverse normal CDF
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425

_SQRT2 = np.sqrt(2.0)
_SQRT2PI = np.sqrt(2.0 * np.pi)


def std_normal_cdf(x):
    """Cumulative distribution function of the standard normal.

    Parameters
    ----------
    x : float, array_like
        Finite evaluation point(s).

    Returns
    -------
    float, ndarray
        Phi(x), same shape as x.

    Notes
    -----
    Evaluated as 0.5 * erfc(-x / sqrt(2)), which keeps full relative
    precision in the lower tail.

    Examples
    --------
    >>> from normrl.stats import std_normal_cdf
    >>> print(std_normal_cdf(0.0))
    0.5

    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError('std_normal_cdf requires finite input')
    out = 0.5 * erfc(-x / _SQRT2)
    return out if out.ndim else float(out)


def std_normal_pdf(x):
    """Density of the standard normal."""
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / _SQRT2PI


def _acklam(p):
    """Rational approximation to the inverse CDF (relative error ~1.15e-9)."""
    x = np.empty_like(p)

    low = p < _P_LOW
    high = p > 1.0 - _P_LOW
    mid = ~(low | high)

    q = p[mid] - 0.5
    r = q * q
    x[mid] = ((((((_A[0]*r + _A[1])*r + _A[2])*r + _A[3])*r + _A[4])*r + _A[5]) * q
              / (((((_B[0]*r + _B[1])*r + _B[2])*r + _B[3])*r + _B[4])*r + 1.0))

    for mask, sign, tail in ((low, 1.0, p[low]), (high, -1.0, 1.0 - p[high])):
        q = np.sqrt(-2.0 * np.log(tail))
        x[mask] = sign * ((((((_C[0]*q + _C[1])*q + _C[2])*q + _C[3])*q + _C[4])*q + _C[5])
                          / ((((_D[0]*q + _D[1])*q + _D[2])*q + _D[3])*q + 1.0))
    return x


def std_normal_inv_cdf(p, newton_steps=2):
    """Inverse CDF (quantile function) of the standard normal.

    Parameters
    ----------
    p : float, array_like
        Probabilities, strictly inside (0, 1).
    newton_steps : int
        Number of Newton refinements of the rational approximation.

    Returns
    -------
    float, ndarray
        z such that Phi(z) = p.

    Notes
    -----
    Acklam's rational approximation followed by Newton steps on
    std_normal_cdf.  The refinement brings the result to double precision;
    the upper half is computed by symmetry so that Phi^{-1}(p) and
    Phi^{-1}(1-p) are exact negatives.

    Examples
    --------
    >>> from normrl.stats import std_normal_inv_cdf
    >>> print(f'{std_normal_inv_cdf(0.8):.3f}')
    0.842

    """
    p = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(p)) or np.any(p <= 0.0) or np.any(p >= 1.0):
        raise ValueError('std_normal_inv_cdf requires 0 < p < 1')

    scalar = p.ndim == 0
    p = np.atleast_1d(p)

    # solve in the lower half, p' = min(p, 1-p), and reflect
    upper = p > 0.5
    plow = np.where(upper, 1.0 - p, p)

    x = _acklam(plow)
    for _ in range(newton_steps):
        x -= (0.5 * erfc(-x / _SQRT2) - plow) / std_normal_pdf(x)

    x[plow == 0.5] = 0.0
    x = np.where(upper, -x, x)
    return float(x[0]) if scalar else x


@dataclass(frozen=True)
class ZGrid:
    """Standard normal z-scores at the quantile levels tau_i = (i+1)/(N+1).

    Attributes
    ----------
    n : int
        Number of quantile bars.
    z : ndarray
        Strictly increasing, antisymmetric z-scores, shape (n,).

    """

    n: int
    z: np.ndarray

    @property
    def taus(self):
        """Quantile levels (i+1)/(N+1)."""
        return np.arange(1, self.n + 1, dtype=float) / (self.n + 1)

    @property
    def nonzero(self):
        """Mask of entries with z != 0 (all but the middle one for odd N)."""
        return self.z != 0.0


def quantile_z_grid(n):
    """Build the z-grid for n quantile bars.

    Parameters
    ----------
    n : int
        Number of quantile bars, n >= 1.

    Returns
    -------
    ZGrid
        z[i] = Phi^{-1}((i+1)/(n+1)).

    Examples
    --------
    >>> from normrl.stats import quantile_z_grid
    >>> print(quantile_z_grid(4).z.round(3))
    [-0.842 -0.253  0.253  0.842]

    """
    if int(n) != n or n < 1:
        raise ValueError('Number of quantile bars must be a positive integer')
    n = int(n)

    taus = np.arange(1, n + 1, dtype=float) / (n + 1)
    z = std_normal_inv_cdf(taus)
    # enforce exact antisymmetry; the middle entry of an odd grid becomes 0
    z = 0.5 * (z - z[::-1])
    z.setflags(write=False)
    return ZGrid(n=n, z=z)
