"""Finite-difference checks of hand-written gradients."""

import numpy as np


def approximate_gradient(fun, params, h=1e-5):
    """Central finite-difference gradient of a scalar function of arrays.

    Parameters
    ----------
    fun : callable
        fun() -> float, reading the current values of ``params``.
    params : list of ndarray
        Arrays perturbed in place (restored afterwards).
    h : float
        Step size.

    Returns
    -------
    list of ndarray
        Estimates of d fun / d params.

    """
    grads = []
    for p in params:
        g = np.zeros_like(p)
        for i in np.ndindex(p.shape):
            orig = p[i]
            p[i] = orig + h
            fplus = fun()
            p[i] = orig - h
            fminus = fun()
            p[i] = orig
            g[i] = (fplus - fminus) / (2.0 * h)
        grads.append(g)
    return grads


def relative_error(a, b, floor=1e-8):
    """max |a - b| / max(|a|, |b|, floor) over flattened lists of arrays."""
    a = np.concatenate([np.ravel(x) for x in a])
    b = np.concatenate([np.ravel(x) for x in b])
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)), floor)
    return float(np.max(np.abs(a - b)) / scale)
