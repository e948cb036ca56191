"""Conjugate gradients for matrix-free SPD systems."""

import warnings
from warnings import warn
import numpy as np
from scipy.sparse.linalg import LinearOperator, aslinearoperator


def _as_operator(A, n):
    """Wrap a matrix, LinearOperator or bare matvec callable."""
    if callable(A) and not isinstance(A, LinearOperator) and not hasattr(A, 'shape'):
        return LinearOperator((n, n), matvec=A, dtype=float)
    return aslinearoperator(A)


def cg(A, b, x0=None, tol=1e-10, maxiter=None, callback=None, residuals=None):
    """Solve A x = b by conjugate gradients.

    Only products A @ p are required, which is what a natural-gradient step
    needs when A is a Fisher matrix known through Fisher-vector products.

    Parameters
    ----------
    A : array, sparse matrix, LinearOperator or callable
        Symmetric positive definite n x n operator.  A plain callable is
        used as the product p -> A p.
    b : array
        Right hand side of length n.
    x0 : array
        Starting point, zeros when omitted.
    tol : float
        Stop once ||b - A x|| < tol ||b||.  A zero right hand side makes
        the test absolute.
    maxiter : int
        Iteration cap, default 1.3 n + 2.
    callback : function
        Called as callback(x) after every iteration.
    residuals : list
        Filled in place with residual 2-norms, starting at the initial one.

    Returns
    -------
    x : array
        Current iterate.
    info : int
        0 on convergence, the iteration count when maxiter ran out, -1 when
        a direction of non-positive curvature was met and -2 on nan or inf.

    Notes
    -----
    With a small maxiter the solve is truncated (info > 0) and x is still a
    usable search direction; trust-region updates rely on this.

    The residual is recomputed from scratch every eighth iteration to limit
    drift in the recurrence.

    Examples
    --------
    >>> import numpy as np
    >>> from normrl.krylov import cg
    >>> A = np.array([[4.0, 1.0], [1.0, 3.0]])
    >>> b = np.array([1.0, 2.0])
    >>> (x, flag) = cg(A, b)
    >>> print(np.round(x, 6), flag)
    [0.090909 0.636364] 0

    References
    ----------
    .. [1] Yousef Saad, "Iterative Methods for Sparse Linear Systems,
       Second Edition", SIAM, pp. 262-67, 2003
       http://www-users.cs.umn.edu/~saad/books.html

    """
    b = np.ravel(np.asarray(b, dtype=float))
    n = b.shape[0]
    A = _as_operator(A, n)
    if A.shape != (n, n):
        raise ValueError(f'Operator of shape {A.shape} does not match rhs of length {n}')
    if maxiter is None:
        maxiter = int(1.3 * n) + 2
    elif maxiter < 1:
        raise ValueError('Number of iterations must be positive')

    warnings.filterwarnings('always', module='normrl.krylov._cg')

    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float).ravel()
    if not (np.all(np.isfinite(b)) and np.all(np.isfinite(x))):
        return x, -2

    stop = tol * (np.linalg.norm(b) or 1.0)
    r = b - A @ x
    direction = r.copy()
    rr = r @ r
    if residuals is not None:
        residuals[:] = [np.sqrt(rr)]
    if np.sqrt(rr) < stop:
        return x, 0

    for k in range(1, maxiter + 1):
        Ad = A @ direction
        curvature = direction @ Ad
        if not np.isfinite(curvature):
            return x, -2
        if curvature <= 0.0:
            warn('\nIndefinite operator detected in CG, aborting\n')
            return x, -1

        step = rr / curvature
        x += step * direction
        if k % 8 == 1:
            r = b - A @ x
        else:
            r -= step * Ad

        rr_next = r @ r
        direction = r + (rr_next / rr) * direction
        rr = rr_next

        resid = np.sqrt(rr)
        if residuals is not None:
            residuals.append(resid)
        if callback is not None:
            callback(x)
        if not np.isfinite(resid):
            return x, -2
        if resid < stop:
            return x, 0

    return x, maxiter
