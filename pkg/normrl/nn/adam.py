"""Adam optimizer over lists of numpy parameter arrays."""

import numpy as np


class AdamState:
    """Moment accumulators and hyperparameters of an Adam optimizer.

    Attributes
    ----------
    lr : float
        Step size.
    beta1, beta2 : float
        Exponential decay rates of the first and second moments.
    eps : float
        Denominator offset.
    m, v : list of ndarray
        First and second moments, shaped like the parameters.
    t : int
        Number of updates taken.

    """

    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        if lr <= 0:
            raise ValueError('Learning rate must be positive')
        if not (0.0 <= beta1 < 1.0 and 0.0 <= beta2 < 1.0):
            raise ValueError('Adam decay rates must lie in [0, 1)')
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads):
        """Apply one update in place; see adam_step."""
        return adam_step(params, grads, self)


def adam_step(params, grads, state):
    """Take one bias-corrected Adam step (descent on the loss).

    Parameters
    ----------
    params : list of ndarray
        Parameters, updated in place.
    grads : list of ndarray
        Loss gradients, shaped like params.
    state : AdamState
        Optimizer state, updated in place.

    Returns
    -------
    (params, state)

    Notes
    -----
    m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2,
    p <- p - lr * mhat / (sqrt(vhat) + eps), with mhat = m / (1-b1^t) and
    vhat = v / (1-b2^t).

    Examples
    --------
    >>> import numpy as np
    >>> from normrl.nn import AdamState, adam_step
    >>> p = [np.zeros(2)]
    >>> state = AdamState(p, lr=0.1)
    >>> _ = adam_step(p, [np.array([5.0, -5.0])], state)
    >>> print(p[0].round(6))
    [-0.1  0.1]

    """
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ValueError('Number of parameter and gradient arrays differ')
    for p, g, m in zip(params, grads, state.m):
        if p.shape != np.shape(g) or p.shape != m.shape:
            raise ValueError(f'Shape mismatch: parameter {p.shape}, gradient '
                             f'{np.shape(g)}, moment {m.shape}')

    state.t += 1
    b1, b2 = state.beta1, state.beta2
    corr1 = 1.0 - b1**state.t
    corr2 = 1.0 - b2**state.t

    for p, g, m, v in zip(params, grads, state.m, state.v):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * np.square(g)
        p -= state.lr * (m / corr1) / (np.sqrt(v / corr2) + state.eps)

    return params, state
