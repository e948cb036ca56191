"""Trust-region policy update with per-sample uncertainty weights."""

import logging

import numpy as np

from ..advantage import normalize_advantages
from ..krylov import cg
from ..policy import mean_kl
from .ppo import batch_arrays

log = logging.getLogger(__name__)


def weighted_surrogate(policy, states, actions, logp_old, adv, w):
    """mean(w * pi(a|s) / pi_old(a|s) * A)."""
    ratio = np.exp(np.atleast_1d(policy.log_prob(states, actions)) - logp_old)
    return float(np.mean(w * ratio * adv))


def trpo_update(batch, policy, cfg):
    """Natural-gradient step with a backtracking line search.

    Parameters
    ----------
    batch : TrajectoryBuffer, dict
        Finalized buffer (or its arrays).
    policy : GaussianPolicy
        Updated in place; left bit-identical when no step is accepted.
    cfg : TrainConfig
        Uses kl_delta, cg_iters, cg_damping, backtrack_coef, backtrack_iters
        and normalize_advantages.

    Returns
    -------
    dict
        loss (negated surrogate before the step), improvement, kl (mean KL of
        the accepted step, 0 otherwise), backtracks, accepted, cg_failed,
        entropy.

    Notes
    -----
    The search direction x solves (F + damping I) x = g by conjugate
    gradients, where g is the gradient of the weighted surrogate and F the
    Fisher matrix of the mean KL.  The full step sqrt(2 delta / x^T F x) x
    is shrunk by backtrack_coef until the surrogate does not decrease (an
    improvement of exactly zero is accepted) and the mean KL is at most
    delta, for at most backtrack_iters shrinks.  When no shrink qualifies the
    parameters are restored exactly.

    """
    data = batch_arrays(batch)
    obs, act, logp_old, w = data['obs'], data['act'], data['logp'], data['w']
    adv = data['adv']
    if cfg.normalize_advantages and adv.size > 1:
        adv = normalize_advantages(adv)

    surr_old = weighted_surrogate(policy, obs, act, logp_old, adv, w)
    diag = {'loss': -surr_old, 'improvement': 0.0, 'kl': 0.0, 'backtracks': 0,
            'accepted': False, 'cg_failed': False, 'entropy': policy.entropy()}

    ratio = np.exp(np.atleast_1d(policy.log_prob(obs, act)) - logp_old)
    g = policy.flatten(policy.log_prob_grad(obs, act, w * adv * ratio / adv.size))
    if np.all(g == 0.0):
        return diag

    def fvp(v):
        return policy.fisher_vector_product(obs, v) + cfg.cg_damping * v

    x, info = cg(fvp, g, maxiter=cfg.cg_iters)
    xFx = float(x @ fvp(x)) if info >= 0 else np.nan
    if info < 0 or not np.isfinite(xFx) or xFx <= 0.0 or not np.all(np.isfinite(x)):
        log.warning('conjugate gradient failed (info %d); policy left unchanged', info)
        diag['cg_failed'] = True
        return diag

    step = np.sqrt(2.0 * cfg.kl_delta / xFx) * x
    old = policy.copy()
    flat_old = policy.get_flat()
    for j in range(cfg.backtrack_iters + 1):
        policy.set_flat(flat_old + cfg.backtrack_coef**j * step)
        kl = mean_kl(old, policy, obs)
        improvement = weighted_surrogate(policy, obs, act, logp_old, adv, w) - surr_old
        if np.isfinite(kl) and kl <= cfg.kl_delta and improvement >= 0.0:
            log.debug('line search accepted after %d backtracks (kl %.5f)', j, kl)
            diag.update(improvement=improvement, kl=kl, backtracks=j, accepted=True)
            return diag

    log.debug('line search failed; policy left unchanged')
    policy.set_flat(flat_old)
    diag['backtracks'] = cfg.backtrack_iters
    return diag
