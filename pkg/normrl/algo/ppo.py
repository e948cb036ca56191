"""Clipped-surrogate policy update with per-sample uncertainty weights."""

import logging

import numpy as np

from ..advantage import normalize_advantages

log = logging.getLogger(__name__)

KL_STOP_FACTOR = 1.5


def batch_arrays(batch):
    """Dict of arrays from a finalized TrajectoryBuffer or a plain dict.

    A dict needs ``obs``, ``act``, ``logp`` and ``adv``; a missing ``w`` is
    taken as all ones.
    """
    data = dict(batch) if isinstance(batch, dict) else batch.get()
    for key in ('obs', 'act', 'logp', 'adv'):
        if key not in data:
            raise ValueError(f'Batch is missing {key!r}')
    if np.shape(data['obs'])[0] == 0:
        raise ValueError('Cannot update on an empty batch')
    data.setdefault('w', np.ones(np.shape(data['adv'])))
    return data


def ppo_loss_and_grad(policy, states, actions, logp_old, adv, w, clip_eps):
    """Weighted clipped-surrogate loss and its parameter gradient.

    Parameters
    ----------
    policy : GaussianPolicy
    states, actions : ndarray
        Shapes (B, obs_dim) and (B, act_dim).
    logp_old : ndarray
        Log-densities at collection time, shape (B,).
    adv : ndarray
        Advantages, shape (B,).
    w : ndarray
        Uncertainty weights, shape (B,).
    clip_eps : float
        Clip range epsilon (np.inf disables clipping).

    Returns
    -------
    loss : float
        -mean(w * min(rho A, clip(rho, 1-eps, 1+eps) A)).
    grads : list of ndarray
        d loss / d params, shaped like ``policy.params``.
    info : dict
        ``approx_kl`` (mean of logp_old - logp) and ``clip_frac``.

    Notes
    -----
    The gradient flows only through samples where the unclipped term is the
    minimum; there d/dtheta (rho A) = rho A grad log pi.

    """
    logp = np.atleast_1d(policy.log_prob(states, actions))
    ratio = np.exp(logp - logp_old)
    clipped = np.clip(ratio, 1.0 - clip_eps, 1.0 + clip_eps)
    unclipped_obj = ratio * adv
    clipped_obj = clipped * adv
    loss = -float(np.mean(w * np.minimum(unclipped_obj, clipped_obj)))

    active = unclipped_obj <= clipped_obj
    coeff = -w * adv * ratio * active / ratio.size
    grads = policy.log_prob_grad(states, actions, coeff)

    info = {'approx_kl': float(np.mean(logp_old - logp)),
            'clip_frac': float(np.mean(np.abs(ratio - 1.0) > clip_eps))}
    return loss, grads, info


def ppo_update(batch, policy, optimizer, cfg, rng=None):
    """Several epochs of Adam steps on the weighted clipped surrogate.

    Parameters
    ----------
    batch : TrajectoryBuffer, dict
        Finalized buffer (or its arrays); ``w`` is all ones in unweighted
        modes.
    policy : GaussianPolicy
        Updated in place.
    optimizer : AdamState
        Optimizer over ``policy.params``.
    cfg : TrainConfig
        Uses train_pi_iters, policy_minibatch, normalize_advantages,
        clip_epsilon and target_kl.
    rng : numpy.random.Generator, None
        Shuffles minibatches; only needed when policy_minibatch is smaller
        than the batch.

    Returns
    -------
    dict
        loss (before the update), kl (approximate, after the last step),
        clip_frac, entropy, iters, stopped_early.

    Notes
    -----
    Before each pass over the batch the approximate KL to the collection
    policy is checked; the update stops once it exceeds 1.5 target_kl.
    Advantages are normalized per minibatch.

    """
    data = batch_arrays(batch)
    obs, act = data['obs'], data['act']
    logp_old, adv, w = data['logp'], data['adv'], data['w']
    n = obs.shape[0]
    mb = cfg.policy_minibatch if 0 < cfg.policy_minibatch < n else n
    if mb < n and rng is None:
        raise ValueError('Minibatch shuffling needs an rng')

    def prepared(idx):
        a = adv[idx]
        if cfg.normalize_advantages and a.size > 1:
            a = normalize_advantages(a)
        return a

    full = np.arange(n)
    loss_before, _, _ = ppo_loss_and_grad(policy, obs, act, logp_old, prepared(full),
                                          w, cfg.clip_epsilon)
    iters, stopped = 0, False
    for it in range(cfg.train_pi_iters):
        kl = float(np.mean(logp_old - policy.log_prob(obs, act)))
        if kl > KL_STOP_FACTOR * cfg.target_kl:
            log.debug('early stop at pass %d: approx kl %.5f', it, kl)
            stopped = True
            break
        order = rng.permutation(n) if mb < n else full
        for start in range(0, n, mb):
            idx = order[start:start + mb]
            _, grads, _ = ppo_loss_and_grad(policy, obs[idx], act[idx], logp_old[idx],
                                            prepared(idx), w[idx], cfg.clip_epsilon)
            optimizer.step(policy.params, grads)
        iters += 1

    _, _, info = ppo_loss_and_grad(policy, obs, act, logp_old, prepared(full), w,
                                   cfg.clip_epsilon)
    return {'loss': loss_before,
            'kl': info['approx_kl'],
            'clip_frac': info['clip_frac'],
            'entropy': policy.entropy(),
            'iters': iters,
            'stopped_early': stopped}
