"""Training loop: collect, update statistics, update the policy, fit the critic.

One epoch collects ``steps_per_epoch`` transitions with per-step uncertainty
weights, pushes the completed episodes into the rolling statistics, takes a
weighted PPO or TRPO step and regresses the critic on the targets of the
ablation mode:

    baseline_scalar  scalar critic on discounted returns-to-go
    dvf_bellman      quantile critic on r + gamma q(s') (0 after termination)
    mcclt_no_w       quantile critic on normal variance-schedule targets
    mcclt_full       as mcclt_no_w, with uncertainty-weighted policy updates
"""

import csv
import logging
import math
import os
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..config import AblationMode, Algorithm
from ..envs import make_env
from ..nn import AdamState, save_checkpoint, load_checkpoint
from ..policy import GaussianPolicy, mean_kl
from ..rollout import TrajectoryBuffer, collect, finalize
from ..schedule import (EpisodeStats, VarianceScheduleConfig, record_episode,
                        target_quantiles, distributional_bellman_target)
from ..value import QuantileValueFunction, ScalarValueFunction
from .ppo import ppo_update
from .trpo import trpo_update

log = logging.getLogger(__name__)

METRIC_COLUMNS = ('epoch', 'env_steps', 'ep_ret_mean', 'ep_ret_min', 'ep_ret_max',
                  'ep_len_mean', 'value_loss', 'policy_loss', 'mean_kl', 'mean_w',
                  'l_cur', 'g_cur')

POLICY_CKPT = 'policy.ckpt'
QUANTILE_CKPT = 'quantile_value.ckpt'
SCALAR_CKPT = 'scalar_value.ckpt'


@dataclass
class TrainResult:
    """Outcome of train().

    Attributes
    ----------
    config : TrainConfig
    metrics : list of dict
        One row per epoch, keys METRIC_COLUMNS.
    policy : GaussianPolicy
    value_fn : QuantileValueFunction, ScalarValueFunction
    stats : EpisodeStats
        Rolling episode statistics after the last epoch.

    """

    config: object
    metrics: list = field(default_factory=list)
    policy: GaussianPolicy = None
    value_fn: object = None
    stats: EpisodeStats = None


def build_env(cfg):
    """Environment of a config with its overrides applied."""
    return make_env(cfg.env, noise_scale=cfg.env_noise, max_episode_steps=cfg.env_max_steps,
                    time_feature=cfg.time_feature)


def build_value_function(cfg, obs_dim, rng):
    """Critic of the ablation mode."""
    if cfg.mode.distributional:
        return QuantileValueFunction(obs_dim, cfg.n_quantiles, cfg.quantile_hidden,
                                     cfg.kappa, rng=rng,
                                     literal_sign=cfg.literal_huber_sign)
    return ScalarValueFunction(obs_dim, cfg.value_hidden, rng=rng)


def value_targets(data, cfg, value_fn, stats):
    """Regression targets of the critic for one finalized epoch.

    Parameters
    ----------
    data : dict
        Arrays of a finalized TrajectoryBuffer.
    cfg : TrainConfig
    value_fn : critic of the mode
        Evaluated once here, so the Bellman targets use the pre-fit network.
    stats : EpisodeStats
        Statistics including the episodes of this epoch.

    Returns
    -------
    ndarray
        Shape (B,) for the scalar critic, (B, N) otherwise.

    Notes
    -----
    With target_mean = return the normal targets are centred on the
    undiscounted return-to-go when gamma = 1 and on the discounted one
    otherwise; the variance schedule is the same in both cases.

    """
    if cfg.mode is AblationMode.BASELINE_SCALAR:
        return data['ret']

    alive = ~data['done']
    if cfg.mode is AblationMode.DVF_BELLMAN:
        q_next = value_fn.predict_quantiles(data['next_obs']) * alive[:, np.newaxis]
        return distributional_bellman_target(q_next, data['rew'], cfg.gamma)

    if cfg.target_mean == 'td':
        mean = data['rew'] + cfg.gamma * value_fn.mean_value(data['next_obs']) * alive
    elif cfg.gamma == 1.0:
        mean = data['rtg']
    else:
        mean = data['ret']
    sched = VarianceScheduleConfig(cfg.sigma_sq_min, cfg.n_quantiles)
    return target_quantiles(mean, data['t'], stats, sched, value_fn.zgrid)


def fit_value_function(value_fn, states, targets, optimizer, cfg, rng):
    """train_v_iters Adam steps on random minibatches; mean pre-update loss."""
    n = states.shape[0]
    mb = min(cfg.value_minibatch, n)
    fit = value_fn.fit_quantiles if cfg.mode.distributional else value_fn.fit_scalar
    losses = []
    for _ in range(cfg.train_v_iters):
        idx = rng.choice(n, size=mb, replace=False) if mb < n else np.arange(n)
        losses.append(fit(states[idx], targets[idx], optimizer))
    return float(np.mean(losses))


def _epoch_row(epoch, env_steps, episodes, value_loss, update, kl, mean_w, stats):
    if episodes:
        lengths, returns = np.array(episodes, dtype=float).T
        ret_mean, ret_min, ret_max = returns.mean(), returns.min(), returns.max()
        len_mean = lengths.mean()
    else:
        ret_mean = ret_min = ret_max = len_mean = math.nan
    return {'epoch': epoch, 'env_steps': env_steps,
            'ep_ret_mean': float(ret_mean), 'ep_ret_min': float(ret_min),
            'ep_ret_max': float(ret_max), 'ep_len_mean': float(len_mean),
            'value_loss': value_loss, 'policy_loss': float(update['loss']),
            'mean_kl': float(kl), 'mean_w': float(mean_w),
            'l_cur': stats.l_cur, 'g_cur': stats.g_cur}


def write_metrics(path, rows):
    """Write metric rows as CSV; floats use repr so reruns match byte for byte."""
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(METRIC_COLUMNS)
        for row in rows:
            writer.writerow([repr(row[c]) if isinstance(row[c], float) else row[c]
                             for c in METRIC_COLUMNS])


def save_models(ckpt_dir, cfg, policy, value_fn):
    """Write the policy and critic checkpoints of a run."""
    os.makedirs(ckpt_dir, exist_ok=True)
    save_checkpoint(os.path.join(ckpt_dir, POLICY_CKPT), policy.trunk, extra=policy.log_std,
                    kind='policy', env=cfg.env, time_feature=int(cfg.time_feature))
    if cfg.mode.distributional:
        save_checkpoint(os.path.join(ckpt_dir, QUANTILE_CKPT), value_fn.net,
                        kind='quantile_value', env=cfg.env, kappa=repr(value_fn.kappa),
                        time_feature=int(cfg.time_feature))
    else:
        save_checkpoint(os.path.join(ckpt_dir, SCALAR_CKPT), value_fn.net,
                        kind='scalar_value', env=cfg.env,
                        time_feature=int(cfg.time_feature))


def load_policy(path):
    """Policy and header metadata from a policy checkpoint."""
    net, extra, meta = load_checkpoint(path)
    if meta.get('kind') != 'policy':
        raise ValueError(f'{path} is not a policy checkpoint')
    return GaussianPolicy(net.in_dim, net.out_dim, trunk=net, log_std=extra), meta


def load_value_function(path):
    """Critic and header metadata from a value checkpoint."""
    net, _, meta = load_checkpoint(path)
    kind = meta.get('kind')
    if kind == 'quantile_value':
        vf = QuantileValueFunction(net.in_dim, net.out_dim,
                                   kappa=float(meta.get('kappa', 1.0)), net=net)
    elif kind == 'scalar_value':
        vf = ScalarValueFunction(net.in_dim, net=net)
    else:
        raise ValueError(f'{path} is not a value function checkpoint')
    return vf, meta


def train(cfg, run_dir=None):
    """Train a policy with the critic and weighting of ``cfg.mode``.

    Parameters
    ----------
    cfg : TrainConfig
        Validated here.
    run_dir : str, path-like, None
        If given, ``metrics.csv`` and ``checkpoints/`` are written into it.

    Returns
    -------
    TrainResult

    Notes
    -----
    Three random streams spawned from the seed drive initialisation,
    collection (actions and environment resets) and the updates (minibatch
    sampling), so a run is fully determined by its config.

    Examples
    --------
    >>> from normrl.config import load_config
    >>> from normrl.algo import train
    >>> cfg = load_config(None, {'epochs': '1', 'steps_per_epoch': '200',
    ...                          'quantile_hidden': '16,16', 'n_quantiles': '8',
    ...                          'train_pi_iters': '2', 'train_v_iters': '2'})
    >>> result = train(cfg)
    >>> len(result.metrics)
    1

    """
    cfg.validate()
    init_ss, collect_ss, update_ss = np.random.SeedSequence(cfg.seed).spawn(3)
    init_rng = np.random.default_rng(init_ss)
    collect_rng = np.random.default_rng(collect_ss)
    update_rng = np.random.default_rng(update_ss)

    env = build_env(cfg)
    obs_dim, act_dim = env.spec.obs_dim, env.spec.action_dim
    policy = GaussianPolicy(obs_dim, act_dim, cfg.policy_hidden, cfg.log_std_init,
                            rng=init_rng)
    value_fn = build_value_function(cfg, obs_dim, init_rng)
    pi_optimizer = AdamState(policy.params, lr=cfg.pi_lr)
    vf_optimizer = AdamState(value_fn.params, lr=cfg.vf_lr)
    stats = EpisodeStats()

    log.info('training %s/%s on %s for %d epochs (seed %d)', cfg.algorithm.value,
             cfg.mode.value, cfg.env, cfg.epochs, cfg.seed)
    if run_dir is not None and cfg.dump_trajectories:
        os.makedirs(os.path.join(run_dir, 'trajectories'), exist_ok=True)

    result = TrainResult(config=cfg, policy=policy, value_fn=value_fn, stats=stats)
    n_quantiles = cfg.n_quantiles if cfg.mode.distributional else None
    for epoch in range(cfg.epochs):
        buffer = TrajectoryBuffer(cfg.steps_per_epoch, obs_dim, act_dim, n_quantiles)
        buffer, episodes = collect(env, policy, value_fn, buffer, cfg, collect_rng)
        finalize(buffer, cfg.gamma, cfg.lam, value_fn)
        data = buffer.get()
        if run_dir is not None and cfg.dump_trajectories:
            buffer.dump_jsonl(os.path.join(run_dir, 'trajectories',
                                           f'epoch{epoch:04d}.jsonl'))

        if not episodes:
            warnings.warn(f'epoch {epoch}: no episode completed; '
                          'episode statistics unchanged')
        for length, ret in episodes:
            record_episode(stats, length, ret)

        old = policy.copy()
        if cfg.algorithm is Algorithm.PPO:
            update = ppo_update(data, policy, pi_optimizer, cfg, update_rng)
        else:
            update = trpo_update(data, policy, cfg)
        kl = mean_kl(old, policy, data['obs'])

        targets = value_targets(data, cfg, value_fn, stats)
        value_loss = fit_value_function(value_fn, data['obs'], targets, vf_optimizer, cfg,
                                        update_rng)

        row = _epoch_row(epoch, (epoch + 1) * cfg.steps_per_epoch, episodes, value_loss,
                         update, kl, data['w'].mean(), stats)
        result.metrics.append(row)
        log.info('epoch %d: return %.3f, value loss %.4f, kl %.5f, mean w %.4f', epoch,
                 row['ep_ret_mean'], value_loss, kl, row['mean_w'])

    if run_dir is not None:
        os.makedirs(run_dir, exist_ok=True)
        write_metrics(os.path.join(run_dir, 'metrics.csv'), result.metrics)
        save_models(os.path.join(run_dir, 'checkpoints'), cfg, policy, value_fn)
    return result
