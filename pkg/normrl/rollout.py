"""Trajectory collection, the rollout buffer and policy evaluation."""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np

from .advantage import discount_cumsum, gae
from .envs import make_env
from .uncertainty import uncertainty_error, uncertainty_weight
from .util.utils import spawn_seeds

log = logging.getLogger(__name__)


@dataclass
class Transition:
    """One stored step (used for iteration and the JSONL dump)."""

    t: int
    state: list
    action: list
    log_prob: float
    reward: float
    done: bool
    truncated: bool
    value: float
    w: float
    quantiles: Optional[list] = None


@dataclass
class PathRecord:
    """Bookkeeping of one contiguous path in the buffer.

    ``terminated`` marks a true episode end, ``truncated`` the time limit; a
    path with neither was cut by the end of the epoch.
    """

    start: int
    end: int
    final_obs: np.ndarray
    terminated: bool
    truncated: bool

    @property
    def slice(self):
        """Index range of the path."""
        return slice(self.start, self.end)

    @property
    def cut(self):
        """True if the path was interrupted by the epoch boundary."""
        return not (self.terminated or self.truncated)


class TrajectoryBuffer:
    """Fixed-size on-policy buffer of transitions grouped into paths.

    Attributes
    ----------
    size : int
        Capacity, the number of steps collected per epoch.
    paths : list of PathRecord
        Closed paths, contiguous and in collection order.
    finalized : bool
        Set once advantages and targets are computed.

    """

    def __init__(self, size, obs_dim, act_dim, n_quantiles=None):
        if size < 1:
            raise ValueError('Buffer size must be positive')
        self.size = size
        self.n_quantiles = n_quantiles
        self.t = np.zeros(size, dtype=int)
        self.obs = np.zeros((size, obs_dim))
        self.next_obs = np.zeros((size, obs_dim))
        self.act = np.zeros((size, act_dim))
        self.logp = np.zeros(size)
        self.rew = np.zeros(size)
        self.done = np.zeros(size, dtype=bool)
        self.truncated = np.zeros(size, dtype=bool)
        self.val = np.zeros(size)
        self.w = np.ones(size)
        self.quantiles = None if n_quantiles is None else np.zeros((size, n_quantiles))
        # filled by finalize
        self.adv = np.zeros(size)
        self.ret = np.zeros(size)
        self.rtg = np.zeros(size)

        self.ptr = 0
        self.path_start = 0
        self.paths = []
        self.finalized = False

    def __len__(self):
        """Number of stored steps."""
        return self.ptr

    @property
    def full(self):
        """True once ``size`` steps are stored."""
        return self.ptr == self.size

    def store(self, t, obs, act, logp, rew, next_obs, done, truncated, value,
              w=1.0, quantiles=None):
        """Append one transition to the open path."""
        if self.ptr >= self.size:
            raise RuntimeError('Buffer is full')
        if self.finalized:
            raise RuntimeError('Buffer is finalized')
        i = self.ptr
        self.t[i] = t
        self.obs[i] = obs
        self.act[i] = act
        self.logp[i] = logp
        self.rew[i] = rew
        self.next_obs[i] = next_obs
        self.done[i] = done
        self.truncated[i] = truncated
        self.val[i] = value
        self.w[i] = w
        if self.quantiles is not None:
            self.quantiles[i] = quantiles
        self.ptr += 1

    def end_path(self, final_obs, terminated=False, truncated=False):
        """Close the open path at the current pointer."""
        if self.ptr == self.path_start:
            return
        self.paths.append(PathRecord(self.path_start, self.ptr,
                                     np.array(final_obs, dtype=float),
                                     bool(terminated), bool(truncated)))
        self.path_start = self.ptr

    def finalize(self, gamma, lam, value_fn):
        """Compute GAE advantages and return targets; see finalize()."""
        return finalize(self, gamma, lam, value_fn)

    def get(self):
        """Arrays of the finalized buffer as a dict."""
        if not self.finalized:
            raise RuntimeError('Buffer must be finalized before use')
        data = {'t': self.t, 'obs': self.obs, 'next_obs': self.next_obs, 'act': self.act,
                'logp': self.logp, 'rew': self.rew, 'done': self.done,
                'truncated': self.truncated, 'val': self.val, 'w': self.w,
                'adv': self.adv, 'ret': self.ret, 'rtg': self.rtg}
        if self.quantiles is not None:
            data['quantiles'] = self.quantiles
        return data

    def transitions(self):
        """Iterate over the stored steps as Transition records."""
        for i in range(self.ptr):
            yield Transition(
                t=int(self.t[i]), state=self.obs[i].tolist(), action=self.act[i].tolist(),
                log_prob=float(self.logp[i]), reward=float(self.rew[i]),
                done=bool(self.done[i]), truncated=bool(self.truncated[i]),
                value=float(self.val[i]), w=float(self.w[i]),
                quantiles=None if self.quantiles is None else self.quantiles[i].tolist())

    def dump_jsonl(self, path):
        """Write one JSON object per transition."""
        with open(path, 'w', encoding='utf-8') as f:
            for tr in self.transitions():
                f.write(json.dumps(asdict(tr)) + '\n')


def collect(env, policy, value_fn, buffer, cfg, rng, zgrid=None):
    """Fill an empty buffer with one epoch of on-policy experience.

    Parameters
    ----------
    env : Env
        Reset at the start with a seed drawn from rng.
    policy : GaussianPolicy
    value_fn : QuantileValueFunction, ScalarValueFunction
        Critic; quantile critics also provide the bars and weights.
    buffer : TrajectoryBuffer
        Empty buffer; filled to capacity.
    cfg : TrainConfig
        Uses mode, force_unit_weight and the temperature.
    rng : numpy.random.Generator
        Action sampling and environment seeds.
    zgrid : ZGrid, None
        Grid of the critic (taken from value_fn if None).

    Returns
    -------
    buffer : TrajectoryBuffer
    episodes : list of (length, return)
        Episodes that ended inside the epoch; a final partial episode is
        left out.

    """
    if len(buffer) or buffer.paths:
        raise ValueError('collect() needs an empty buffer')

    distributional = cfg.mode.distributional
    weighted = cfg.mode.weighted and not cfg.force_unit_weight
    temperature = cfg.resolved_temperature
    if distributional and zgrid is None:
        zgrid = value_fn.zgrid

    episodes = []
    obs = env.reset(seed=int(rng.integers(2**31)))
    t, ep_ret = 0, 0.0
    for _ in range(buffer.size):
        action, logp = policy.sample_action(obs, rng)
        quantiles, w = None, 1.0
        if distributional:
            quantiles = value_fn.predict_quantiles(obs)
            value = float(quantiles.mean())
            if weighted:
                w = uncertainty_weight(uncertainty_error(quantiles, zgrid), temperature)
        else:
            value = float(value_fn.value(obs))

        res = env.step(action)
        buffer.store(t, obs, action, logp, res.reward, res.next_state, res.done,
                     res.truncated, value, w, quantiles)
        t += 1
        ep_ret += res.reward

        if res.done or res.truncated:
            buffer.end_path(res.next_state, terminated=res.done, truncated=res.truncated)
            episodes.append((t, ep_ret))
            obs = env.reset(seed=int(rng.integers(2**31)))
            t, ep_ret = 0, 0.0
        else:
            obs = res.next_state

    buffer.end_path(obs)
    return buffer, episodes


def finalize(buffer, gamma, lam, value_fn):
    """Per-path advantages and return targets.

    Parameters
    ----------
    buffer : TrajectoryBuffer
        Full, not yet finalized.
    gamma, lam : float
        GAE parameters.
    value_fn : critic with ``value(states)``
        Bootstraps time-limit and epoch-cut path ends.

    Returns
    -------
    TrajectoryBuffer
        With ``adv`` (GAE), ``ret`` (discounted returns-to-go) and ``rtg``
        (undiscounted returns-to-go, the means of the normal targets when
        gamma = 1).

    Notes
    -----
    A true termination bootstraps both targets with 0.  A time-limit end
    bootstraps GAE with the critic value of the final observation while the
    undiscounted return-to-go stops at the episode end.  A path cut by the
    epoch boundary bootstraps both with the critic value.

    """
    if buffer.finalized:
        raise RuntimeError('Buffer is already finalized')
    if not buffer.full:
        raise ValueError(f'Buffer holds {len(buffer)} of {buffer.size} steps')

    for path in buffer.paths:
        sl = path.slice
        if path.terminated:
            boot_gae = boot_rtg = 0.0
        else:
            boot_gae = float(value_fn.value(path.final_obs))
            boot_rtg = boot_gae if path.cut else 0.0
        est = gae(buffer.rew[sl], buffer.val[sl], gamma, lam, terminal_bootstrap=boot_gae)
        buffer.adv[sl] = est.advantages
        buffer.ret[sl] = est.returns_to_go
        buffer.rtg[sl] = discount_cumsum(np.append(buffer.rew[sl], boot_rtg), 1.0)[:-1]

    buffer.finalized = True
    return buffer


def run_episode(env, policy, seed, deterministic=True, return_states=False):
    """Roll out one episode and return its rewards.

    Parameters
    ----------
    env : Env
    policy : GaussianPolicy
    seed : int
        Seeds both the environment and the action noise.
    deterministic : bool
        Act with the policy mean instead of sampling.
    return_states : bool
        Also return the visited observations.

    Returns
    -------
    rewards : ndarray
        Per-step rewards, shape (T,).
    states : ndarray
        Observations s_0..s_{T-1}, shape (T, obs_dim); only if return_states.

    """
    env_seed, act_seed = spawn_seeds(seed, 2)
    rng = np.random.default_rng(act_seed)
    obs = env.reset(seed=env_seed)
    rewards, states = [], []
    while True:
        states.append(obs)
        if deterministic:
            action = policy.mean(obs)
        else:
            action, _ = policy.sample_action(obs, rng)
        res = env.step(action)
        rewards.append(res.reward)
        if res.done or res.truncated:
            break
        obs = res.next_state
    if return_states:
        return np.array(rewards), np.array(states)
    return np.array(rewards)


def episode_rewards(policy, env_name, episodes, seed, deterministic=True, n_workers=1,
                    return_states=False, **env_kwargs):
    """Reward sequences of independent episodes.

    Episode k uses a stream derived from (seed, k) and its own environment
    instance, so the result does not depend on n_workers.

    Returns
    -------
    list
        One run_episode result per episode, in episode order.

    """
    if episodes < 1:
        raise ValueError('Need at least one episode')
    seeds = spawn_seeds(seed, episodes)

    def one(s):
        return run_episode(make_env(env_name, **env_kwargs), policy, s, deterministic,
                           return_states)

    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            return list(pool.map(one, seeds))
    return [one(s) for s in seeds]


def evaluate(policy, env_name, episodes, seed, deterministic=True, n_workers=1,
             **env_kwargs):
    """Return statistics of a policy.

    Returns
    -------
    dict
        episodes, mean_return, std_return, stderr_return (None for a single
        episode), mean_length.

    """
    rewards = episode_rewards(policy, env_name, episodes, seed, deterministic, n_workers,
                              False, **env_kwargs)
    returns = np.array([r.sum() for r in rewards])
    lengths = np.array([r.size for r in rewards])
    stderr = None
    if episodes > 1:
        stderr = float(returns.std(ddof=1) / np.sqrt(episodes))
    log.debug('evaluated %d episodes on %s: mean return %.4f', episodes, env_name,
              returns.mean())
    return {'episodes': int(episodes),
            'mean_return': float(returns.mean()),
            'std_return': float(returns.std(ddof=1)) if episodes > 1 else 0.0,
            'stderr_return': stderr,
            'mean_length': float(lengths.mean())}
