"""Common environment interface."""

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True)
class EnvSpec:
    """Static description of an environment.

    Attributes
    ----------
    name : str
        Registry name.
    state_dim : int
        Dimension of the physical state (before the optional time feature).
    action_dim : int
        Action dimension.
    action_low, action_high : float
        Box bounds applied to every action component.
    max_episode_steps : int
        Time limit.
    noise_scale : float
        Scale of the transition (and initial state) noise.
    time_feature : bool
        Append the remaining fraction of the time limit to the observation.

    """

    name: str
    state_dim: int
    action_dim: int
    action_low: float
    action_high: float
    max_episode_steps: int
    noise_scale: float
    time_feature: bool = True

    def __post_init__(self):
        if self.state_dim < 1 or self.action_dim < 1:
            raise ValueError('State and action dimensions must be positive')
        if not (np.isfinite(self.action_low) and np.isfinite(self.action_high)
                and self.action_low < self.action_high):
            raise ValueError('Action bounds must be finite and ordered')
        if self.max_episode_steps < 1:
            raise ValueError('max_episode_steps must be at least 1')
        if self.noise_scale < 0:
            raise ValueError('noise_scale must be nonnegative')

    @property
    def obs_dim(self):
        """Observation dimension seen by the agent."""
        return self.state_dim + int(self.time_feature)

    def with_overrides(self, **kwargs):
        """Copy with some fields replaced (None values are ignored)."""
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


class StepResult(NamedTuple):
    """Outcome of one environment step."""

    next_state: np.ndarray
    reward: float
    done: bool
    truncated: bool


class Env:
    """Base class for the built-in stochastic control tasks.

    Subclasses set ``nominal_start`` and implement ``_initial_state``,
    ``_dynamics`` and ``_reward``.  The base class owns seeding, action
    clipping, the time limit and the observation layout.

    """

    default_spec = None

    def __init__(self, spec=None):
        self.spec = self.default_spec if spec is None else spec
        self.rng = np.random.default_rng()
        self.state = None
        self.t = 0
        self._ended = True

    def __repr__(self):
        """Name the environment."""
        return f'{type(self).__name__}({self.spec.name})'

    def _observe(self):
        obs = np.asarray(self.state, dtype=float).copy()
        if self.spec.time_feature:
            remaining = 1.0 - self.t / self.spec.max_episode_steps
            obs = np.append(obs, remaining)
        return obs

    def clip(self, action):
        """Clip an action to the box bounds."""
        action = np.asarray(action, dtype=float)
        if action.shape != (self.spec.action_dim,):
            raise ValueError(f'Action of shape {action.shape}, expected '
                             f'({self.spec.action_dim},)')
        return np.clip(action, self.spec.action_low, self.spec.action_high)

    def reset(self, seed=None):
        """Draw an initial state from the start distribution.

        Parameters
        ----------
        seed : int, None
            Seed of the episode noise stream.

        Returns
        -------
        ndarray
            Initial observation.

        """
        self.rng = np.random.default_rng(seed)
        self.state = self._initial_state()
        self.t = 0
        self._ended = False
        return self._observe()

    def step(self, action):
        """Advance the dynamics by one step.

        Parameters
        ----------
        action : array_like
            Clipped to the action bounds.

        Returns
        -------
        StepResult

        """
        if self._ended:
            raise RuntimeError('step() called on a finished episode; call reset() first')
        action = self.clip(action)
        reward = float(self._reward(self.state, action))
        self.state, done = self._dynamics(self.state, action)
        self.t += 1
        truncated = (not done) and self.t >= self.spec.max_episode_steps
        self._ended = done or truncated
        return StepResult(self._observe(), reward, bool(done), bool(truncated))

    def _noise(self, size):
        return self.spec.noise_scale * self.rng.standard_normal(size)

    def _initial_state(self):
        raise NotImplementedError

    def _dynamics(self, state, action):
        raise NotImplementedError

    def _reward(self, state, action):
        raise NotImplementedError
