"""Planar point mass reaching a goal."""

import numpy as np

from .base import Env, EnvSpec


class PointMassReach(Env):
    """2D double integrator driven toward the origin.

    State (x, y, vx, vy).  The action is an acceleration in [-1, 1]^2; the
    velocity receives Gaussian noise every step.  Reward
    -||p - goal|| - 0.01 ||a||^2, maximal (zero) at the goal with no action.

    """

    default_spec = EnvSpec(name='point_mass_reach', state_dim=4, action_dim=2,
                           action_low=-1.0, action_high=1.0,
                           max_episode_steps=100, noise_scale=0.05)
    goal = np.zeros(2)
    nominal_start = np.array([1.0, 1.0, 0.0, 0.0])
    dt = 0.1
    start_spread = 4.0

    def _initial_state(self):
        state = self.nominal_start.copy()
        state[:2] += self.start_spread * self._noise(2)
        return state

    def _dynamics(self, state, action):
        vel = state[2:] + self.dt * action + self._noise(2)
        pos = state[:2] + self.dt * vel
        return np.concatenate([pos, vel]), False

    def _reward(self, state, action):
        return -np.linalg.norm(state[:2] - self.goal) - 0.01 * np.dot(action, action)
