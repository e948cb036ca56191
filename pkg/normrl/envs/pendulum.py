"""Pendulum swing-up with torque noise."""

import numpy as np

from .base import Env, EnvSpec


def angle_normalize(x):
    """Wrap an angle to [-pi, pi)."""
    return ((x + np.pi) % (2 * np.pi)) - np.pi


class NoisyPendulum(Env):
    """Classic torque-limited swing-up; the applied torque is perturbed.

    Internal state (theta, theta_dot) with theta = 0 upright; the observation
    is (cos theta, sin theta, theta_dot).  Reward
    -(theta^2 + 0.1 theta_dot^2 + 0.001 u^2).

    """

    default_spec = EnvSpec(name='noisy_pendulum', state_dim=3, action_dim=1,
                           action_low=-2.0, action_high=2.0,
                           max_episode_steps=200, noise_scale=0.1)
    nominal_start = np.array([np.pi, 0.0])
    max_speed = 8.0
    dt = 0.05
    g = 10.0
    m = 1.0
    length = 1.0

    def _initial_state(self):
        return self.nominal_start + np.array([np.pi, 1.0]) * self._noise(2)

    def _observe(self):
        th, thdot = self.state
        obs = np.array([np.cos(th), np.sin(th), thdot])
        if self.spec.time_feature:
            obs = np.append(obs, 1.0 - self.t / self.spec.max_episode_steps)
        return obs

    def _dynamics(self, state, action):
        th, thdot = state
        u = action[0] + self.spec.action_high * self._noise(1)[0]
        thdot = thdot + (3 * self.g / (2 * self.length) * np.sin(th)
                         + 3.0 / (self.m * self.length**2) * u) * self.dt
        thdot = np.clip(thdot, -self.max_speed, self.max_speed)
        th = th + thdot * self.dt
        return np.array([th, thdot]), False

    def _reward(self, state, action):
        th, thdot = state
        u = action[0]
        return -(angle_normalize(th)**2 + 0.1 * thdot**2 + 0.001 * u**2)
