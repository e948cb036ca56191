"""Linear-quadratic chain with an exact finite-horizon oracle."""

import numpy as np
from scipy import linalg

from .base import Env, EnvSpec


class LqChain(Env):
    """Noisy linear system x' = A x + B u + w with quadratic cost.

    A couples each coordinate to its successor, the single actuator drives
    the last coordinate, and w ~ N(0, noise_scale^2 I).  Reward
    -(x^T Q x + u^T R u).  Because the task is linear-quadratic-Gaussian, the
    optimal controller and its expected return are available in closed form
    (see riccati).

    Episodes start next to the origin, so the spread of the state, and with
    it the step-to-step randomness of the reward, builds up from the noise
    over the first tens of steps before settling.  The spread of the
    remaining return still shrinks towards the time limit.

    """

    default_spec = EnvSpec(name='lq_chain', state_dim=3, action_dim=1,
                           action_low=-10.0, action_high=10.0,
                           max_episode_steps=100, noise_scale=0.1)
    A = 0.98 * np.eye(3) + 0.2 * np.eye(3, k=1)
    B = np.array([[0.0], [0.0], [0.2]])
    Q = np.eye(3)
    R = 0.1 * np.eye(1)
    nominal_start = np.zeros(3)
    start_spread = 1.0

    def __init__(self, spec=None):
        super().__init__(spec)
        self._riccati = None

    def _initial_state(self):
        return self.nominal_start + self.start_spread * self._noise(3)

    def _dynamics(self, state, action):
        return self.A @ state + self.B @ action + self._noise(3), False

    def _reward(self, state, action):
        return -(state @ self.Q @ state + action @ self.R @ action)

    def riccati(self, horizon=None):
        """Backward Riccati recursion over the episode.

        Parameters
        ----------
        horizon : int, None
            Number of steps (defaults to max_episode_steps).

        Returns
        -------
        gains : ndarray
            K_t, shape (T, action_dim, state_dim); the optimal action is -K_t x.
        P : ndarray
            Quadratic cost-to-go matrices, shape (T+1, n, n), P_T = 0.
        c : ndarray
            Noise contribution to the cost-to-go, shape (T+1,), c_T = 0.

        Notes
        -----
        The expected cost from state x at step t under the optimal controller
        is x^T P_t x + c_t; action clipping is ignored.

        """
        horizon = self.spec.max_episode_steps if horizon is None else horizon
        if self._riccati is not None and self._riccati[0].shape[0] == horizon:
            return self._riccati

        A, B, Q, R = self.A, self.B, self.Q, self.R
        n = A.shape[0]
        noise_cov = self.spec.noise_scale**2 * np.eye(n)
        P = np.zeros((horizon + 1, n, n))
        c = np.zeros(horizon + 1)
        gains = np.zeros((horizon, B.shape[1], n))
        for t in range(horizon - 1, -1, -1):
            Pn = P[t + 1]
            gains[t] = linalg.solve(R + B.T @ Pn @ B, B.T @ Pn @ A, assume_a='pos')
            P[t] = Q + A.T @ Pn @ (A - B @ gains[t])
            P[t] = 0.5 * (P[t] + P[t].T)
            c[t] = c[t + 1] + np.trace(Pn @ noise_cov)
        self._riccati = (gains, P, c)
        return self._riccati

    def optimal_action(self, obs, t):
        """Finite-horizon LQR action for an observation at step t."""
        gains, _, _ = self.riccati()
        x = np.asarray(obs, dtype=float)[:self.spec.state_dim]
        t = min(int(t), gains.shape[0] - 1)
        return -gains[t] @ x

    def expected_return(self, x0=None):
        """Expected undiscounted return of the optimal controller.

        With x0 given, from that initial state; otherwise averaged over the
        start distribution N(nominal_start, (start_spread * noise_scale)^2 I).
        """
        _, P, c = self.riccati()
        if x0 is not None:
            x0 = np.asarray(x0, dtype=float)
            return -float(x0 @ P[0] @ x0 + c[0])
        mean = self.nominal_start
        var = (self.start_spread * self.spec.noise_scale)**2
        return -float(mean @ P[0] @ mean + var * np.trace(P[0]) + c[0])
