"""Test the built-in environments."""
import numpy as np
from numpy.testing import TestCase, assert_allclose, assert_array_equal, assert_equal
from scipy.linalg import solve_discrete_are

from normrl.envs import make_env, env_names, LqChain, EnvSpec


def rollout(env, seed, actions):
    obs = [env.reset(seed=seed)]
    rewards = []
    for a in actions:
        res = env.step(a)
        obs.append(res.next_state)
        rewards.append(res.reward)
        if res.done or res.truncated:
            break
    return np.array(obs), np.array(rewards)


class TestEnvs(TestCase):
    def test_registry(self):
        assert_equal(env_names, ['lq_chain', 'noisy_pendulum', 'point_mass_reach'])
        for name in env_names:
            env = make_env(name)
            obs = env.reset(seed=0)
            assert_equal(obs.shape, (env.spec.obs_dim,))
            assert_equal(env.spec.obs_dim, env.spec.state_dim + 1)

    def test_seeded_reset_is_deterministic(self):
        for name in env_names:
            env = make_env(name)
            actions = np.random.default_rng(0).uniform(-1, 1, (20, env.spec.action_dim))
            obs1, rew1 = rollout(env, 7, actions)
            obs2, rew2 = rollout(env, 7, actions)
            assert_array_equal(obs1, obs2)
            assert_array_equal(rew1, rew2)
            obs3, _ = rollout(env, 8, actions)
            assert np.any(obs1 != obs3)

    def test_nominal_start(self):
        env = make_env('point_mass_reach', noise_scale=0.0)
        assert_array_equal(env.reset(seed=0), [1.0, 1.0, 0.0, 0.0, 1.0])
        env = make_env('noisy_pendulum', noise_scale=0.0, time_feature=False)
        assert_allclose(env.reset(seed=0), [-1.0, 0.0, 0.0], atol=1e-15)
        env = make_env('lq_chain', noise_scale=0.0)
        assert_array_equal(env.reset(seed=3), [0.0, 0.0, 0.0, 1.0])

    def test_time_limit(self):
        env = make_env('point_mass_reach', max_episode_steps=3)
        env.reset(seed=0)
        results = [env.step(np.zeros(2)) for _ in range(3)]
        assert_equal([r.truncated for r in results], [False, False, True])
        assert_equal([r.done for r in results], [False, False, False])
        assert_allclose([r.next_state[-1] for r in results], [2 / 3, 1 / 3, 0.0])
        with self.assertRaises(RuntimeError):
            env.step(np.zeros(2))
        env.reset(seed=1)
        env.step(np.zeros(2))

    def test_step_before_reset(self):
        with self.assertRaises(RuntimeError):
            make_env('lq_chain').step(np.zeros(1))

    def test_actions(self):
        env = make_env('point_mass_reach')
        assert_array_equal(env.clip([5.0, -0.5]), [1.0, -0.5])
        env.reset(seed=0)
        with self.assertRaises(ValueError):
            env.step(np.zeros(3))

    def test_point_mass_reward(self):
        env = make_env('point_mass_reach')
        assert_allclose(env._reward(np.zeros(4), np.zeros(2)), 0.0, atol=0.0)
        rng = np.random.default_rng(0)
        for _ in range(100):
            assert env._reward(rng.standard_normal(4), rng.uniform(-1, 1, 2)) < 0.0

    def test_return_variance_comes_from_noise(self):
        for name in env_names:
            returns = {}
            for noise in [0.0, None]:
                env = make_env(name, noise_scale=noise, max_episode_steps=30)
                actions = np.zeros((30, env.spec.action_dim))
                returns[noise] = [rollout(env, s, actions)[1].sum() for s in range(10)]
            assert_array_equal(returns[0.0], returns[0.0][0])
            assert np.std(returns[None]) > 0.0

    def test_errors(self):
        with self.assertRaises(ValueError):
            make_env('cartpole')
        with self.assertRaises(ValueError):
            make_env('lq_chain', noise_scale=-1.0)
        with self.assertRaises(ValueError):
            make_env('lq_chain', max_episode_steps=0)
        with self.assertRaises(ValueError):
            EnvSpec(name='x', state_dim=1, action_dim=1, action_low=1.0, action_high=-1.0,
                    max_episode_steps=10, noise_scale=0.0)


class TestLqChain(TestCase):
    def wide_env(self, start=None, **kwargs):
        spec = LqChain.default_spec.with_overrides(action_low=-1e6, action_high=1e6,
                                                   **kwargs)
        env = LqChain(spec)
        if start is not None:
            env.nominal_start = np.asarray(start, dtype=float)
        return env

    def run_optimal(self, env, seed):
        obs = env.reset(seed=seed)
        total = 0.0
        for t in range(env.spec.max_episode_steps):
            res = env.step(env.optimal_action(obs, t))
            total += res.reward
            obs = res.next_state
        return total

    def test_long_horizon_matches_stationary_solution(self):
        env = LqChain()
        _, P, _ = env.riccati(horizon=2000)
        P_inf = solve_discrete_are(env.A, env.B, env.Q, env.R)
        assert_allclose(P[0], P_inf, rtol=1e-6)

    def test_noise_free_return(self):
        env = self.wide_env(start=[2.0, -1.0, 0.5], noise_scale=0.0, max_episode_steps=20)
        x0 = env.nominal_start
        assert_allclose(self.run_optimal(env, 0), env.expected_return(x0), rtol=1e-9)
        assert env.expected_return(x0) < 0.0

    def test_monte_carlo_return(self):
        for start in [None, [2.0, 0.0, 0.0]]:
            env = self.wide_env(start=start, max_episode_steps=20)
            returns = np.array([self.run_optimal(env, s) for s in range(2000)])
            stderr = returns.std(ddof=1) / np.sqrt(returns.size)
            assert abs(returns.mean() - env.expected_return()) < 4.0 * stderr

    def test_optimal_beats_perturbed(self):
        env = self.wide_env(start=[2.0, 0.0, 0.0], noise_scale=0.0, max_episode_steps=20)
        best = self.run_optimal(env, 0)
        obs = env.reset(seed=0)
        total = 0.0
        for t in range(20):
            res = env.step(env.optimal_action(obs, t) + 0.1)
            total += res.reward
            obs = res.next_state
        assert total < best

    def test_state_spread_builds_up(self):
        # from the near-origin start the noise accumulates, so the reward
        # varies more across episodes later on
        env = LqChain()
        rewards = []
        for seed in range(300):
            _, rew = rollout(env, seed, np.zeros((60, 1)))
            rewards.append(rew)
        spread = np.std(rewards, axis=0)
        assert spread[5] < spread[20] < spread[59]
        assert spread[59] > 3.0 * spread[1]
