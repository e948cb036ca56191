"""Built-in stochastic continuous-control environments.

Functions
---------
    - make_env() : construct an environment by name with spec overrides
    - PointMassReach : 2D double integrator reaching a goal
    - NoisyPendulum : torque-limited swing-up with torque noise
    - LqChain : linear-quadratic chain with an exact LQR oracle
"""

from .base import Env, EnvSpec, StepResult
from .point_mass import PointMassReach
from .pendulum import NoisyPendulum
from .lq_chain import LqChain

registry = {cls.default_spec.name: cls for cls in (PointMassReach, NoisyPendulum, LqChain)}
env_names = sorted(registry)


def make_env(name, noise_scale=None, max_episode_steps=None, time_feature=None):
    """Construct a built-in environment.

    Parameters
    ----------
    name : str
        One of env_names: %s
    noise_scale : float, None
        Override of the spec noise scale.
    max_episode_steps : int, None
        Override of the time limit.
    time_feature : bool, None
        Override of the time feature flag.

    Returns
    -------
    Env

    Examples
    --------
    >>> from normrl.envs import make_env
    >>> env = make_env('point_mass_reach', noise_scale=0.0)
    >>> env.reset(seed=0)
    array([1., 1., 0., 0., 1.])

    """
    if name not in registry:
        raise ValueError(f'Unknown environment {name!r}; choose from {env_names}')
    cls = registry[name]
    spec = cls.default_spec.with_overrides(noise_scale=noise_scale,
                                           max_episode_steps=max_episode_steps,
                                           time_feature=time_feature)
    return cls(spec)


make_env.__doc__ %= ', '.join(env_names)

__all__ = ['Env', 'EnvSpec', 'StepResult', 'PointMassReach', 'NoisyPendulum', 'LqChain',
           'registry', 'env_names', 'make_env']
