"""normrl: Normality-guided distributional value learning for PPO and TRPO."""

import re
import warnings
import numpy as np
import scipy as sp

from .version import version_tuple as __version_tuple__
from .version import version as __version__

from . import (algo, envs, krylov, nn, util, value)
from . import (advantage, config, diag, policy, rollout, schedule, stats, uncertainty)

from .stats import std_normal_cdf, std_normal_inv_cdf, quantile_z_grid
from .config import TrainConfig, AblationMode, load_config
from .policy import GaussianPolicy
from .value import QuantileValueFunction, ScalarValueFunction
from .envs import make_env
from .algo import train, ppo_update, trpo_update

__all__ = ['__version_tuple__', '__version__',
           'algo', 'envs', 'krylov', 'nn', 'util', 'value',
           'advantage', 'config', 'diag', 'policy', 'rollout', 'schedule', 'stats',
           'uncertainty',
           'std_normal_cdf', 'std_normal_inv_cdf', 'quantile_z_grid',
           'TrainConfig', 'AblationMode', 'load_config',
           'GaussianPolicy', 'QuantileValueFunction', 'ScalarValueFunction',
           'make_env', 'train', 'ppo_update', 'trpo_update']

__all__ += ['test']

__doc__ += """

Utility tools
-------------
test         Run the normrl test suite (requires pytest)
__version__  normrl version string
"""


def _check_version(name, module, minimum):
    """Warn when an installed dependency is older than major.minor ``minimum``."""
    found = re.match(r'(\d+)\.(\d+)', module.__version__)
    if found is None:
        return
    have = tuple(int(part) for part in found.groups())
    need = tuple(int(part) for part in minimum.split('.'))
    if have < need:
        warnings.warn(f'{name} {minimum} or newer is recommended for normrl '
                      f'(found {module.__version__})', UserWarning, stacklevel=3)


_check_version('NumPy', np, '1.17')
_check_version('SciPy', sp, '1.4')


def test(verbose=False, slow=False):
    """Run the normrl tests with pytest.

    Parameters
    ----------
    verbose : bool
        Pass --verbose to pytest instead of --quiet.
    slow : bool
        Include the long training-trend tests marked slow.

    Returns
    -------
    int
        The pytest exit code.

    """
    import sys     # pylint: disable=import-outside-toplevel
    try:
        import pytest  # pylint: disable=import-outside-toplevel
    except ModuleNotFoundError as e:
        raise ModuleNotFoundError('pytest is not installed and is needed for test()') from e

    for label, ver in [('Python', sys.version.replace('\n', '')),
                       ('pytest', pytest.__version__), ('scipy', sp.__version__),
                       ('numpy', np.__version__), ('normrl', __version__)]:
        print(f'{label:<7s}version: {ver}')

    args = [__path__[0], '--verbose' if verbose else '--quiet']
    if slow:
        args += ['-m', 'slow or not slow']

    try:
        return pytest.main(args)
    except SystemExit as e:
        return e.code
