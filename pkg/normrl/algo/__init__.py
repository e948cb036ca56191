"""Policy optimization.

Functions
---------
    - ppo_update : weighted clipped-surrogate update
    - trpo_update : weighted natural-gradient update with line search
    - train : full training loop over the ablation modes
"""

from .ppo import ppo_update, ppo_loss_and_grad
from .trpo import trpo_update, weighted_surrogate
from .train import (train, TrainResult, METRIC_COLUMNS, build_env, value_targets,
                    load_policy, load_value_function)

__all__ = ['ppo_update', 'ppo_loss_and_grad', 'trpo_update', 'weighted_surrogate',
           'train', 'TrainResult', 'METRIC_COLUMNS', 'build_env', 'value_targets',
           'load_policy', 'load_value_function']
