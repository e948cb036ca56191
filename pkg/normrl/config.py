"""Training configuration: dataclass, flat key=value files and overrides.

A config file holds one ``key = value`` entry per line; ``#`` starts a
comment.  Values are parsed with the type of the matching TrainConfig field:
tuples of ints are comma separated (``policy_hidden = 64,32``), optional
fields accept ``none``, booleans accept true/false/1/0/yes/no.
"""

import dataclasses
import enum
import typing
from dataclasses import dataclass

from .envs import env_names


class ConfigError(ValueError):
    """Invalid configuration key or value."""


class Algorithm(str, enum.Enum):
    """Policy optimizer."""

    PPO = 'ppo'
    TRPO = 'trpo'


class AblationMode(str, enum.Enum):
    """Critic and weighting variant of a run.

    baseline_scalar : scalar value function, w = 1
    dvf_bellman     : quantile critic on distributional Bellman targets, w = 1
    mcclt_no_w      : quantile critic on normal variance-schedule targets, w = 1
    mcclt_full      : normal variance-schedule targets and uncertainty weights
    """

    BASELINE_SCALAR = 'baseline_scalar'
    DVF_BELLMAN = 'dvf_bellman'
    MCCLT_NO_W = 'mcclt_no_w'
    MCCLT_FULL = 'mcclt_full'

    @property
    def distributional(self):
        """True if the mode trains a quantile value function."""
        return self is not AblationMode.BASELINE_SCALAR

    @property
    def weighted(self):
        """True if the mode weights the policy objective."""
        return self is AblationMode.MCCLT_FULL


DEFAULT_TEMPERATURE = {Algorithm.PPO: 0.05, Algorithm.TRPO: 0.01}

_ALIASES = {'lambda': 'lam'}


@dataclass
class TrainConfig:
    """Hyperparameters of one training run."""

    algorithm: Algorithm = Algorithm.PPO
    mode: AblationMode = AblationMode.MCCLT_FULL
    env: str = 'point_mass_reach'
    seed: int = 0
    epochs: int = 50
    steps_per_epoch: int = 4000
    # returns and advantages
    gamma: float = 0.99
    lam: float = 0.97
    # distributional critic
    n_quantiles: int = 100
    kappa: float = 1.0
    sigma_sq_min: float = 10.0
    temperature: typing.Optional[float] = None
    target_mean: str = 'return'
    literal_huber_sign: bool = False
    force_unit_weight: bool = False
    # networks
    policy_hidden: typing.Tuple[int, ...] = (64, 32)
    value_hidden: typing.Tuple[int, ...] = (64, 64)
    quantile_hidden: typing.Tuple[int, ...] = (512, 512)
    log_std_init: float = -0.5
    pi_lr: float = 3e-4
    vf_lr: float = 1e-3
    train_v_iters: int = 80
    value_minibatch: int = 256
    # PPO
    train_pi_iters: int = 80
    policy_minibatch: int = 0
    normalize_advantages: bool = True
    clip_epsilon: float = 0.2
    target_kl: float = 0.01
    # TRPO
    kl_delta: float = 0.01
    cg_iters: int = 10
    cg_damping: float = 0.1
    backtrack_coef: float = 0.8
    backtrack_iters: int = 10
    # environment
    env_noise: typing.Optional[float] = None
    env_max_steps: typing.Optional[int] = None
    time_feature: bool = True
    # evaluation and debugging
    eval_episodes: int = 10
    dump_trajectories: bool = False

    @property
    def resolved_temperature(self):
        """Temperature, defaulting per algorithm."""
        if self.temperature is not None:
            return self.temperature
        return DEFAULT_TEMPERATURE[self.algorithm]

    def validate(self):
        """Check ranges; raise ConfigError naming the first bad key."""
        positive = ['epochs', 'steps_per_epoch', 'n_quantiles', 'kappa', 'sigma_sq_min',
                    'pi_lr', 'vf_lr', 'train_v_iters', 'value_minibatch',
                    'train_pi_iters', 'target_kl', 'kl_delta', 'cg_iters',
                    'eval_episodes']
        for key in positive:
            if not getattr(self, key) > 0:
                raise ConfigError(f'{key} must be positive, got {getattr(self, key)}')
        nonnegative = ['policy_minibatch', 'backtrack_iters', 'cg_damping', 'seed']
        for key in nonnegative:
            if getattr(self, key) < 0:
                raise ConfigError(f'{key} must be nonnegative, got {getattr(self, key)}')
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigError(f'gamma must lie in (0, 1], got {self.gamma}')
        if not 0.0 <= self.lam <= 1.0:
            raise ConfigError(f'lam must lie in [0, 1], got {self.lam}')
        if not 0.0 < self.clip_epsilon < 1.0:
            raise ConfigError(f'clip_epsilon must lie in (0, 1), got {self.clip_epsilon}')
        if not 0.0 < self.backtrack_coef < 1.0:
            raise ConfigError('backtrack_coef must lie in (0, 1), '
                              f'got {self.backtrack_coef}')
        if self.temperature is not None and not self.temperature > 0:
            raise ConfigError(f'temperature must be positive, got {self.temperature}')
        if self.target_mean not in ('return', 'td'):
            raise ConfigError("target_mean must be 'return' or 'td', "
                              f'got {self.target_mean!r}')
        if self.env not in env_names:
            raise ConfigError(f'env: unknown environment {self.env!r}; '
                              f'choose from {env_names}')
        if self.mode.weighted and self.n_quantiles < 2:
            raise ConfigError('n_quantiles must be at least 2 for uncertainty weights')
        if self.env_noise is not None and self.env_noise < 0:
            raise ConfigError(f'env_noise must be nonnegative, got {self.env_noise}')
        if self.env_max_steps is not None and self.env_max_steps < 1:
            raise ConfigError(f'env_max_steps must be positive, got {self.env_max_steps}')
        for key in ('policy_hidden', 'value_hidden', 'quantile_hidden'):
            if any(h < 1 for h in getattr(self, key)):
                raise ConfigError(f'{key} entries must be positive')
        return self


def _fields():
    hints = typing.get_type_hints(TrainConfig)
    return {f.name: hints[f.name] for f in dataclasses.fields(TrainConfig)}


def _parse_value(key, kind, text):
    text = text.strip()
    if typing.get_origin(kind) is typing.Union:
        if text.lower() in ('none', ''):
            return None
        kind = next(a for a in typing.get_args(kind) if a is not type(None))
    try:
        if kind is bool:
            low = text.lower()
            if low in ('true', '1', 'yes', 'on'):
                return True
            if low in ('false', '0', 'no', 'off'):
                return False
            raise ValueError(text)
        if typing.get_origin(kind) is tuple:
            return tuple(int(v) for v in text.replace(' ', '').split(',') if v)
        # int, float, str and the enums all construct from their text
        return kind(text)
    except ValueError as e:
        raise ConfigError(f'{key}: cannot parse {text!r}') from e


def _format_value(value):
    if value is None:
        return 'none'
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, tuple):
        return ','.join(str(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def apply_overrides(cfg, overrides):
    """Return a copy of cfg with string or typed overrides applied.

    Parameters
    ----------
    cfg : TrainConfig
    overrides : dict
        key -> value; strings are parsed with the field type.

    Raises
    ------
    ConfigError
        For unknown keys or unparsable values.

    """
    kinds = _fields()
    changes = {}
    for key, value in overrides.items():
        name = _ALIASES.get(key, key)
        if name not in kinds:
            raise ConfigError(f'Unknown config key {key!r}')
        if isinstance(value, str):
            value = _parse_value(key, kinds[name], value)
        elif isinstance(kinds[name], type) and issubclass(kinds[name], enum.Enum):
            value = _parse_value(key, kinds[name], str(getattr(value, 'value', value)))
        changes[name] = value
    return dataclasses.replace(cfg, **changes)


def parse_config(text):
    """Parse key=value text into a validated TrainConfig."""
    entries = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError(f'line {lineno}: expected key = value, got {line!r}')
        key, value = (s.strip() for s in line.split('=', 1))
        if key in entries:
            raise ConfigError(f'line {lineno}: duplicate key {key!r}')
        entries[key] = value
    return apply_overrides(TrainConfig(), entries).validate()


def load_config(path, overrides=None):
    """Read a config file and apply overrides.

    Parameters
    ----------
    path : str, path-like, None
        Config file; None starts from the defaults.
    overrides : dict, None
        Applied after the file (see apply_overrides).

    Returns
    -------
    TrainConfig

    Examples
    --------
    >>> from normrl.config import load_config
    >>> cfg = load_config(None, {'mode': 'baseline_scalar', 'epochs': '3'})
    >>> cfg.mode.value, cfg.epochs
    ('baseline_scalar', 3)

    """
    if path is None:
        cfg = TrainConfig()
    else:
        try:
            with open(path, encoding='utf-8') as f:
                cfg = parse_config(f.read())
        except OSError as e:
            raise ConfigError(f'cannot read config {path}: {e}') from e
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    return cfg.validate()


def dump_config(cfg):
    """Serialize cfg in the key=value format read by parse_config."""
    lines = [f'{name} = {_format_value(getattr(cfg, name))}' for name in _fields()]
    return '\n'.join(lines) + '\n'
