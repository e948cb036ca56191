"""Command-line interface: train, eval, diag and ablate.

Every command writes into a fresh directory.  A training run directory holds::

    config.snapshot   resolved config, loadable with --config
    manifest.json     seed, mode, algorithm, env, version, config digest
    metrics.csv       one row per epoch
    checkpoints/      policy.ckpt and quantile_value.ckpt or scalar_value.ckpt
    diag/             one subdirectory per eval or diag invocation

Exit status is 0 on success, 1 for usage and configuration errors and 2 for
failures while a command runs.
"""

import argparse
import dataclasses
import hashlib
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .algo import train, load_policy, load_value_function
from .algo.train import POLICY_CKPT, QUANTILE_CKPT, SCALAR_CKPT
from .config import AblationMode, Algorithm, ConfigError, dump_config, load_config
from .diag import (TABLE_FRACTIONS, empirical_return_std, estimated_std_curve,
                   normality_gap, normality_summary, quantile_crossing_rate, trend,
                   write_csv, write_json)
from .envs import env_names, make_env
from .rollout import episode_rewards, evaluate
from .util.utils import mean_and_stderr, print_table

log = logging.getLogger(__name__)

DIAGNOSTICS = ('std_curve', 'return_std', 'normality')


class UsageError(Exception):
    """Bad command line."""


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f'{self.prog}: error: {message}\n')


def unique_dir(root, name):
    """Create and return root/name, suffixed -1, -2, ... if it exists."""
    os.makedirs(root, exist_ok=True)
    path = os.path.join(root, name)
    k = 0
    while True:
        try:
            os.makedirs(path)
            return path
        except FileExistsError:
            k += 1
            path = os.path.join(root, f'{name}-{k}')


def _overrides(args):
    overrides = {}
    for item in args.set or []:
        if '=' not in item:
            raise ConfigError(f'--set expects key=value, got {item!r}')
        key, value = item.split('=', 1)
        overrides[key.strip()] = value.strip()
    for key in ('seed', 'mode', 'algorithm', 'env'):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = str(value)
    return overrides


def _manifest(cfg, snapshot):
    return {'normrl_version': __version__,
            'seed': cfg.seed,
            'algorithm': cfg.algorithm.value,
            'mode': cfg.mode.value,
            'env': cfg.env,
            'epochs': cfg.epochs,
            'steps_per_epoch': cfg.steps_per_epoch,
            'config_sha256': hashlib.sha256(snapshot.encode('utf-8')).hexdigest()}


def run_training(cfg, run_dir):
    """Write snapshot and manifest, train, and return the TrainResult."""
    snapshot = dump_config(cfg)
    with open(os.path.join(run_dir, 'config.snapshot'), 'w', encoding='utf-8') as f:
        f.write(snapshot)
    write_json(os.path.join(run_dir, 'manifest.json'), _manifest(cfg, snapshot))
    os.makedirs(os.path.join(run_dir, 'diag'), exist_ok=True)
    return train(cfg, run_dir)


def cmd_train(args):
    """Train one configuration; returns the run directory."""
    cfg = load_config(args.config, _overrides(args))
    name = args.name or f'{cfg.algorithm.value}-{cfg.mode.value}-{cfg.env}-seed{cfg.seed}'
    run_dir = unique_dir(args.out, name)
    log.info('run directory %s', run_dir)
    result = run_training(cfg, run_dir)
    last = result.metrics[-1]
    print(f'{run_dir}: {cfg.epochs} epochs, last mean return {last["ep_ret_mean"]:.4f}')
    return run_dir


def _locate(checkpoint):
    """Run directory (or None) and policy checkpoint path of a CLI argument."""
    if os.path.isdir(checkpoint):
        return checkpoint, os.path.join(checkpoint, 'checkpoints', POLICY_CKPT)
    parent = os.path.dirname(os.path.abspath(checkpoint))
    if os.path.basename(parent) == 'checkpoints':
        return os.path.dirname(parent), checkpoint
    return None, checkpoint


def _env_setup(run_dir, meta, env):
    """Environment name and make_env overrides for a checkpoint."""
    kwargs = {'time_feature': bool(int(meta.get('time_feature', 1)))}
    snapshot = None if run_dir is None else os.path.join(run_dir, 'config.snapshot')
    if snapshot is not None and os.path.exists(snapshot):
        cfg = load_config(snapshot)
        kwargs.update(noise_scale=cfg.env_noise, max_episode_steps=cfg.env_max_steps)
    name = env or meta.get('env')
    if name is None:
        raise UsageError('The checkpoint names no environment; pass --env')
    if name not in env_names:
        raise UsageError(f'Unknown environment {name!r}; choose from {env_names}')
    return name, kwargs


def _load_for_env(checkpoint, env):
    run_dir, path = _locate(checkpoint)
    policy, meta = load_policy(path)
    name, kwargs = _env_setup(run_dir, meta, env)
    spec = make_env(name, **kwargs).spec
    if (policy.obs_dim, policy.act_dim) != (spec.obs_dim, spec.action_dim):
        raise ValueError(f'Checkpoint maps {policy.obs_dim} observations to '
                         f'{policy.act_dim} actions; {name} has {spec.obs_dim} and '
                         f'{spec.action_dim}')
    return run_dir, path, policy, name, kwargs


def _out_dir(args, run_dir, name):
    root = args.out or (os.path.join(run_dir, 'diag') if run_dir else 'diag')
    return unique_dir(root, name)


def cmd_eval(args):
    """Evaluate a policy checkpoint; returns the summary dict."""
    run_dir, path, policy, name, kwargs = _load_for_env(args.checkpoint, args.env)
    summary = evaluate(policy, name, args.episodes, args.seed,
                       deterministic=not args.stochastic, n_workers=args.jobs, **kwargs)
    summary.update(env=name, seed=args.seed, checkpoint=path,
                   deterministic=not args.stochastic)

    out = _out_dir(args, run_dir, f'eval-seed{args.seed}')
    write_json(os.path.join(out, 'eval.json'), summary)
    stderr = summary['stderr_return']
    table = [['env', 'episodes', 'mean return', 'std return', 'std error', 'mean length'],
             [name, summary['episodes'], f'{summary["mean_return"]:.4f}',
              f'{summary["std_return"]:.4f}', 'n/a' if stderr is None else f'{stderr:.4f}',
              f'{summary["mean_length"]:.1f}']]
    print(print_table(table, title='evaluation'))
    return summary


def _value_checkpoint(run_dir, path):
    ckpt_dir = os.path.dirname(path)
    for fname in (QUANTILE_CKPT, SCALAR_CKPT):
        candidate = os.path.join(ckpt_dir, fname)
        if os.path.exists(candidate):
            return candidate
    raise ValueError(f'No value checkpoint next to {path} (run {run_dir})')


def cmd_diag(args):
    """Run one diagnostic on a run; returns the output directory."""
    run_dir, path, policy, name, kwargs = _load_for_env(args.checkpoint, args.env)
    out = _out_dir(args, run_dir, f'{args.which}-seed{args.seed}')

    if args.which == 'return_std':
        fractions = args.fractions or TABLE_FRACTIONS
        table = empirical_return_std(policy, name, args.episodes, fractions, args.seed,
                                     deterministic=args.deterministic, n_workers=args.jobs,
                                     **kwargs)
        write_csv(os.path.join(out, 'return_std.csv'), ('fraction', 'std'), table.tolist())
        summary = trend(table[:, 0], table[:, 1])
        summary.update(episodes=args.episodes, env=name,
                       rows=[{'fraction': f, 'std': s} for f, s in table.tolist()])
        write_json(os.path.join(out, 'return_std.json'), summary)
        rows = [[f'{f:.2f}', f'{s:.4f}'] for f, s in table]
        print(print_table([['fraction', 'std']] + rows, title='return-to-go std'))
        return out

    value_fn, meta = load_value_function(_value_checkpoint(run_dir, path))
    if meta.get('kind') != 'quantile_value':
        raise ValueError(f'{args.which} needs a quantile value function; '
                         f'{path} comes from a scalar-critic run')
    rollouts = episode_rewards(policy, name, args.episodes, args.seed,
                               deterministic=args.deterministic, n_workers=args.jobs,
                               return_states=True, **kwargs)
    trajectories = [states for _, states in rollouts]

    if args.which == 'std_curve':
        t, std = estimated_std_curve(value_fn, trajectories, args.smoothing)
        write_csv(os.path.join(out, 'std_curve.csv'), ('timestep', 'std'), zip(t, std))
        summary = trend(t, std)
        summary.update(episodes=args.episodes, env=name, smoothing=args.smoothing)
        write_json(os.path.join(out, 'std_curve.json'), summary)
        print(f'std curve over {t.size} timesteps: spearman {summary["spearman"]:.4f}')
        return out

    rows = []
    for k, states in enumerate(trajectories):
        q = value_fn.predict_quantiles(states)
        gaps = normality_gap(q)
        for t, (gap, bars) in enumerate(zip(gaps, q)):
            rows.append((k, t, gap, quantile_crossing_rate(bars)))
    write_csv(os.path.join(out, 'normality.csv'),
              ('episode', 'timestep', 'gap', 'crossing_rate'), rows)
    summary = normality_summary(value_fn, [s for states in trajectories for s in states])
    summary.update(episodes=args.episodes, env=name)
    write_json(os.path.join(out, 'normality.json'), summary)
    print(f'normality gap mean {summary["gap_mean"]:.4f}, max {summary["gap_max"]:.4f}, '
          f'crossing rate {summary["crossing_rate"]:.4f}')
    return out


def ablation_job(cfg, run_dir):
    """Train one (mode, seed) cell and return its evaluation score."""
    result = run_training(cfg, run_dir)
    score = evaluate(result.policy, cfg.env, cfg.eval_episodes, cfg.seed,
                     noise_scale=cfg.env_noise, max_episode_steps=cfg.env_max_steps,
                     time_feature=cfg.time_feature)
    return score['mean_return']


def cmd_ablate(args):
    """Train all ablation modes for each seed; returns the rows of the table."""
    base = load_config(args.config, _overrides(args))
    seeds = args.seeds or [base.seed]
    if len(set(seeds)) != len(seeds):
        raise UsageError(f'--seeds lists a seed twice: {seeds}')
    root = unique_dir(args.out, args.name or f'ablate-{base.algorithm.value}-{base.env}')

    jobs = []
    for mode in AblationMode:
        for seed in seeds:
            cfg = dataclasses.replace(base, mode=mode, seed=seed).validate()
            run_dir = os.path.join(root, f'{mode.value}-seed{seed}')
            os.makedirs(run_dir)
            jobs.append((cfg, run_dir))

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            scores = list(pool.map(ablation_job, *zip(*jobs)))
    else:
        scores = [ablation_job(cfg, run_dir) for cfg, run_dir in jobs]

    rows = []
    for i, mode in enumerate(AblationMode):
        mean, stderr = mean_and_stderr(scores[i * len(seeds):(i + 1) * len(seeds)])
        rows.append((base.algorithm.value, base.env, mode.value, len(seeds), mean,
                     '' if stderr is None else stderr))
    write_csv(os.path.join(root, 'ablation.csv'),
              ('algorithm', 'env', 'mode', 'seeds', 'mean_return', 'stderr_return'), rows)
    table = [['mode', 'seeds', 'return']]
    for _, _, mode, n, mean, stderr in rows:
        score = f'{mean:.3f}' if stderr == '' else f'{mean:.3f} +- {stderr:.3f}'
        table.append([mode, n, score])
    print(print_table(table, title=f'ablation: {base.algorithm.value} on {base.env}'))
    return rows


def _add_config_flags(p):
    p.add_argument('--config', default=None, help='key = value config file')
    p.add_argument('--set', action='append', metavar='KEY=VALUE',
                   help='override a config entry (repeatable)')
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--mode', choices=[m.value for m in AblationMode], default=None)
    p.add_argument('--algorithm', choices=[a.value for a in Algorithm], default=None)
    p.add_argument('--env', default=None, help=f'one of {", ".join(env_names)}')
    p.add_argument('--out', default='runs', help='root directory of run directories')
    p.add_argument('--name', default=None, help='run directory name')


def _add_checkpoint_flags(p, episodes):
    p.add_argument('checkpoint', help='run directory or policy checkpoint')
    p.add_argument('--env', default=None, help='environment (default: from checkpoint)')
    p.add_argument('--episodes', type=int, default=episodes)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--jobs', type=int, default=1, help='evaluation threads')
    p.add_argument('--out', default=None,
                   help='output root (default: diag/ of the run directory)')


def build_parser():
    """Argument parser of the normrl command."""
    parser = _Parser(prog='normrl', description=__doc__.split('\n', 1)[0])
    parser.add_argument('--version', action='version', version=f'normrl {__version__}')
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='-v for progress, -vv for debug output')
    sub = parser.add_subparsers(dest='command', parser_class=_Parser)
    sub.required = True

    p = sub.add_parser('train', help='train one configuration')
    _add_config_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser('eval', help='evaluate a policy checkpoint')
    _add_checkpoint_flags(p, episodes=10)
    p.add_argument('--stochastic', action='store_true', help='sample actions')
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser('diag', help='critic and return diagnostics')
    _add_checkpoint_flags(p, episodes=100)
    p.add_argument('which', choices=DIAGNOSTICS)
    p.add_argument('--smoothing', type=float, default=0.9)
    p.add_argument('--fractions', type=float, nargs='+', default=None)
    p.add_argument('--deterministic', action='store_true', help='act with the policy mean')
    p.set_defaults(func=cmd_diag)

    p = sub.add_parser('ablate', help='train every ablation mode for several seeds')
    _add_config_flags(p)
    p.add_argument('--seeds', type=int, nargs='+', default=None)
    p.add_argument('--jobs', type=int, default=1, help='training processes')
    p.set_defaults(func=cmd_ablate)
    return parser


def main(argv=None):
    """Entry point; returns the exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')

    try:
        args.func(args)
    except (ConfigError, UsageError) as e:
        print(f'normrl: error: {e}', file=sys.stderr)
        return 1
    except Exception as e:  # pylint: disable=broad-except
        log.debug('command failed', exc_info=True)
        print(f'normrl: error: {e}', file=sys.stderr)
        return 2
    return 0
