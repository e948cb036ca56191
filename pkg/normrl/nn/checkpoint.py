"""Versioned flat-file checkpoints for Mlp parameters.

Format
------
The first line is a header of space-separated tokens::

    normrl-checkpoint v1 activation=relu dims=4,64,64,1 extra=0 kind=scalar_value ...

``activation``, ``dims`` and ``extra`` are always present; further
``key=value`` tokens carry metadata (no spaces in values).  The header is
followed by the network parameters, row-major in the order W0, b0, W1, b1,
..., then ``extra`` additional values, one C99 hexadecimal float per line.
Hex floats make the round trip bit-exact.
"""

import numpy as np

from .mlp import Mlp

MAGIC = 'normrl-checkpoint'
VERSION = 'v1'


def save_checkpoint(path, net, extra=None, **meta):
    """Write a network (and optional extra vector) to ``path``.

    Parameters
    ----------
    path : str, path-like
        Output file.
    net : Mlp
        Network to store.
    extra : array_like, None
        Additional parameters stored after the network (e.g. log_std).
    **meta
        Metadata written to the header as key=value tokens.

    """
    extra = np.zeros(0) if extra is None else np.ravel(np.asarray(extra, dtype=float))
    tokens = [MAGIC, VERSION,
              f'activation={net.activation}',
              'dims=' + ','.join(str(d) for d in net.layer_dims),
              f'extra={extra.size}']
    for key, value in meta.items():
        value = str(value)
        if ' ' in value or '=' in key or ' ' in key:
            raise ValueError(f'Metadata {key}={value} may not contain spaces')
        tokens.append(f'{key}={value}')

    values = np.concatenate([net.get_flat(), extra])
    with open(path, 'w', encoding='ascii') as f:
        f.write(' '.join(tokens) + '\n')
        f.writelines(float(v).hex() + '\n' for v in values)


def load_checkpoint(path):
    """Read a checkpoint written by save_checkpoint.

    Returns
    -------
    net : Mlp
    extra : ndarray
    meta : dict
        Header metadata beyond activation, dims and extra (values as strings).

    """
    with open(path, encoding='ascii') as f:
        header = f.readline().split()
        body = [line.strip() for line in f if line.strip()]

    if len(header) < 2 or header[0] != MAGIC:
        raise ValueError(f'{path} is not a normrl checkpoint')
    if header[1] != VERSION:
        raise ValueError(f'Unsupported checkpoint version {header[1]}')

    fields = dict(token.split('=', 1) for token in header[2:])
    try:
        activation = fields.pop('activation')
        dims = tuple(int(d) for d in fields.pop('dims').split(','))
        nextra = int(fields.pop('extra'))
    except KeyError as e:
        raise ValueError(f'Checkpoint header is missing {e}') from e

    net = Mlp(dims, activation=activation)
    if len(body) != net.size + nextra:
        raise ValueError(f'Checkpoint holds {len(body)} values, expected '
                         f'{net.size + nextra}')
    values = np.array([float.fromhex(v) for v in body])
    net.set_flat(values[:net.size])
    return net, values[net.size:], fields
