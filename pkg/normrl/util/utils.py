"""Utility functions."""

import numpy as np


def print_table(table, title='', delim='|', centering='center', col_padding=2,
                header=True, headerchar='-'):
    """Format a table from a list of rows.

    Parameters
    ----------
    table : list
        list of lists of cells, e.g. [['mode', 'return'], ['mcclt_full', '-12.3']]
    title : string
        Printed centered above the table
    delim : string
        character to delimit columns
    centering : {'left', 'right', 'center'}
        justification of the columns
    col_padding : int
        number of blank spaces added to each column
    header : bool
        Does the first row contain column headers?
    headerchar : string
        character separating the column headers from the rows

    Returns
    -------
    string representing the table, ready to be printed

    Examples
    --------
    >>> from normrl.util.utils import print_table
    >>> table = [['mode', 'return'], ['baseline_scalar', '-41.0']]
    >>> out = print_table(table, title='ablation', centering='left')

    """
    rows = [[str(cell) for cell in row] for row in table]
    ncols = max((len(row) for row in rows), default=0)
    colwidths = [0] * ncols
    for row in rows:
        for j, cell in enumerate(row):
            colwidths[j] = max(colwidths[j], len(cell))
    colwidths = [w + col_padding for w in colwidths]
    ttwidth = sum(colwidths) + len(delim) * max(ncols - 1, 0)

    justify = {'center': str.center, 'right': str.rjust,
               'left': str.ljust}[centering.lower()]

    def fmt(row):
        return delim.join(justify(cell, w) for cell, w in zip(row, colwidths)).rstrip()

    lines = ['']
    if title:
        lines += [t.center(ttwidth) for t in title.split('\n')] + ['']
    if header and rows:
        lines.append(fmt(rows[0]))
        lines.append((headerchar or ' ') * ttwidth)
        rows = rows[1:]
    lines += [fmt(row) for row in rows]
    return '\n'.join(lines) + '\n'


def mean_and_stderr(values):
    """Sample mean and standard error (None for fewer than two values)."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError('Need at least one value')
    mean = float(values.mean())
    if values.size < 2:
        return mean, None
    return mean, float(values.std(ddof=1) / np.sqrt(values.size))


def spawn_seeds(seed, n):
    """n independent integer seeds derived from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(n)
    return [int(c.generate_state(1)[0]) for c in children]
