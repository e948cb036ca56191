"""Utility functions."""

from . import linalg
from . import utils

from .linalg import approximate_gradient, relative_error
from .utils import print_table, mean_and_stderr

__all__ = ['linalg', 'utils', 'approximate_gradient', 'relative_error',
           'print_table', 'mean_and_stderr']

__doc__ += """
linalg.py provides finite-difference gradient checks.

utils.py provides table formatting, summary statistics and seed derivation.

"""
