"""Minimal neural networks.

Feed-forward networks with manual backpropagation, the Adam optimizer and a
bit-exact checkpoint format.

Functions
---------
    - Mlp : tanh/relu multilayer perceptron with backward() and jvp()
    - adam_step, AdamState : Adam with bias correction
    - save_checkpoint, load_checkpoint : versioned flat-file checkpoints
"""

from .mlp import Mlp, forward, backward
from .adam import AdamState, adam_step
from .checkpoint import save_checkpoint, load_checkpoint

__all__ = ['Mlp', 'forward', 'backward', 'AdamState', 'adam_step',
           'save_checkpoint', 'load_checkpoint']
