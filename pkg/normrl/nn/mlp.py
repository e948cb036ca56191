"""Feed-forward network with hand-written backpropagation."""

import numpy as np
from scipy.linalg import qr


def _tanh(z):
    return np.tanh(z)


def _dtanh(z, a):
    return 1.0 - a * a


def _relu(z):
    return np.maximum(z, 0.0)


def _drelu(z, a):
    return (z > 0.0).astype(z.dtype)


ACTIVATIONS = {'tanh': (_tanh, _dtanh),
               'relu': (_relu, _drelu)}


def orthogonal(shape, gain, rng):
    """Orthogonal matrix of the given shape scaled by gain.

    Parameters
    ----------
    shape : tuple
        (rows, cols) of the weight matrix.
    gain : float
        Scale applied to the orthogonal factor.
    rng : numpy.random.Generator
        Source of the Gaussian draw.

    Returns
    -------
    ndarray
        Matrix with orthonormal rows or columns, times gain.

    """
    rows, cols = shape
    flat = rng.standard_normal((max(rows, cols), min(rows, cols)))
    q, r = qr(flat, mode='economic')
    # sign correction makes the distribution uniform (Haar)
    q *= np.sign(np.diag(r))
    if rows < cols:
        q = q.T
    return np.ascontiguousarray(gain * q)


class Mlp:
    """Multilayer perceptron with a linear output layer.

    Weights are stored as (fan_in, fan_out) matrices so that a batch of
    inputs, shape (B, d_in), is propagated with ``x @ W + b``.

    Attributes
    ----------
    layer_dims : tuple of int
        Input dimension, hidden widths, output dimension.
    activation : {'tanh', 'relu'}
        Nonlinearity of the hidden layers.
    weights : list of ndarray
        Weight matrices, one per layer.
    biases : list of ndarray
        Bias vectors, one per layer.

    Methods
    -------
    forward(x)
        Network output for a vector or a batch of rows.
    backward(x, output_grad)
        Parameter gradients and input gradient of <output_grad, forward(x)>.
    jvp(x, tangents)
        Directional derivative of the output along a parameter direction.

    Examples
    --------
    >>> import numpy as np
    >>> from normrl.nn import Mlp
    >>> net = Mlp((3, 8, 2), activation='tanh', rng=np.random.default_rng(0))
    >>> net.forward(np.ones(3)).shape
    (2,)

    """

    def __init__(self, layer_dims, activation='tanh', rng=None, output_gain=1.0):
        """Construct and initialise the network.

        Parameters
        ----------
        layer_dims : sequence of int
            At least two positive entries.
        activation : str
            'tanh' or 'relu'.
        rng : numpy.random.Generator, None
            Initialisation stream.  If None, all parameters are zero.
        output_gain : float
            Gain of the orthogonal output layer.

        """
        layer_dims = tuple(int(d) for d in layer_dims)
        if len(layer_dims) < 2:
            raise ValueError('layer_dims needs an input and an output dimension')
        if min(layer_dims) < 1:
            raise ValueError('layer dimensions must be positive')
        if activation not in ACTIVATIONS:
            raise ValueError(f'Unknown activation {activation}')

        self.layer_dims = layer_dims
        self.activation = activation
        self._act, self._dact = ACTIVATIONS[activation]

        nlayers = len(layer_dims) - 1
        self.weights = []
        self.biases = []
        for k, (fan_in, fan_out) in enumerate(zip(layer_dims[:-1], layer_dims[1:])):
            if rng is None:
                W = np.zeros((fan_in, fan_out))
            else:
                gain = output_gain if k == nlayers - 1 else np.sqrt(2.0)
                W = orthogonal((fan_in, fan_out), gain, rng)
            self.weights.append(W)
            self.biases.append(np.zeros(fan_out))

    def __repr__(self):
        """Describe the architecture."""
        dims = 'x'.join(str(d) for d in self.layer_dims)
        return f'Mlp({dims}, {self.activation})'

    @property
    def params(self):
        """Parameter arrays in the order W0, b0, W1, b1, ..."""
        out = []
        for W, b in zip(self.weights, self.biases):
            out += [W, b]
        return out

    @property
    def size(self):
        """Total number of scalar parameters."""
        return sum(p.size for p in self.params)

    @property
    def in_dim(self):
        """Input dimension."""
        return self.layer_dims[0]

    @property
    def out_dim(self):
        """Output dimension."""
        return self.layer_dims[-1]

    def copy(self):
        """Deep copy with independent parameter arrays."""
        other = Mlp.__new__(Mlp)
        other.layer_dims = self.layer_dims
        other.activation = self.activation
        other._act, other._dact = self._act, self._dact
        other.weights = [W.copy() for W in self.weights]
        other.biases = [b.copy() for b in self.biases]
        return other

    def get_flat(self):
        """Concatenate all parameters into one vector."""
        return np.concatenate([p.ravel() for p in self.params])

    def set_flat(self, flat):
        """Overwrite the parameters from a flat vector (in place)."""
        flat = np.asarray(flat, dtype=float)
        if flat.shape != (self.size,):
            raise ValueError(f'Expected {self.size} parameters, got {flat.shape}')
        offset = 0
        for p in self.params:
            p[...] = flat[offset:offset + p.size].reshape(p.shape)
            offset += p.size

    def _check_input(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim not in (1, 2) or x.shape[-1] != self.in_dim:
            raise ValueError(f'Input of shape {x.shape} does not match '
                             f'input dimension {self.in_dim}')
        return x

    def _propagate(self, x):
        """Forward pass keeping pre-activations z and activations a."""
        zs, acts = [], [x]
        a = x
        nlayers = len(self.weights)
        for k, (W, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ W + b
            a = z if k == nlayers - 1 else self._act(z)
            zs.append(z)
            acts.append(a)
        return zs, acts

    def forward(self, x):
        """Evaluate the network.

        Parameters
        ----------
        x : array_like
            Shape (d_in,) or (B, d_in).

        Returns
        -------
        ndarray
            Shape (d_out,) or (B, d_out).

        """
        x = self._check_input(x)
        _, acts = self._propagate(x)
        return acts[-1]

    def backward(self, x, output_grad):
        """Backpropagate an output gradient.

        Parameters
        ----------
        x : array_like
            Shape (d_in,) or (B, d_in).
        output_grad : array_like
            dL/d(output), same leading shape as x, last dimension d_out.

        Returns
        -------
        grads : list of ndarray
            dL/dparams in the order of ``params`` (summed over the batch).
        input_grad : ndarray
            dL/dx, shape of x.

        """
        x = self._check_input(x)
        g = np.asarray(output_grad, dtype=float)
        if g.shape[:-1] != x.shape[:-1] or g.shape[-1] != self.out_dim:
            raise ValueError(f'Output gradient of shape {g.shape} does not match '
                             f'output dimension {self.out_dim}')

        single = x.ndim == 1
        if single:
            x = x[np.newaxis, :]
            g = g[np.newaxis, :]

        zs, acts = self._propagate(x)
        nlayers = len(self.weights)
        grads = [None] * (2 * nlayers)
        dz = g
        for k in range(nlayers - 1, -1, -1):
            grads[2*k] = acts[k].T @ dz
            grads[2*k + 1] = dz.sum(axis=0)
            da = dz @ self.weights[k].T
            if k > 0:
                dz = da * self._dact(zs[k-1], acts[k])

        input_grad = da[0] if single else da
        return grads, input_grad

    def jvp(self, x, tangents):
        """Forward-mode derivative of the output along a parameter direction.

        Parameters
        ----------
        x : array_like
            Shape (d_in,) or (B, d_in).
        tangents : list of ndarray
            Direction, shaped like ``params``.

        Returns
        -------
        ndarray
            d forward(x) along tangents, shape of forward(x).

        """
        x = self._check_input(x)
        zs, acts = self._propagate(x)
        nlayers = len(self.weights)
        da = np.zeros_like(x)
        for k in range(nlayers):
            dW, db = tangents[2*k], tangents[2*k + 1]
            dz = da @ self.weights[k] + acts[k] @ dW + db
            da = dz if k == nlayers - 1 else self._dact(zs[k], acts[k+1]) * dz
        return da


def forward(net, x):
    """Evaluate ``net`` at ``x`` (see Mlp.forward)."""
    return net.forward(x)


def backward(net, x, output_grad):
    """Backpropagate through ``net`` (see Mlp.backward)."""
    return net.backward(x, output_grad)
