"""Model building blocks: parameter store, embedding lookup, BiLSTM,
linear head, dropout.

The BiLSTM forward/backward runs through the kernel backend as a single
fused tape node, so the per-timestep recurrence never touches Python during
training.
"""

import numpy as np

from . import kernels as K
from .autograd import Tensor, _accumulate, _node, _wants_grad, add, matmul, mul


class ParamStore:
    """Named parameter tensors with gradient slots."""

    def __init__(self, seed=0):
        self.seed = seed
        self._params = {}

    def add(self, name, values):
        if name in self._params:
            raise ValueError(f"duplicate parameter {name!r}")
        t = Tensor(np.array(values, dtype=np.float64), requires_grad=True)
        self._params[name] = t
        return t

    def __getitem__(self, name):
        return self._params[name]

    def __contains__(self, name):
        return name in self._params

    def items(self):
        return self._params.items()

    def names(self):
        return list(self._params)

    def tensors(self):
        return list(self._params.values())

    def zero_grad(self):
        for t in self._params.values():
            t.zero_grad()

    def state_arrays(self):
        """name -> copy of values, in insertion order."""
        return {name: t.data.copy() for name, t in self._params.items()}

    def load_state(self, arrays):
        for name, t in self._params.items():
            src = arrays[name]
            if src.shape != t.data.shape:
                raise ValueError(f"shape mismatch for {name!r}")
            t.data[...] = src


def glorot_uniform(rng, shape, fan_in, fan_out):
    r = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-r, r, size=shape)


def embed(sentence, table):
    """Frozen embedding rows per token; OOV words use the unknown vector."""
    rows = np.empty((len(sentence), table.dimension))
    for i, tok in enumerate(sentence.tokens):
        rows[i] = table.lookup(tok.normalized)
    return Tensor(rows)


def dropout_rows(t, rate, rng):
    """Inverted dropout on the output matrix; identity when rate is 0 or no
    generator is supplied (inference).
    """
    if rate <= 0.0 or rng is None:
        return t
    mask = (rng.random(t.data.shape) >= rate) / (1.0 - rate)
    return mul(t, mask)


def _lstm_direction(x, wx, wh, b, reverse):
    xd = x.data[::-1] if reverse else x.data
    xd = np.ascontiguousarray(xd)
    hs, cs, gates = K.lstm_forward(xd, wx.data, wh.data, b.data)
    out = hs[::-1].copy() if reverse else hs

    def backward(g):
        gd = np.ascontiguousarray(g[::-1] if reverse else g)
        dx, dwx, dwh, db = K.lstm_backward(
            xd, wx.data, wh.data, gates, hs, cs, gd
        )
        if _wants_grad(x):  # embeddings are frozen constants in this package
            _accumulate(x, dx[::-1] if reverse else dx)
        _accumulate(wx, dwx)
        _accumulate(wh, dwh)
        _accumulate(b, db)

    return _node(out, (x, wx, wh, b), backward)


class BiLstm:
    """Word-level bidirectional LSTM; output rows are [forward ∥ backward],
    width 2 * hidden_dim.
    """

    def __init__(self, store, rng, input_dim, hidden_dim, prefix="bilstm"):
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        self.params = {}
        for direction in ("fwd", "bwd"):
            wx = glorot_uniform(rng, (input_dim, 4 * hidden_dim), input_dim, 4 * hidden_dim)
            wh = glorot_uniform(rng, (hidden_dim, 4 * hidden_dim), hidden_dim, 4 * hidden_dim)
            b = np.zeros(4 * hidden_dim)
            b[hidden_dim : 2 * hidden_dim] = 1.0  # forget-gate bias
            self.params[direction] = (
                store.add(f"{prefix}.{direction}.wx", wx),
                store.add(f"{prefix}.{direction}.wh", wh),
                store.add(f"{prefix}.{direction}.b", b),
            )

    def __call__(self, x, dropout=0.0, rng=None):
        from .autograd import concat

        fwd = _lstm_direction(x, *self.params["fwd"], reverse=False)
        bwd = _lstm_direction(x, *self.params["bwd"], reverse=True)
        out = concat([fwd, bwd], axis=1)
        return dropout_rows(out, dropout, rng)


class Linear:
    def __init__(self, store, rng, in_dim, out_dim, prefix="linear", bias=True):
        w = glorot_uniform(rng, (in_dim, out_dim), in_dim, out_dim)
        self.w = store.add(f"{prefix}.w", w)
        self.b = store.add(f"{prefix}.b", np.zeros(out_dim)) if bias else None

    def __call__(self, x):
        out = matmul(x, self.w)
        if self.b is not None:
            out = add(out, self.b)
        return out


def bilstm_forward(x, layer, dropout_rate=0.0, training=False, rng=None):
    """Functional wrapper over BiLstm: dropout applies only when training."""
    return layer(x, dropout=dropout_rate if training else 0.0, rng=rng if training else None)
