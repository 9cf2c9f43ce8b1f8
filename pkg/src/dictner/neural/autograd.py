"""Minimal reverse-mode automatic differentiation over float64 arrays.

Every operation records its inputs and a closure that routes the upstream
gradient back to them; Tensor.backward walks the tape in reverse
topological order. Only the operations this package needs exist, and all
of them are exercised by finite-difference tests.
"""

import numpy as np

from ..errors import BackwardWithoutForward


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward_fn")

    def __init__(self, data, requires_grad=False):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad = np.zeros_like(self.data) if requires_grad else None
        self._parents = ()
        self._backward_fn = None

    @property
    def shape(self):
        return self.data.shape

    def item(self):
        return float(self.data)

    def zero_grad(self):
        if self.grad is not None:
            self.grad[...] = 0.0

    def backward(self, grad=None):
        """Accumulate d(self)/d(leaf) into every reachable grad slot.

        self must be a scalar produced by recorded operations; repeated
        calls without zeroing accumulate.
        """
        if self.data.size != 1:
            raise ValueError("backward() requires a scalar loss")
        if self._backward_fn is None:
            raise BackwardWithoutForward(
                "backward() on a tensor with no recorded computation"
            )
        topo = []
        visited = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                stack.append((parent, False))
        seed = np.ones_like(self.data) if grad is None else np.asarray(
            grad, dtype=np.float64
        ) * np.ones_like(self.data)
        _accumulate(self, seed)
        for node in reversed(topo):
            if node._backward_fn is not None and node.grad is not None:
                node._backward_fn(node.grad)

    # operator sugar
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return mul(self, -1.0)

    def __sub__(self, other):
        return add(self, mul(other, -1.0))

    def __rsub__(self, other):
        return add(mul(self, -1.0), other)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, key):
        return take(self, key)

    def sum(self):
        return tsum(self)


def as_tensor(value):
    return value if isinstance(value, Tensor) else Tensor(value)


def _accumulate(tensor, grad):
    if tensor.grad is None:
        tensor.grad = np.zeros_like(tensor.data)
    tensor.grad += grad


def _wants_grad(tensor):
    return tensor.requires_grad or tensor._backward_fn is not None


def _node(data, parents, backward_fn):
    out = Tensor(data)
    if any(_wants_grad(p) for p in parents):
        out._parents = parents
        out._backward_fn = backward_fn
    return out


def _unbroadcast(grad, shape):
    """Sum the gradient of a broadcast result back to the operand shape."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(
        i for i, (g, s) in enumerate(zip(grad.shape, shape)) if s == 1 and g != 1
    )
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def add(a, b):
    a, b = as_tensor(a), as_tensor(b)

    def backward(g):
        _accumulate(a, _unbroadcast(g, a.data.shape))
        _accumulate(b, _unbroadcast(g, b.data.shape))

    return _node(a.data + b.data, (a, b), backward)


def mul(a, b):
    a, b = as_tensor(a), as_tensor(b)

    def backward(g):
        _accumulate(a, _unbroadcast(g * b.data, a.data.shape))
        _accumulate(b, _unbroadcast(g * a.data, b.data.shape))

    return _node(a.data * b.data, (a, b), backward)


def matmul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    out = a.data @ b.data

    def backward(g):
        ad, bd = a.data, b.data
        if ad.ndim == 2 and bd.ndim == 2:
            _accumulate(a, g @ bd.T)
            _accumulate(b, ad.T @ g)
        elif ad.ndim == 2 and bd.ndim == 1:
            _accumulate(a, np.outer(g, bd))
            _accumulate(b, ad.T @ g)
        elif ad.ndim == 1 and bd.ndim == 2:
            _accumulate(a, bd @ g)
            _accumulate(b, np.outer(ad, g))
        else:  # vector dot product
            _accumulate(a, g * bd)
            _accumulate(b, g * ad)

    return _node(out, (a, b), backward)


def tsum(a, axis=None):
    a = as_tensor(a)
    out = a.data.sum(axis=axis)

    def backward(g):
        if axis is None:
            _accumulate(a, np.broadcast_to(g, a.data.shape).copy())
        else:
            _accumulate(a, np.broadcast_to(np.expand_dims(g, axis), a.data.shape).copy())

    return _node(out, (a,), backward)


def log(a):
    a = as_tensor(a)

    def backward(g):
        _accumulate(a, g / a.data)

    return _node(np.log(a.data), (a,), backward)


def exp(a):
    a = as_tensor(a)
    out = np.exp(a.data)

    def backward(g):
        _accumulate(a, g * out)

    return _node(out, (a,), backward)


def tanh(a):
    a = as_tensor(a)
    out = np.tanh(a.data)

    def backward(g):
        _accumulate(a, g * (1.0 - out * out))

    return _node(out, (a,), backward)


def stable_sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid(a):
    a = as_tensor(a)
    out = stable_sigmoid(a.data)

    def backward(g):
        _accumulate(a, g * out * (1.0 - out))

    return _node(out, (a,), backward)


def concat(tensors, axis=0):
    tensors = tuple(as_tensor(t) for t in tensors)
    sizes = [t.data.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def backward(g):
        for t, lo, hi in zip(tensors, offsets[:-1], offsets[1:]):
            index = [slice(None)] * g.ndim
            index[axis] = slice(lo, hi)
            _accumulate(t, g[tuple(index)])

    return _node(np.concatenate([t.data for t in tensors], axis=axis), tensors, backward)


def take(a, key):
    """Indexing with slices or an integer array; gradients scatter-add."""
    a = as_tensor(a)
    if isinstance(key, (list, np.ndarray)):
        key = np.asarray(key, dtype=np.intp)

    def backward(g):
        buf = np.zeros_like(a.data)
        np.add.at(buf, key, g)
        _accumulate(a, buf)

    return _node(a.data[key], (a,), backward)


def log_softmax(a):
    """Stable log-softmax of a vector."""
    a = as_tensor(a)
    z = a.data
    m = z.max()
    shifted = z - m
    lse = m + np.log(np.exp(shifted).sum())
    out = z - lse

    def backward(g):
        _accumulate(a, g - np.exp(out) * g.sum())

    return _node(out, (a,), backward)


def logsumexp_data(values, axis=None):
    """Plain-array log-sum-exp that tolerates -inf entries."""
    m = np.max(values, axis=axis, keepdims=True)
    m_safe = np.where(np.isfinite(m), m, 0.0)
    s = np.log(np.sum(np.exp(values - m_safe), axis=axis, keepdims=True)) + m_safe
    s = np.where(np.isneginf(m), -np.inf, s)
    return float(s) if axis is None else np.squeeze(s, axis=axis)
