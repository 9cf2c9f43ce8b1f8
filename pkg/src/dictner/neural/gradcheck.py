"""Central finite-difference gradient checking.

The oracle only re-evaluates forward losses, so it is independent of the
tape-based backward path it validates.
"""

import numpy as np


def numeric_gradient(loss_fn, tensor, eps=1e-4):
    """Central differences of loss_fn() w.r.t. every element of tensor."""
    grad = np.zeros_like(tensor.data)
    flat = tensor.data.reshape(-1)
    gflat = grad.reshape(-1)
    for idx in range(flat.size):
        keep = flat[idx]
        flat[idx] = keep + eps
        up = float(loss_fn())
        flat[idx] = keep - eps
        down = float(loss_fn())
        flat[idx] = keep
        gflat[idx] = (up - down) / (2.0 * eps)
    return grad


def max_relative_error(analytic, numeric):
    """Elementwise |a - n| / max(1, |a|, |n|), reduced with max."""
    denom = np.maximum(1.0, np.maximum(np.abs(analytic), np.abs(numeric)))
    return float(np.max(np.abs(analytic - numeric) / denom))


def check_store(loss_fn, store, eps=1e-4, tol=1e-4):
    """Gradient-check every parameter in a ParamStore.

    loss_fn must run a fresh forward pass and return a scalar Tensor.
    Returns {name: max relative error}; raises AssertionError on the first
    parameter exceeding tol.
    """
    store.zero_grad()
    loss = loss_fn()
    loss.backward()
    errors = {}
    for name, tensor in store.items():
        analytic = tensor.grad.copy()
        numeric = numeric_gradient(lambda: loss_fn().data, tensor, eps=eps)
        err = max_relative_error(analytic, numeric)
        errors[name] = err
        if err > tol:
            raise AssertionError(
                f"gradient check failed for {name}: max rel err {err:.3e}"
            )
    store.zero_grad()
    return errors
