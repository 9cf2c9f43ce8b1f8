"""Kernel backend selection.

The compiled extension (_core) is preferred; the numpy reference twin
(_reference) is used when the extension is unavailable or when the
environment variable DICTNER_PURE=1 forces it. Both expose identical
signatures; this shim normalizes dtypes/contiguity so callers need not
care which backend runs.
"""

import os

import numpy as np

from . import _reference

if os.environ.get("DICTNER_PURE", "") == "1":
    _impl = _reference
    HAVE_COMPILED = False
else:
    try:
        from . import _core as _impl

        HAVE_COMPILED = True
    except ImportError:
        _impl = _reference
        HAVE_COMPILED = False


def backend_name():
    return "compiled" if _impl is not _reference else "reference"


def _farr(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def _mask(m, shape):
    if m is None:
        return np.ones(shape, dtype=np.uint8)
    return np.ascontiguousarray(np.asarray(m).astype(np.uint8))


def lstm_forward(x, wx, wh, b, impl=None):
    impl = impl or _impl
    return impl.lstm_forward(_farr(x), _farr(wx), _farr(wh), _farr(b))


def lstm_backward(x, wx, wh, gates, hs, cs, dh_out, impl=None):
    impl = impl or _impl
    return impl.lstm_backward(
        _farr(x), _farr(wx), _farr(wh), _farr(gates), _farr(hs), _farr(cs), _farr(dh_out)
    )


def crf_forward(emissions, trans, allow=None, trans_allow=None, impl=None):
    impl = impl or _impl
    emissions = _farr(emissions)
    trans = _farr(trans)
    n, k = emissions.shape
    return impl.crf_forward(
        emissions, trans, _mask(allow, (n, k)), _mask(trans_allow, (k + 2, k + 2))
    )


def crf_backward_grads(emissions, trans, allow, trans_allow, alpha, log_z, impl=None):
    impl = impl or _impl
    emissions = _farr(emissions)
    trans = _farr(trans)
    n, k = emissions.shape
    return impl.crf_backward_grads(
        emissions,
        trans,
        _mask(allow, (n, k)),
        _mask(trans_allow, (k + 2, k + 2)),
        _farr(alpha),
        float(log_z),
    )


def viterbi(emissions, trans, trans_allow=None, impl=None):
    impl = impl or _impl
    emissions = _farr(emissions)
    trans = _farr(trans)
    k = emissions.shape[1]
    return impl.viterbi(emissions, trans, _mask(trans_allow, (k + 2, k + 2)))
