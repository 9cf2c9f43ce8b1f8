"""Pure-numpy kernels: the fallback twin of the compiled extension.

Function signatures and numerics mirror dictner.neural.kernels._core; the
test suite asserts agreement between the two to 1e-12. Banned lattice
entries are handled structurally (alpha/beta pinned to -inf, zero
gradient) rather than with additive penalty constants.
"""

import numpy as np

NEG_INF = -np.inf


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def lstm_forward(x, wx, wh, b):
    """Single-direction LSTM over x (n, d); gate order i, f, g, o.

    Returns hidden states (n, h), cell states (n, h) and post-activation
    gates (n, 4h) for the backward pass.
    """
    n = x.shape[0]
    h = wh.shape[0]
    hs = np.zeros((n, h))
    cs = np.zeros((n, h))
    gates = np.zeros((n, 4 * h))
    h_prev = np.zeros(h)
    c_prev = np.zeros(h)
    for t in range(n):
        z = x[t] @ wx + h_prev @ wh + b
        i = _sigmoid(z[:h])
        f = _sigmoid(z[h : 2 * h])
        g = np.tanh(z[2 * h : 3 * h])
        o = _sigmoid(z[3 * h :])
        c = f * c_prev + i * g
        hs[t] = o * np.tanh(c)
        cs[t] = c
        gates[t, :h] = i
        gates[t, h : 2 * h] = f
        gates[t, 2 * h : 3 * h] = g
        gates[t, 3 * h :] = o
        h_prev = hs[t]
        c_prev = c
    return hs, cs, gates


def lstm_backward(x, wx, wh, gates, hs, cs, dh_out):
    """Backprop through time for lstm_forward; dh_out is (n, h)."""
    n, d = x.shape
    h = wh.shape[0]
    dx = np.zeros_like(x)
    dwx = np.zeros_like(wx)
    dwh = np.zeros_like(wh)
    db = np.zeros(4 * h)
    dh_next = np.zeros(h)
    dc_next = np.zeros(h)
    for t in range(n - 1, -1, -1):
        i = gates[t, :h]
        f = gates[t, h : 2 * h]
        g = gates[t, 2 * h : 3 * h]
        o = gates[t, 3 * h :]
        tc = np.tanh(cs[t])
        dh = dh_out[t] + dh_next
        do = dh * tc
        dc = dc_next + dh * o * (1.0 - tc * tc)
        c_prev = cs[t - 1] if t > 0 else np.zeros(h)
        h_prev = hs[t - 1] if t > 0 else np.zeros(h)
        di = dc * g
        df = dc * c_prev
        dg = dc * i
        dc_next = dc * f
        dz = np.concatenate(
            [
                di * i * (1.0 - i),
                df * f * (1.0 - f),
                dg * (1.0 - g * g),
                do * o * (1.0 - o),
            ]
        )
        dwx += np.outer(x[t], dz)
        dwh += np.outer(h_prev, dz)
        db += dz
        dx[t] = wx @ dz
        dh_next = wh @ dz
    return dx, dwx, dwh, db


def _lse(col):
    m = col.max()
    if m == NEG_INF:
        return NEG_INF
    return m + np.log(np.exp(col - m).sum())


def _lse_rows(mat):
    """Log-sum-exp over axis 0 of (k, k), tolerant of -inf columns."""
    m = mat.max(axis=0)
    safe = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        out = safe + np.log(np.exp(mat - safe).sum(axis=0))
    return np.where(np.isfinite(m), out, NEG_INF)


def crf_forward(emissions, trans, allow, trans_allow):
    """Forward algorithm in log space.

    emissions: (n, k); trans: (k+2, k+2) with start row k and end column
    k+1; allow: (n, k) uint8 label mask; trans_allow: (k+2, k+2) uint8.
    Returns (logZ, alpha) where alpha[i, j] is the log-sum over partial
    paths ending in label j at position i (banned entries -inf).
    """
    n, k = emissions.shape
    start, end = k, k + 1
    tr = np.where(trans_allow[:k, :k].astype(bool), trans[:k, :k], NEG_INF)
    alpha = np.full((n, k), NEG_INF)
    first = np.where(trans_allow[start, :k].astype(bool), trans[start, :k], NEG_INF)
    alpha[0] = np.where(allow[0].astype(bool), first + emissions[0], NEG_INF)
    for t in range(1, n):
        scores = alpha[t - 1][:, None] + tr
        step = _lse_rows(scores) + emissions[t]
        alpha[t] = np.where(allow[t].astype(bool), step, NEG_INF)
    last = np.where(trans_allow[:k, end].astype(bool), trans[:k, end], NEG_INF)
    log_z = _lse(alpha[n - 1] + last)
    return log_z, alpha


def crf_backward_grads(emissions, trans, allow, trans_allow, alpha, log_z):
    """Gradient of logZ: label marginals for emissions, expected transition
    counts for the transition matrix (start row / end column included).
    """
    n, k = emissions.shape
    start, end = k, k + 1
    tr = np.where(trans_allow[:k, :k].astype(bool), trans[:k, :k], NEG_INF)
    last = np.where(trans_allow[:k, end].astype(bool), trans[:k, end], NEG_INF)
    beta = np.full((n, k), NEG_INF)
    beta[n - 1] = np.where(allow[n - 1].astype(bool), last, NEG_INF)
    for t in range(n - 2, -1, -1):
        nxt = tr + (emissions[t + 1] + beta[t + 1])[None, :]
        step = _lse_rows(nxt.T)
        beta[t] = np.where(allow[t].astype(bool), step, NEG_INF)
    # exp(-inf) is exactly 0, so banned entries drop out of the gradient
    d_emissions = np.exp(alpha + beta - log_z)
    d_trans = np.zeros_like(trans)
    for t in range(1, n):
        joint = alpha[t - 1][:, None] + tr + (emissions[t] + beta[t])[None, :]
        d_trans[:k, :k] += np.exp(joint - log_z)
    d_trans[start, :k] = np.exp(alpha[0] + beta[0] - log_z)
    d_trans[:k, end] = np.exp(alpha[n - 1] + last - log_z)
    return d_emissions, d_trans


def viterbi(emissions, trans, trans_allow):
    """Highest-scoring label path including start/end transitions.

    Ties resolve to the smaller label index at the latest differing
    position (argmax keeps the first maximum at every step and the
    backtrace is greedy from the end).
    """
    n, k = emissions.shape
    start, end = k, k + 1
    tr = np.where(trans_allow[:k, :k].astype(bool), trans[:k, :k], NEG_INF)
    first = np.where(trans_allow[start, :k].astype(bool), trans[start, :k], NEG_INF)
    delta = first + emissions[0]
    back = np.zeros((n, k), dtype=np.intp)
    for t in range(1, n):
        scores = delta[:, None] + tr
        back[t] = scores.argmax(axis=0)
        delta = scores[back[t], np.arange(k)] + emissions[t]
    last = np.where(trans_allow[:k, end].astype(bool), trans[:k, end], NEG_INF)
    final = delta + last
    best = int(final.argmax())
    score = float(final[best])
    path = np.zeros(n, dtype=np.intp)
    path[n - 1] = best
    for t in range(n - 1, 0, -1):
        path[t - 1] = back[t, path[t]]
    return score, path
