# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: LSTM recurrence, CRF forward/marginals, Viterbi.

Signature-compatible with the numpy fallback in _reference.py; the test
suite holds the two implementations together.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, tanh, INFINITY

cnp.import_array()

cdef double NEG_INF = -INFINITY


cdef inline double _sigmoid(double x) nogil:
    if x >= 0.0:
        return 1.0 / (1.0 + exp(-x))
    cdef double e = exp(x)
    return e / (1.0 + e)


def lstm_forward(double[:, ::1] x, double[:, ::1] wx, double[:, ::1] wh,
                 double[::1] b):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t h = wh.shape[0]
    hs_arr = np.zeros((n, h))
    cs_arr = np.zeros((n, h))
    gates_arr = np.zeros((n, 4 * h))
    cdef double[:, ::1] hs = hs_arr
    cdef double[:, ::1] cs = cs_arr
    cdef double[:, ::1] gates = gates_arr
    z_arr = np.zeros(4 * h)
    cdef double[::1] z = z_arr
    cdef Py_ssize_t t, j, m
    cdef double acc, i_g, f_g, g_g, o_g, c_val
    with nogil:
        for t in range(n):
            for j in range(4 * h):
                acc = b[j]
                for m in range(d):
                    acc += x[t, m] * wx[m, j]
                if t > 0:
                    for m in range(h):
                        acc += hs[t - 1, m] * wh[m, j]
                z[j] = acc
            for j in range(h):
                i_g = _sigmoid(z[j])
                f_g = _sigmoid(z[h + j])
                g_g = tanh(z[2 * h + j])
                o_g = _sigmoid(z[3 * h + j])
                c_val = i_g * g_g
                if t > 0:
                    c_val += f_g * cs[t - 1, j]
                cs[t, j] = c_val
                hs[t, j] = o_g * tanh(c_val)
                gates[t, j] = i_g
                gates[t, h + j] = f_g
                gates[t, 2 * h + j] = g_g
                gates[t, 3 * h + j] = o_g
    return hs_arr, cs_arr, gates_arr


def lstm_backward(double[:, ::1] x, double[:, ::1] wx, double[:, ::1] wh,
                  double[:, ::1] gates, double[:, ::1] hs, double[:, ::1] cs,
                  double[:, ::1] dh_out):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t h = wh.shape[0]
    dx_arr = np.zeros((n, d))
    dwx_arr = np.zeros((d, 4 * h))
    dwh_arr = np.zeros((h, 4 * h))
    db_arr = np.zeros(4 * h)
    cdef double[:, ::1] dx = dx_arr
    cdef double[:, ::1] dwx = dwx_arr
    cdef double[:, ::1] dwh = dwh_arr
    cdef double[::1] db = db_arr
    dh_next_arr = np.zeros(h)
    dc_next_arr = np.zeros(h)
    dz_arr = np.zeros(4 * h)
    cdef double[::1] dh_next = dh_next_arr
    cdef double[::1] dc_next = dc_next_arr
    cdef double[::1] dz = dz_arr
    cdef Py_ssize_t t, j, m
    cdef double i_g, f_g, g_g, o_g, tc, dh, do, dc, di, df, dg, c_prev, acc
    with nogil:
        for t in range(n - 1, -1, -1):
            for j in range(h):
                i_g = gates[t, j]
                f_g = gates[t, h + j]
                g_g = gates[t, 2 * h + j]
                o_g = gates[t, 3 * h + j]
                tc = tanh(cs[t, j])
                dh = dh_out[t, j] + dh_next[j]
                do = dh * tc
                dc = dc_next[j] + dh * o_g * (1.0 - tc * tc)
                c_prev = cs[t - 1, j] if t > 0 else 0.0
                di = dc * g_g
                df = dc * c_prev
                dg = dc * i_g
                dc_next[j] = dc * f_g
                dz[j] = di * i_g * (1.0 - i_g)
                dz[h + j] = df * f_g * (1.0 - f_g)
                dz[2 * h + j] = dg * (1.0 - g_g * g_g)
                dz[3 * h + j] = do * o_g * (1.0 - o_g)
            for j in range(4 * h):
                db[j] += dz[j]
                for m in range(d):
                    dwx[m, j] += x[t, m] * dz[j]
                if t > 0:
                    for m in range(h):
                        dwh[m, j] += hs[t - 1, m] * dz[j]
            for m in range(d):
                acc = 0.0
                for j in range(4 * h):
                    acc += wx[m, j] * dz[j]
                dx[t, m] = acc
            for m in range(h):
                acc = 0.0
                for j in range(4 * h):
                    acc += wh[m, j] * dz[j]
                dh_next[m] = acc
    return dx_arr, dwx_arr, dwh_arr, db_arr


cdef double _lse_vec(double[::1] v, Py_ssize_t k) nogil:
    cdef double m = NEG_INF
    cdef Py_ssize_t j
    for j in range(k):
        if v[j] > m:
            m = v[j]
    if m == NEG_INF:
        return NEG_INF
    cdef double s = 0.0
    for j in range(k):
        s += exp(v[j] - m)
    return m + log(s)


def crf_forward(double[:, ::1] emissions, double[:, ::1] trans,
                cnp.uint8_t[:, ::1] allow, cnp.uint8_t[:, ::1] trans_allow):
    cdef Py_ssize_t n = emissions.shape[0]
    cdef Py_ssize_t k = emissions.shape[1]
    cdef Py_ssize_t start = k, end = k + 1
    alpha_arr = np.full((n, k), NEG_INF)
    cdef double[:, ::1] alpha = alpha_arr
    col_arr = np.zeros(k)
    cdef double[::1] col = col_arr
    cdef Py_ssize_t t, j, p
    cdef double log_z
    with nogil:
        for j in range(k):
            if allow[0, j] and trans_allow[start, j]:
                alpha[0, j] = trans[start, j] + emissions[0, j]
        for t in range(1, n):
            for j in range(k):
                if not allow[t, j]:
                    continue
                for p in range(k):
                    if trans_allow[p, j]:
                        col[p] = alpha[t - 1, p] + trans[p, j]
                    else:
                        col[p] = NEG_INF
                alpha[t, j] = _lse_vec(col, k) + emissions[t, j]
        for j in range(k):
            if trans_allow[j, end]:
                col[j] = alpha[n - 1, j] + trans[j, end]
            else:
                col[j] = NEG_INF
        log_z = _lse_vec(col, k)
    return float(log_z), alpha_arr


def crf_backward_grads(double[:, ::1] emissions, double[:, ::1] trans,
                       cnp.uint8_t[:, ::1] allow,
                       cnp.uint8_t[:, ::1] trans_allow,
                       double[:, ::1] alpha, double log_z):
    cdef Py_ssize_t n = emissions.shape[0]
    cdef Py_ssize_t k = emissions.shape[1]
    cdef Py_ssize_t start = k, end = k + 1
    beta_arr = np.full((n, k), NEG_INF)
    d_emis_arr = np.zeros((n, k))
    d_trans_arr = np.zeros((k + 2, k + 2))
    cdef double[:, ::1] beta = beta_arr
    cdef double[:, ::1] d_emis = d_emis_arr
    cdef double[:, ::1] d_trans = d_trans_arr
    col_arr = np.zeros(k)
    cdef double[::1] col = col_arr
    cdef Py_ssize_t t, j, p
    cdef double v
    with nogil:
        for j in range(k):
            if allow[n - 1, j] and trans_allow[j, end]:
                beta[n - 1, j] = trans[j, end]
        for t in range(n - 2, -1, -1):
            for j in range(k):
                if not allow[t, j]:
                    continue
                for p in range(k):
                    if trans_allow[j, p]:
                        col[p] = trans[j, p] + emissions[t + 1, p] + beta[t + 1, p]
                    else:
                        col[p] = NEG_INF
                beta[t, j] = _lse_vec(col, k)
        for t in range(n):
            for j in range(k):
                v = alpha[t, j] + beta[t, j] - log_z
                d_emis[t, j] = exp(v) if v > -745.0 else 0.0
        for t in range(1, n):
            for p in range(k):
                if alpha[t - 1, p] == NEG_INF:
                    continue
                for j in range(k):
                    if not trans_allow[p, j]:
                        continue
                    v = alpha[t - 1, p] + trans[p, j] + emissions[t, j] \
                        + beta[t, j] - log_z
                    if v > -745.0:
                        d_trans[p, j] += exp(v)
        for j in range(k):
            v = alpha[0, j] + beta[0, j] - log_z
            d_trans[start, j] = exp(v) if v > -745.0 else 0.0
            if trans_allow[j, end]:
                v = alpha[n - 1, j] + trans[j, end] - log_z
                d_trans[j, end] = exp(v) if v > -745.0 else 0.0
    return d_emis_arr, d_trans_arr


def viterbi(double[:, ::1] emissions, double[:, ::1] trans,
            cnp.uint8_t[:, ::1] trans_allow):
    cdef Py_ssize_t n = emissions.shape[0]
    cdef Py_ssize_t k = emissions.shape[1]
    cdef Py_ssize_t start = k, end = k + 1
    delta_arr = np.full(k, NEG_INF)
    next_arr = np.zeros(k)
    back_arr = np.zeros((n, k), dtype=np.intp)
    path_arr = np.zeros(n, dtype=np.intp)
    cdef double[::1] delta = delta_arr
    cdef double[::1] nxt = next_arr
    cdef Py_ssize_t[:, ::1] back = back_arr
    cdef Py_ssize_t[::1] path = path_arr
    cdef Py_ssize_t t, j, p, argbest, final_best
    cdef double best, cand, score
    with nogil:
        for j in range(k):
            if trans_allow[start, j]:
                delta[j] = trans[start, j] + emissions[0, j]
        for t in range(1, n):
            for j in range(k):
                best = NEG_INF
                argbest = 0
                for p in range(k):
                    if not trans_allow[p, j]:
                        continue
                    cand = delta[p] + trans[p, j]
                    if cand > best:
                        best = cand
                        argbest = p
                nxt[j] = best + emissions[t, j]
                back[t, j] = argbest
            for j in range(k):
                delta[j] = nxt[j]
        best = NEG_INF
        final_best = 0
        for j in range(k):
            if not trans_allow[j, end]:
                continue
            cand = delta[j] + trans[j, end]
            if cand > best:
                best = cand
                final_best = j
        score = best
        path[n - 1] = final_best
        for t in range(n - 1, 0, -1):
            path[t - 1] = back[t, path[t]]
    return float(score), path_arr
