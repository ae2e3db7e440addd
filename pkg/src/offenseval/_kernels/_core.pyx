# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: LSTM recurrence (forward and BPTT) and hinge-loss SGD.

Matrix products go through BLAS via scipy's Cython bindings; gate
nonlinearities and masking are plain C loops. See ``_pycore.py`` for the
reference semantics.
"""

import numpy as np
cimport numpy as cnp
from cython cimport floating
from libc.math cimport exp, expf
from scipy.linalg.cython_blas cimport sgemm, dgemm

cnp.import_array()


cdef inline void _gemm(char transa, char transb, int m, int n, int k,
                       floating alpha, floating* a, int lda,
                       floating* b, int ldb, floating beta,
                       floating* c, int ldc) noexcept nogil:
    # Row-major C = alpha * op(A) @ op(B) + beta * C, via column-major BLAS
    # computing C^T = op(B)^T @ op(A)^T.
    if floating is float:
        sgemm(&transb, &transa, &n, &m, &k, &alpha, b, &ldb, a, &lda, &beta, c, &ldc)
    else:
        dgemm(&transb, &transa, &n, &m, &k, &alpha, b, &ldb, a, &lda, &beta, c, &ldc)


cdef inline floating _sigmoid(floating z) noexcept nogil:
    # Branch-free; exp overflow gives 1 / inf = 0, the correct limit.
    cdef floating one = 1
    if floating is float:
        return one / (one + expf(-z))
    else:
        return one / (one + exp(-z))


cdef inline floating _tanh(floating z) noexcept nogil:
    # tanh z = 2 sigmoid(2z) - 1: one exp instead of a libm tanh call.
    cdef floating two = 2
    return two * _sigmoid(two * z) - 1


def lstm_forward_steps(floating[:, :, ::1] xw, const cnp.int64_t[::1] lengths,
                       floating[:, ::1] U):
    cdef Py_ssize_t B = xw.shape[0], T = xw.shape[1], G = xw.shape[2]
    cdef Py_ssize_t H = G // 4
    dtype = np.float32 if floating is float else np.float64
    acts_arr = np.zeros((B, T, G), dtype=dtype)
    cs_arr = np.zeros((B, T + 1, H), dtype=dtype)
    hs_arr = np.zeros((B, T + 1, H), dtype=dtype)
    cdef floating[:, :, ::1] acts = acts_arr
    cdef floating[:, :, ::1] cs = cs_arr
    cdef floating[:, :, ::1] hs = hs_arr
    cdef Py_ssize_t tmax = 0, b, t, j
    cdef floating i_, f_, o_, g_, c_
    for b in range(B):
        if lengths[b] > tmax:
            tmax = lengths[b]
    if B == 0 or H == 0 or tmax == 0:
        return acts_arr, cs_arr, hs_arr
    z_arr = np.empty((B, G), dtype=dtype)
    cdef floating[:, ::1] z = z_arr
    with nogil:
        for t in range(tmax):
            for b in range(B):
                for j in range(G):
                    z[b, j] = xw[b, t, j]
            _gemm(c'N', c'T', <int>B, <int>G, <int>H, <floating>1.0,
                  &hs[0, t, 0], <int>((T + 1) * H), &U[0, 0], <int>H,
                  <floating>1.0, &z[0, 0], <int>G)
            for b in range(B):
                if lengths[b] > t:
                    for j in range(H):
                        i_ = _sigmoid(z[b, j])
                        f_ = _sigmoid(z[b, H + j])
                        o_ = _sigmoid(z[b, 2 * H + j])
                        g_ = _tanh(z[b, 3 * H + j])
                        c_ = f_ * cs[b, t, j] + i_ * g_
                        acts[b, t, j] = i_
                        acts[b, t, H + j] = f_
                        acts[b, t, 2 * H + j] = o_
                        acts[b, t, 3 * H + j] = g_
                        cs[b, t + 1, j] = c_
                        hs[b, t + 1, j] = o_ * _tanh(c_)
                else:
                    for j in range(H):
                        cs[b, t + 1, j] = cs[b, t, j]
                        hs[b, t + 1, j] = hs[b, t, j]
        for t in range(tmax, T):
            for b in range(B):
                for j in range(H):
                    cs[b, t + 1, j] = cs[b, t, j]
                    hs[b, t + 1, j] = hs[b, t, j]
    return acts_arr, cs_arr, hs_arr


def lstm_backward_steps(floating[:, :, ::1] acts, floating[:, :, ::1] cs,
                        floating[:, :, ::1] hs, const cnp.int64_t[::1] lengths,
                        floating[:, ::1] U, dh_last):
    cdef Py_ssize_t B = acts.shape[0], T = acts.shape[1], G = acts.shape[2]
    cdef Py_ssize_t H = G // 4
    dtype = np.float32 if floating is float else np.float64
    dz_arr = np.zeros((B, T, G), dtype=dtype)
    dU_arr = np.zeros((G, H), dtype=dtype)
    dh_arr = np.array(dh_last, dtype=dtype, copy=True, order="C")
    dc_arr = np.zeros((B, H), dtype=dtype)
    tmp_arr = np.zeros((B, H), dtype=dtype)
    cdef floating[:, :, ::1] dz = dz_arr
    cdef floating[:, ::1] dU = dU_arr
    cdef floating[:, ::1] dh = dh_arr
    cdef floating[:, ::1] dc = dc_arr
    cdef floating[:, ::1] tmp = tmp_arr
    cdef Py_ssize_t tmax = 0, b, t, j
    cdef floating i_, f_, o_, g_, tc, dct
    for b in range(B):
        if lengths[b] > tmax:
            tmax = lengths[b]
    if B == 0 or H == 0 or tmax == 0:
        return dz_arr, dU_arr
    with nogil:
        for t in range(tmax - 1, -1, -1):
            for b in range(B):
                if lengths[b] > t:
                    for j in range(H):
                        i_ = acts[b, t, j]
                        f_ = acts[b, t, H + j]
                        o_ = acts[b, t, 2 * H + j]
                        g_ = acts[b, t, 3 * H + j]
                        tc = _tanh(cs[b, t + 1, j])
                        dct = dc[b, j] + dh[b, j] * o_ * (1 - tc * tc)
                        dz[b, t, j] = dct * g_ * i_ * (1 - i_)
                        dz[b, t, H + j] = dct * cs[b, t, j] * f_ * (1 - f_)
                        dz[b, t, 2 * H + j] = dh[b, j] * tc * o_ * (1 - o_)
                        dz[b, t, 3 * H + j] = dct * i_ * (1 - g_ * g_)
                        dc[b, j] = dct * f_
            # dU += dz_t^T @ h_{t}
            _gemm(c'T', c'N', <int>G, <int>H, <int>B, <floating>1.0,
                  &dz[0, t, 0], <int>(T * G), &hs[0, t, 0], <int>((T + 1) * H),
                  <floating>1.0, &dU[0, 0], <int>H)
            # dh_{t-1} = dz_t @ U for active rows
            _gemm(c'N', c'N', <int>B, <int>H, <int>G, <floating>1.0,
                  &dz[0, t, 0], <int>(T * G), &U[0, 0], <int>H,
                  <floating>0.0, &tmp[0, 0], <int>H)
            for b in range(B):
                if lengths[b] > t:
                    for j in range(H):
                        dh[b, j] = tmp[b, j]
    return dz_arr, dU_arr


def hinge_sgd_epoch(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
                    const double[::1] data, const double[::1] y,
                    const cnp.int64_t[::1] order, double[::1] w,
                    double scale, double b, double lr, double lam):
    cdef double decay = 1.0 - lr * lam
    cdef double hinge_sum = 0.0, dot, margin, step
    cdef Py_ssize_t n = order.shape[0], d = w.shape[0], idx, k, p, lo, hi
    with nogil:
        for idx in range(n):
            k = order[idx]
            lo = indptr[k]
            hi = indptr[k + 1]
            dot = 0.0
            for p in range(lo, hi):
                dot = dot + w[indices[p]] * data[p]
            margin = y[k] * (scale * dot + b)
            scale = scale * decay
            if margin < 1.0:
                hinge_sum = hinge_sum + (1.0 - margin)
                step = lr * y[k] / scale
                for p in range(lo, hi):
                    w[indices[p]] = w[indices[p]] + step * data[p]
                b = b + lr * y[k]
            if scale < 1e-9:
                for p in range(d):
                    w[p] = w[p] * scale
                scale = 1.0
    return scale, b, hinge_sum
