# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: fused activations and histogram accumulation."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, tanh

cnp.import_array()

TANH, RELU, LEAKY_RELU, SIGMOID = 0, 1, 2, 3


def act_forward(int kind, object x, double slope=0.01):
    orig_shape = np.shape(x)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xf = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(xf)
    cdef Py_ssize_t i, n = xf.shape[0]
    cdef double v, e
    if kind == 0:
        for i in range(n):
            out[i] = tanh(xf[i])
    elif kind == 1:
        for i in range(n):
            v = xf[i]
            out[i] = v if v > 0.0 else 0.0
    elif kind == 2:
        for i in range(n):
            v = xf[i]
            out[i] = v if v >= 0.0 else slope * v
    elif kind == 3:
        for i in range(n):
            v = xf[i]
            if v >= 0.0:
                out[i] = 1.0 / (1.0 + exp(-v))
            else:
                e = exp(v)
                out[i] = e / (1.0 + e)
    else:
        raise ValueError(f"unknown activation kind {kind}")
    return np.asarray(out).reshape(orig_shape)


def act_backward(int kind, object x, object y, object gy, double slope=0.01):
    orig_shape = np.shape(x)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xf = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] yf = np.ascontiguousarray(y, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] gf = np.ascontiguousarray(gy, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(xf)
    cdef Py_ssize_t i, n = xf.shape[0]
    cdef double t
    if kind == 0:
        for i in range(n):
            t = yf[i]
            out[i] = gf[i] * (1.0 - t * t)
    elif kind == 1:
        for i in range(n):
            out[i] = gf[i] if xf[i] > 0.0 else 0.0
    elif kind == 2:
        for i in range(n):
            out[i] = gf[i] if xf[i] >= 0.0 else gf[i] * slope
    elif kind == 3:
        for i in range(n):
            t = yf[i]
            out[i] = gf[i] * t * (1.0 - t)
    else:
        raise ValueError(f"unknown activation kind {kind}")
    return np.asarray(out).reshape(orig_shape)


def hist_sums(object codes, object grad, object idx, int n_bins):
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] c = np.ascontiguousarray(codes, dtype=np.uint8)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] g = np.ascontiguousarray(grad, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ix = np.ascontiguousarray(idx, dtype=np.int64)
    cdef Py_ssize_t n_feat = c.shape[1], k = ix.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] sums = np.zeros((n_feat, n_bins))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] counts = np.zeros((n_feat, n_bins))
    cdef Py_ssize_t i, j, row
    cdef double gv
    for i in range(k):
        row = ix[i]
        gv = g[row]
        for j in range(n_feat):
            sums[j, c[row, j]] += gv
            counts[j, c[row, j]] += 1.0
    return np.asarray(sums), np.asarray(counts)
