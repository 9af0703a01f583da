# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the dense forward/backward passes.

Dense matrix products go through BLAS dgemm (the same engine numpy uses)
but with the bias add and ReLU fused into the same pass, which numpy
cannot do without materializing temporaries. Count-vector inputs are
mostly zeros, so the input-layer product switches to a zero-skipping loop
when a batch is sparse enough for that to win.

All inputs must be float64 and C-contiguous.
"""

import numpy as np

from libc.math cimport exp
from scipy.linalg.cython_blas cimport dgemm

NAME = "cython"

# below this fill ratio the zero-skipping loop beats dgemm on the shapes
# this package trains (32-row batches, 60-1000 columns)
DEF SPARSE_CUTOFF = 0.15


cdef void _gemm_rowmajor(double[:, ::1] a, double[:, ::1] b, double[:, ::1] out) nogil:
    # out[M,N] = a[M,K] @ b[K,N], all row-major: compute the column-major
    # transpose identity out^T = b^T @ a^T via dgemm on the raw buffers
    cdef int m = <int> out.shape[1]   # N
    cdef int n = <int> out.shape[0]   # M
    cdef int k = <int> a.shape[1]     # K
    cdef double alpha = 1.0, beta = 0.0
    cdef char trans = b'N'
    dgemm(&trans, &trans, &m, &n, &k, &alpha,
          &b[0, 0], &m, &a[0, 0], &k, &beta, &out[0, 0], &m)


def affine(double[:, ::1] x, double[:, ::1] w, double[::1] b):
    cdef Py_ssize_t n_rows = x.shape[0], n_in = x.shape[1], n_out = w.shape[1]
    out_np = np.empty((n_rows, n_out), dtype=np.float64)
    cdef double[:, ::1] out = out_np
    cdef Py_ssize_t i, j, k, nonzero = 0
    cdef double xv

    for i in range(n_rows):
        for k in range(n_in):
            if x[i, k] != 0.0:
                nonzero += 1

    if nonzero < <Py_ssize_t> (SPARSE_CUTOFF * n_rows * n_in):
        for i in range(n_rows):
            for j in range(n_out):
                out[i, j] = b[j]
            for k in range(n_in):
                xv = x[i, k]
                if xv != 0.0:
                    for j in range(n_out):
                        out[i, j] += xv * w[k, j]
    else:
        _gemm_rowmajor(x, w, out)
        for i in range(n_rows):
            for j in range(n_out):
                out[i, j] += b[j]
    return out_np


def relu(double[:, ::1] z):
    cdef Py_ssize_t n_rows = z.shape[0], n_cols = z.shape[1]
    out_np = np.empty((n_rows, n_cols), dtype=np.float64)
    cdef double[:, ::1] out = out_np
    cdef Py_ssize_t i, j
    for i in range(n_rows):
        for j in range(n_cols):
            out[i, j] = z[i, j] if z[i, j] > 0.0 else 0.0
    return out_np


def softmax_rows(double[:, ::1] z):
    cdef Py_ssize_t n_rows = z.shape[0], n_cols = z.shape[1]
    out_np = np.empty((n_rows, n_cols), dtype=np.float64)
    cdef double[:, ::1] out = out_np
    cdef Py_ssize_t i, j
    cdef double m, total
    for i in range(n_rows):
        m = z[i, 0]
        for j in range(1, n_cols):
            if z[i, j] > m:
                m = z[i, j]
        total = 0.0
        for j in range(n_cols):
            out[i, j] = exp(z[i, j] - m)
            total += out[i, j]
        for j in range(n_cols):
            out[i, j] /= total
    return out_np


def matmul_at_b(double[:, ::1] a, double[:, ::1] b):
    # a.T @ b; a is an activation batch, often sparse at the input layer
    cdef Py_ssize_t n_rows = a.shape[0], n_left = a.shape[1], n_right = b.shape[1]
    out_np = np.zeros((n_left, n_right), dtype=np.float64)
    cdef double[:, ::1] out = out_np
    cdef Py_ssize_t i, j, k, nonzero = 0
    cdef double av
    cdef int m, n, kk
    cdef double alpha = 1.0, beta = 0.0
    cdef char trans_n = b'N', trans_t = b'T'

    for i in range(n_rows):
        for k in range(n_left):
            if a[i, k] != 0.0:
                nonzero += 1

    if nonzero < <Py_ssize_t> (SPARSE_CUTOFF * n_rows * n_left):
        for i in range(n_rows):
            for k in range(n_left):
                av = a[i, k]
                if av != 0.0:
                    for j in range(n_right):
                        out[k, j] += av * b[i, j]
    else:
        # out^T = b^T @ a: dgemm with A=b ('N'), B=a ('T') on raw buffers
        m = <int> n_right
        n = <int> n_left
        kk = <int> n_rows
        with nogil:
            dgemm(&trans_n, &trans_t, &m, &n, &kk, &alpha,
                  &b[0, 0], &m, &a[0, 0], &n, &beta, &out[0, 0], &m)
    return out_np


def matmul_a_bt(double[:, ::1] a, double[:, ::1] b):
    # a @ b.T
    cdef Py_ssize_t n_rows = a.shape[0], n_mid = a.shape[1], n_out = b.shape[0]
    out_np = np.empty((n_rows, n_out), dtype=np.float64)
    cdef double[:, ::1] out = out_np
    cdef int m = <int> n_out, n = <int> n_rows, k = <int> n_mid
    cdef double alpha = 1.0, beta = 0.0
    cdef char trans_t = b'T', trans_n = b'N'
    with nogil:
        # out^T = b @ a^T: dgemm with A=b ('T'), B=a ('N') on raw buffers
        dgemm(&trans_t, &trans_n, &m, &n, &k, &alpha,
              &b[0, 0], &k, &a[0, 0], &k, &beta, &out[0, 0], &m)
    return out_np


def colsum(double[:, ::1] a):
    cdef Py_ssize_t n_rows = a.shape[0], n_cols = a.shape[1]
    out_np = np.zeros(n_cols, dtype=np.float64)
    cdef double[::1] out = out_np
    cdef Py_ssize_t i, j
    for i in range(n_rows):
        for j in range(n_cols):
            out[j] += a[i, j]
    return out_np


def relu_backward(double[:, ::1] da, double[:, ::1] a):
    cdef Py_ssize_t n_rows = da.shape[0], n_cols = da.shape[1]
    out_np = np.empty((n_rows, n_cols), dtype=np.float64)
    cdef double[:, ::1] out = out_np
    cdef Py_ssize_t i, j
    for i in range(n_rows):
        for j in range(n_cols):
            out[i, j] = da[i, j] if a[i, j] > 0.0 else 0.0
    return out_np
