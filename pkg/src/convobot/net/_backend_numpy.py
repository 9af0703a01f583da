"""Pure numpy kernels; the fallback backend when the compiled extension is
unavailable. Same contract as _fastkernels: float64, C-contiguous."""

import numpy as np

NAME = "numpy"


def affine(x, w, b):
    return x @ w + b


def relu(z):
    return np.maximum(z, 0.0)


def softmax_rows(z):
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def matmul_at_b(a, b):
    # a.T @ b
    return a.T @ b


def matmul_a_bt(a, b):
    # a @ b.T
    return a @ b.T


def colsum(a):
    return a.sum(axis=0)


def relu_backward(da, a):
    return np.where(a > 0.0, da, 0.0)
