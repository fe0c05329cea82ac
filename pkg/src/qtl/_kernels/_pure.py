"""Pure numpy implementations of the hot objective kernels.

Two evaluation patterns cover every objective in the package:

* quad: f(X) = tr[ A (1_m x X) B (1_m x X)^dag ] with A, B of size m*d and
  X of size d.  Writing P = A (1_m x X) B, both the value and the Euclidean
  gradient come out of the block partial trace ptr[i, j] = sum_a P[(a,i),(a,j)]:
  value = sum_ij ptr[i,j] conj(X[i,j]) and grad = 2 ptr (for Hermitian A, B).

* trsq: f(X) = sum_k |row_k . vec(X)|^2 for a stacked coefficient matrix S,
  i.e. a weighted sum of |tr(X C_k)|^2 terms with rows vec(C_k^T).
  grad = 2 (S z)^dag-style contraction, see below.

Gradients follow the convention value(X + eps D) = value + eps Re tr(D^dag G).
"""
from __future__ import annotations

import numpy as np


def _block_partial_trace(A, B, X, m):
    d = X.shape[0]
    A4 = A.reshape(m, d, m, d)
    B4 = B.reshape(m, d, m, d)
    # T1 = (1_m x X) B, blockwise: T1[(a,i),(b,j)] = sum_k X[i,k] B[(a,k),(b,j)]
    T1 = np.einsum('ik,akbj->aibj', X, B4)
    # ptr[i,j] = sum_ab A[(a,i),(b,k)] T1[(b,k),(a,j)]
    return np.einsum('aibk,bkaj->ij', A4, T1)


def quad_value(A, B, X, m):
    ptr = _block_partial_trace(A, B, X, m)
    return complex(np.sum(ptr * X.conj()))


def quad_value_grad(A, B, X, m):
    ptr = _block_partial_trace(A, B, X, m)
    value = complex(np.sum(ptr * X.conj()))
    return value, 2.0 * ptr


def trsq_value(S, X):
    z = S @ X.ravel()
    return float(np.real(np.vdot(z, z)))


def trsq_value_grad(S, X):
    d = X.shape[0]
    z = S @ X.ravel()
    value = float(np.real(np.vdot(z, z)))
    grad = 2.0 * (z @ S.conj()).reshape(d, d)
    return value, grad
