# cython: boundscheck=False, wraparound=False, cdivision=True
"""BLAS-backed kernels, mirroring _pure exactly.

The quad kernel runs 2 m^2 zgemm calls of size d on the blocks of
A (1_m x X) B instead of materializing the full product; the trsq kernel is
a pair of zgemv calls.  Both keep the row-major layout by swapping operand
order in the Fortran BLAS calls.
"""
import numpy as np

from scipy.linalg.cython_blas cimport zgemm, zgemv


cdef void _mm_rm(double complex *a, int lda, double complex *b, int ldb,
                 double complex *c, int ldc, int p, int q, int r,
                 double complex alpha, double complex beta) noexcept nogil:
    # row-major C[p, r] = alpha * A[p, q] @ B[q, r] + beta * C
    cdef char cn = b'N'
    zgemm(&cn, &cn, &r, &p, &q, &alpha, b, &ldb, a, &lda, &beta, c, &ldc)


cdef _block_partial_trace(object A, object B, object X, int m):
    A = np.ascontiguousarray(A, dtype=np.complex128)
    B = np.ascontiguousarray(B, dtype=np.complex128)
    X = np.ascontiguousarray(X, dtype=np.complex128)
    cdef int d = X.shape[0]
    cdef int D = m * d
    T1 = np.empty((D, D), dtype=np.complex128)
    ptr = np.zeros((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] Am = A
    cdef double complex[:, ::1] Bm = B
    cdef double complex[:, ::1] Xm = X
    cdef double complex[:, ::1] Tm = T1
    cdef double complex[:, ::1] Pm = ptr
    cdef double complex one = 1.0
    cdef double complex zero = 0.0
    cdef int a, b
    with nogil:
        for a in range(m):
            for b in range(m):
                _mm_rm(&Xm[0, 0], d, &Bm[a * d, b * d], D,
                       &Tm[a * d, b * d], D, d, d, d, one, zero)
        for a in range(m):
            for b in range(m):
                _mm_rm(&Am[a * d, b * d], D, &Tm[b * d, a * d], D,
                       &Pm[0, 0], d, d, d, d, one, one)
    return ptr, X


def quad_value(A, B, X, int m):
    ptr, Xc = _block_partial_trace(A, B, X, m)
    return complex(np.sum(ptr * np.conj(Xc)))


def quad_value_grad(A, B, X, int m):
    ptr, Xc = _block_partial_trace(A, B, X, m)
    value = complex(np.sum(ptr * np.conj(Xc)))
    return value, 2.0 * ptr


def trsq_value(S, X):
    z = _trsq_apply(S, X)
    return float(np.real(np.vdot(z, z)))


def trsq_value_grad(S, X):
    cdef int d = X.shape[0]
    S = np.ascontiguousarray(S, dtype=np.complex128)
    z = _trsq_apply(S, X)
    value = float(np.real(np.vdot(z, z)))
    zc = np.conj(z)
    y = np.empty(d * d, dtype=np.complex128)
    cdef double complex[:, ::1] Sm = S
    cdef double complex[::1] zv = zc
    cdef double complex[::1] yv = y
    cdef int K = S.shape[0]
    cdef int d2 = d * d
    cdef int inc = 1
    cdef double complex one = 1.0
    cdef double complex zero = 0.0
    cdef char cn = b'N'
    with nogil:
        # grad_pre = S^T conj(z); grad = 2 conj(grad_pre)
        zgemv(&cn, &d2, &K, &one, &Sm[0, 0], &d2, &zv[0], &inc, &zero, &yv[0], &inc)
    return value, 2.0 * np.conj(y).reshape(d, d)


cdef _trsq_apply(object S, object X):
    S = np.ascontiguousarray(S, dtype=np.complex128)
    X = np.ascontiguousarray(X, dtype=np.complex128)
    x = X.ravel()
    cdef int K = S.shape[0]
    cdef int d2 = S.shape[1]
    z = np.empty(K, dtype=np.complex128)
    cdef double complex[:, ::1] Sm = S
    cdef double complex[::1] xv = x
    cdef double complex[::1] zv = z
    cdef int inc = 1
    cdef double complex one = 1.0
    cdef double complex zero = 0.0
    cdef char ct = b'T'
    with nogil:
        # column-major view of row-major S is S^T, so 'T' applies S itself
        zgemv(&ct, &d2, &K, &one, &Sm[0, 0], &d2, &xv[0], &inc, &zero, &zv[0], &inc)
    return z
