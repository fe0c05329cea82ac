"""Objective forms evaluated on the unitary group.

Every optimization target in the package reduces to one of two shapes:

* ``QuadForm``: f(X) = offset + tr[ A (1_m x X) B (1_m x X)^dag ] with
  Hermitian A and B.  The entangled-fraction objectives for single
  unitaries and for each block of the alternating schemes are all of this
  shape once the tensor slots are permuted so X sits in the trailing
  factor.

* ``TraceSquareForm``: f(X) = offset + sum_k w_k |tr(X C_k)|^2, stored as
  a stacked coefficient matrix with rows sqrt(w_k) vec(C_k^T).

Both expose ``objective()`` producing the callable bundle the optimizer
consumes, with gradients in the convention
value(X + eps D) = value(X) + eps Re tr(D^dag grad) + O(eps^2).
"""
from __future__ import annotations

import numpy as np

from . import _kernels
from .optimizer import UnitaryObjective

_HERM_TOL = 1e-10


def _coerce_square(mat, name: str) -> np.ndarray:
    mat = np.ascontiguousarray(mat, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{name} must be square, got shape {mat.shape}")
    return mat


class QuadForm:
    """Quadratic unitary objective tr[A (1_m x X) B (1_m x X)^dag] + offset."""

    def __init__(self, A, B, m: int, offset: float = 0.0):
        A = _coerce_square(A, "A")
        B = _coerce_square(B, "B")
        if A.shape != B.shape:
            raise ValueError(f"A and B must match, got {A.shape} vs {B.shape}")
        m = int(m)
        if m < 1 or A.shape[0] % m != 0:
            raise ValueError(f"block count {m} does not divide size {A.shape[0]}")
        for mat, name in ((A, "A"), (B, "B")):
            dev = np.abs(mat - mat.conj().T).max()
            if dev > _HERM_TOL:
                raise ValueError(f"{name} must be Hermitian, deviation {dev:.3e}")
        self.A = A
        self.B = B
        self.m = m
        self.offset = float(offset)
        self.dim = A.shape[0] // m

    def value(self, X) -> complex:
        return self.offset + _kernels.quad_value(self.A, self.B, X, self.m)

    def value_and_gradient(self, X):
        v, g = _kernels.quad_value_grad(self.A, self.B, X, self.m)
        return self.offset + v, g

    def gradient(self, X) -> np.ndarray:
        return self.value_and_gradient(X)[1]

    def objective(self) -> UnitaryObjective:
        return UnitaryObjective(
            dim=self.dim,
            value=self.value,
            euclidean_gradient=self.gradient,
            value_and_gradient=self.value_and_gradient,
        )


class TraceSquareForm:
    """Weighted sum of |tr(X C_k)|^2 terms plus a constant offset."""

    def __init__(self, rows, offset: float = 0.0):
        rows = np.ascontiguousarray(rows, dtype=np.complex128)
        if rows.ndim != 2:
            raise ValueError(f"expected a stacked row matrix, got shape {rows.shape}")
        d = int(round(np.sqrt(rows.shape[1])))
        if d * d != rows.shape[1]:
            raise ValueError(f"row length {rows.shape[1]} is not a perfect square")
        self.rows = rows
        self.offset = float(offset)
        self.dim = d

    @classmethod
    def from_matrices(cls, mats, weights=None, offset: float = 0.0) -> "TraceSquareForm":
        """Build from coefficient matrices C_k and optional weights w_k >= 0."""
        mats = [np.asarray(c, dtype=np.complex128) for c in mats]
        if not mats:
            raise ValueError("need at least one coefficient matrix")
        d = mats[0].shape[0]
        if weights is None:
            weights = np.ones(len(mats))
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != (len(mats),) or np.any(weights < 0):
            raise ValueError("weights must be a nonnegative vector matching mats")
        rows = np.empty((len(mats), d * d), dtype=np.complex128)
        for k, c in enumerate(mats):
            if c.shape != (d, d):
                raise ValueError(f"coefficient {k} has shape {c.shape}, expected ({d}, {d})")
            # tr(X C) = vec(X) . vec(C^T) in row-major layout
            rows[k] = np.sqrt(weights[k]) * c.T.ravel()
        return cls(rows, offset=offset)

    def value(self, X) -> float:
        return self.offset + _kernels.trsq_value(self.rows, X)

    def value_and_gradient(self, X):
        v, g = _kernels.trsq_value_grad(self.rows, X)
        return self.offset + v, g

    def gradient(self, X) -> np.ndarray:
        return self.value_and_gradient(X)[1]

    def objective(self) -> UnitaryObjective:
        return UnitaryObjective(
            dim=self.dim,
            value=self.value,
            euclidean_gradient=self.gradient,
            value_and_gradient=self.value_and_gradient,
        )
