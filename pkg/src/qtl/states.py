"""Validated state containers used across the package.

Matrices are plain complex128 numpy arrays; these classes pin down the
tensor-factor structure and the physical invariants (hermiticity, unit
trace, positivity, normalization) at well-defined boundaries.  Validation
runs in every public constructor and can be skipped only through the
explicit ``validate=False`` escape hatch used by internal hot paths.
"""
from __future__ import annotations

import numpy as np

HERM_TOL = 1e-10
TRACE_TOL = 1e-10
EIG_TOL = 1e-10
NORM_TOL = 1e-12


class ValidationError(ValueError):
    """Raised when a state or operator fails a named invariant."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


def _as_complex_matrix(mat) -> np.ndarray:
    mat = np.ascontiguousarray(mat, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValidationError("shape", f"expected a square matrix, got {mat.shape}")
    return mat


def _check_dims(dims, size: int) -> tuple:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise ValidationError("dims", f"subsystem dimensions must be positive, got {dims}")
    if int(np.prod(dims)) != size:
        raise ValidationError("dims", f"product of {dims} does not match size {size}")
    return dims


class DensityMatrix:
    """Density matrix with explicit subsystem dimensions.

    Args:
        mat: square complex array.
        dims: subsystem dimensions whose product equals the matrix size.
            Defaults to a single factor.
        validate: run the hermiticity / trace / positivity checks.
    """

    __slots__ = ("mat", "dims")

    def __init__(self, mat, dims=None, *, validate: bool = True):
        self.mat = _as_complex_matrix(mat)
        if dims is None:
            dims = (self.mat.shape[0],)
        self.dims = _check_dims(dims, self.mat.shape[0])
        if validate:
            self.validate()

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def validate(self) -> "DensityMatrix":
        m = self.mat
        herm = np.abs(m - m.conj().T).max()
        if herm > HERM_TOL:
            raise ValidationError("hermiticity", f"max |M - M^dag| = {herm:.3e} > {HERM_TOL}")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError("trace", f"|tr - 1| = {abs(tr - 1.0):.3e} > {TRACE_TOL}")
        lo = np.linalg.eigvalsh(m)[0]
        if lo < -EIG_TOL:
            raise ValidationError("positivity", f"min eigenvalue {lo:.3e} < -{EIG_TOL}")
        return self

    def partial_trace(self, keep) -> "DensityMatrix":
        """Trace out every slot not listed in ``keep`` (slot indices into dims)."""
        from .linalg import partial_trace

        out, dims = partial_trace(self.mat, self.dims, keep)
        return DensityMatrix(out, dims, validate=False)

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))

    def eig(self):
        """Eigenvalues (ascending) and eigenvectors, as numpy.linalg.eigh."""
        return np.linalg.eigh(self.mat)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim}, dims={self.dims})"


class PureState:
    """Normalized state vector with explicit subsystem dimensions."""

    __slots__ = ("vec", "dims")

    def __init__(self, vec, dims=None, *, validate: bool = True):
        vec = np.ascontiguousarray(vec, dtype=np.complex128)
        if vec.ndim != 1:
            raise ValidationError("shape", f"expected a vector, got shape {vec.shape}")
        self.vec = vec
        if dims is None:
            dims = (vec.shape[0],)
        self.dims = _check_dims(dims, vec.shape[0])
        if validate:
            self.validate()

    @property
    def dim(self) -> int:
        return self.vec.shape[0]

    def validate(self) -> "PureState":
        nrm = np.linalg.norm(self.vec)
        if abs(nrm - 1.0) > NORM_TOL:
            raise ValidationError("norm", f"|norm - 1| = {abs(nrm - 1.0):.3e} > {NORM_TOL}")
        return self

    def density(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.vec, self.vec.conj()), self.dims, validate=False)

    def __repr__(self):
        return f"PureState(dim={self.dim}, dims={self.dims})"


def as_matrix(obj) -> np.ndarray:
    """Accept a DensityMatrix, PureState or raw array and return the matrix."""
    if isinstance(obj, DensityMatrix):
        return obj.mat
    if isinstance(obj, PureState):
        return obj.density().mat
    return _as_complex_matrix(obj)
