"""Tensor-slot bookkeeping on flat matrices.

Everything here works on plain (D, D) complex arrays together with a tuple
of subsystem dimensions.  Slots are numbered left to right in the Kronecker
order, so ``dims = (2, 3)`` means the first factor varies slowest.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import expm


def kron(*ops) -> np.ndarray:
    """Kronecker product of any number of matrices, left to right."""
    if not ops:
        raise ValueError("kron needs at least one factor")
    out = np.asarray(ops[0], dtype=np.complex128)
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def embed(op, dims, slots) -> np.ndarray:
    """Embed ``op`` acting on the listed slots into the full product space.

    ``op`` must be square with size prod(dims[s] for s in slots); the result
    acts as identity on the remaining slots.  Slot order inside ``slots``
    matters and may be non-contiguous.
    """
    dims = tuple(int(d) for d in dims)
    slots = list(slots)
    p = len(dims)
    if sorted(set(slots)) != sorted(slots) or any(s < 0 or s >= p for s in slots):
        raise ValueError(f"bad slot list {slots} for {p} slots")
    op = np.asarray(op, dtype=np.complex128)
    sub = int(np.prod([dims[s] for s in slots]))
    if op.shape != (sub, sub):
        raise ValueError(f"operator shape {op.shape} does not match slots {slots} of dims {dims}")
    rest = [i for i in range(p) if i not in slots]
    rest_dim = int(np.prod([dims[i] for i in rest])) if rest else 1
    full = np.kron(op, np.eye(rest_dim))
    order = slots + rest
    shaped = full.reshape([dims[i] for i in order] * 2)
    perm = [order.index(i) for i in range(p)]
    shaped = np.transpose(shaped, perm + [p + q for q in perm])
    total = int(np.prod(dims))
    return np.ascontiguousarray(shaped.reshape(total, total))


def reorder(mat, dims, order) -> np.ndarray:
    """Conjugate ``mat`` by the permutation sending slot order[k] to position k.

    The returned matrix acts on the product space with dims permuted to
    ``[dims[o] for o in order]``.
    """
    dims = tuple(int(d) for d in dims)
    order = list(order)
    p = len(dims)
    if sorted(order) != list(range(p)):
        raise ValueError(f"order {order} is not a permutation of {p} slots")
    total = int(np.prod(dims))
    mat = np.asarray(mat, dtype=np.complex128)
    if mat.shape != (total, total):
        raise ValueError(f"matrix shape {mat.shape} does not match dims {dims}")
    shaped = mat.reshape(list(dims) * 2)
    shaped = np.transpose(shaped, order + [p + q for q in order])
    return np.ascontiguousarray(shaped.reshape(total, total))


def partial_trace(mat, dims, keep):
    """Trace out every slot not in ``keep``.

    Returns the reduced matrix and the tuple of kept dimensions.  ``keep``
    preserves its listed order in the output.
    """
    dims = tuple(int(d) for d in dims)
    keep = list(keep)
    p = len(dims)
    if sorted(set(keep)) != sorted(keep) or any(k < 0 or k >= p for k in keep):
        raise ValueError(f"bad keep list {keep} for {p} slots")
    total = int(np.prod(dims))
    mat = np.asarray(mat, dtype=np.complex128)
    if mat.shape != (total, total):
        raise ValueError(f"matrix shape {mat.shape} does not match dims {dims}")
    drop = [i for i in range(p) if i not in keep]
    shaped = mat.reshape(list(dims) * 2)
    # contract each dropped slot's row index with its column index
    for offset, slot in enumerate(drop):
        axis_row = slot - sum(1 for q in drop[:offset] if q < slot)
        rank = shaped.ndim // 2
        shaped = np.trace(shaped, axis1=axis_row, axis2=rank + axis_row)
    kept_dims = tuple(dims[k] for k in [i for i in range(p) if i in keep])
    kdim = int(np.prod(kept_dims)) if kept_dims else 1
    out = shaped.reshape(kdim, kdim)
    if keep != sorted(keep):
        out = reorder(out, kept_dims, [sorted(keep).index(k) for k in keep])
    return np.ascontiguousarray(out), tuple(dims[k] for k in keep)


def mat_exp(m) -> np.ndarray:
    """Matrix exponential (scipy.linalg.expm)."""
    return expm(np.asarray(m, dtype=np.complex128))


def dagger(m) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(m).conj().T)


def is_unitary(m, tol: float = 1e-10) -> bool:
    m = np.asarray(m)
    d = m.shape[0]
    return bool(np.abs(m @ m.conj().T - np.eye(d)).max() <= tol)


def frobenius_inner(a, b) -> complex:
    """Re-bilinear Frobenius pairing tr(a^dag b)."""
    return complex(np.vdot(a, b))
