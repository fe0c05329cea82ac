"""Kernel backend selection.

The compiled extension (``_fast``, Cython over BLAS) is preferred when it
built successfully; otherwise the numpy reference implementation in
``_pure`` takes over.  Both expose the same four callables.  The dispatch
goes through module-level functions so ``set_backend`` affects every
caller, which the equivalence tests and the benchmark rely on.
"""
from __future__ import annotations

from . import _pure

try:
    from . import _fast
except ImportError:  # pragma: no cover - depends on the build environment
    _fast = None

_BACKENDS = {"pure": _pure}
if _fast is not None:
    _BACKENDS["compiled"] = _fast

_active = _BACKENDS.get("compiled", _pure)


def available_backends() -> tuple:
    return tuple(sorted(_BACKENDS))


def get_backend() -> str:
    return "compiled" if _fast is not None and _active is _fast else "pure"


def set_backend(name: str) -> None:
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    _active = _BACKENDS[name]


def quad_value(A, B, X, m):
    """tr[A (1_m x X) B (1_m x X)^dag] for Hermitian A, B of size m*dim(X)."""
    return _active.quad_value(A, B, X, m)


def quad_value_grad(A, B, X, m):
    """Value and Euclidean gradient of quad_value with respect to X."""
    return _active.quad_value_grad(A, B, X, m)


def trsq_value(S, X):
    """sum_k |S[k] . vec(X)|^2 for a stacked coefficient matrix S."""
    return _active.trsq_value(S, X)


def trsq_value_grad(S, X):
    """Value and Euclidean gradient of trsq_value with respect to X."""
    return _active.trsq_value_grad(S, X)
