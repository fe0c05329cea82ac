"""Random ensembles: Haar unitaries, Ginibre matrices, random densities.

All samplers take a ``rng`` argument that may be an integer seed, ``None``
or an existing numpy Generator, so call sites stay deterministic when they
need to be.
"""
from __future__ import annotations

import numpy as np

from .states import DensityMatrix, PureState


def generator(rng=None) -> np.random.Generator:
    """Coerce a seed / Generator / None into a numpy Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def split(rng, k: int):
    """Spawn ``k`` statistically independent child generators."""
    return generator(rng).spawn(k)


def ginibre(rows: int, cols: int, rng=None) -> np.ndarray:
    """Complex Ginibre matrix with iid standard complex normal entries."""
    rng = generator(rng)
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)


def haar_unitary(n: int, rng=None) -> np.ndarray:
    """Haar-distributed unitary via phase-fixed QR of a Ginibre matrix.

    The R-diagonal phase correction makes the distribution exactly Haar
    rather than QR-convention dependent.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    z = ginibre(n, n, rng)
    q, r = np.linalg.qr(z)
    ph = np.diag(r).copy()
    ph /= np.abs(ph)
    return q * ph


def haar_unitaries(n: int, count: int, rng=None) -> np.ndarray:
    """Batch of ``count`` Haar unitaries, shape (count, n, n)."""
    rng = generator(rng)
    z = (rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    ph = np.einsum('bii->bi', r).copy()
    ph /= np.abs(ph)
    return q * ph[:, None, :]


def random_pure(n: int, rng=None, dims=None) -> PureState:
    """Uniform pure state on the n-dimensional sphere."""
    rng = generator(rng)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    return PureState(v, dims, validate=False)


def random_density(n: int, rng=None, rank=None, dims=None) -> DensityMatrix:
    """Random density matrix from the Hilbert-Schmidt (Ginibre) ensemble.

    Args:
        n: matrix size.
        rank: number of Ginibre columns; defaults to full rank n.
        dims: optional subsystem dimensions to record on the result.
    """
    rng = generator(rng)
    rank = n if rank is None else int(rank)
    if rank < 1 or rank > n:
        raise ValueError(f"rank must lie in [1, {n}], got {rank}")
    g = ginibre(n, rank, rng)
    m = g @ g.conj().T
    m /= np.trace(m).real
    return DensityMatrix(m, dims, validate=False)
