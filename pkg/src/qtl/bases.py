"""Shift/clock operators, generalized Bell and GHZ bases, twirling helpers.

Conventions, fixed once here and relied on everywhere else:

* ``w = exp(-2 pi i / n)``.
* ``shift`` maps |j> to |j+1 mod n>; ``clock`` multiplies |j> by w^j.
* ``weyl_unitary(n, s, t) = shift^t @ clock^s``, so the commutation rule is
  ``clock^s shift^t = w^(s t) shift^t clock^s``.
* ``bell_state(n, s, t)`` applies weyl_unitary to the second slot of the
  uniform maximally entangled vector, giving (1/sqrt n) sum_i w^(i s) |i, i+t>.
* ``ghz_state(n, r, m, s)`` is (1/sqrt n) sum_j w^(j s) |j, j+r, j+m>.

Indices are reduced mod n on entry, so callers may pass negatives.
"""
from __future__ import annotations

import numpy as np

from .linalg import kron


def root_of_unity(n: int) -> complex:
    return np.exp(-2j * np.pi / n)


def _check_n(n: int) -> int:
    n = int(n)
    if n < 2:
        raise ValueError(f"local dimension must be at least 2, got {n}")
    return n


def shift(n: int) -> np.ndarray:
    """Cyclic shift |j> -> |j+1 mod n>."""
    _check_n(n)
    return np.roll(np.eye(n, dtype=np.complex128), 1, axis=0)


def clock(n: int) -> np.ndarray:
    """Diagonal phase |j> -> w^j |j>."""
    _check_n(n)
    w = root_of_unity(n)
    return np.diag(w ** np.arange(n)).astype(np.complex128)


def weyl_unitary(n: int, s: int, t: int) -> np.ndarray:
    """shift^t clock^s, the (s, t) element of the Weyl operator basis."""
    _check_n(n)
    s, t = s % n, t % n
    w = root_of_unity(n)
    out = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        out[(j + t) % n, j] = w ** ((j * s) % n)
    return out


def weyl_coefficients(a) -> np.ndarray:
    """Expansion coefficients c[s, t] = tr(weyl_unitary(n,s,t)^dag a) / n.

    The Weyl operators are orthogonal with tr(U^dag U) = n, so
    a = sum_st c[s, t] weyl_unitary(n, s, t) reconstructs exactly.
    """
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    c = np.zeros((n, n), dtype=np.complex128)
    for s in range(n):
        for t in range(n):
            c[s, t] = np.trace(weyl_unitary(n, s, t).conj().T @ a) / n
    return c


def weyl_expand(c) -> np.ndarray:
    """Inverse of weyl_coefficients."""
    c = np.asarray(c, dtype=np.complex128)
    n = c.shape[0]
    out = np.zeros((n, n), dtype=np.complex128)
    for s in range(n):
        for t in range(n):
            out += c[s, t] * weyl_unitary(n, s, t)
    return out


def max_entangled(n: int) -> np.ndarray:
    """Uniform maximally entangled vector (1/sqrt n) sum_i |ii> on n x n."""
    _check_n(n)
    v = np.zeros(n * n, dtype=np.complex128)
    for i in range(n):
        v[i * n + i] = 1.0
    return v / np.sqrt(n)


def max_entangled_projector(n: int) -> np.ndarray:
    v = max_entangled(n)
    return np.outer(v, v.conj())


def bell_state(n: int, s: int, t: int) -> np.ndarray:
    """Generalized Bell vector (1 x U_st) |Phi| = (1/sqrt n) sum_i w^(is) |i, i+t>."""
    _check_n(n)
    u = weyl_unitary(n, s, t)
    return kron(np.eye(n), u) @ max_entangled(n)


def bell_basis(n: int) -> np.ndarray:
    """All n^2 Bell vectors stacked as rows, index k = s*n + t."""
    _check_n(n)
    out = np.zeros((n * n, n * n), dtype=np.complex128)
    for s in range(n):
        for t in range(n):
            out[s * n + t] = bell_state(n, s, t)
    return out


def bell_overlaps(chi) -> np.ndarray:
    """Matrix elements of chi in the Bell basis, E[k, l] = <B_k| chi |B_l>."""
    chi = np.asarray(chi, dtype=np.complex128)
    n = int(round(np.sqrt(chi.shape[0])))
    if n * n != chi.shape[0]:
        raise ValueError(f"matrix size {chi.shape[0]} is not a perfect square")
    basis = bell_basis(n)
    return basis.conj() @ chi @ basis.T


def ghz_unitary(n: int, r: int, m: int, s: int) -> np.ndarray:
    """(shift^r clock^s) x shift^m acting on two slots, size n^2."""
    _check_n(n)
    h = shift(n)
    a = np.linalg.matrix_power(h, r % n) @ np.linalg.matrix_power(clock(n), s % n)
    b = np.linalg.matrix_power(h, m % n)
    return kron(a, b)


def ghz_state(n: int, r: int, m: int, s: int) -> np.ndarray:
    """Generalized GHZ vector (1/sqrt n) sum_j w^(js) |j, j+r, j+m>."""
    _check_n(n)
    w = root_of_unity(n)
    v = np.zeros(n ** 3, dtype=np.complex128)
    for j in range(n):
        v[(j * n + (j + r) % n) * n + (j + m) % n] = w ** ((j * s) % n)
    return v / np.sqrt(n)


def diagonal_isometry(n: int) -> np.ndarray:
    """The n^2 x n copy isometry sum_i |ii><i|."""
    _check_n(n)
    e = np.zeros((n * n, n), dtype=np.complex128)
    for i in range(n):
        e[i * n + i, i] = 1.0
    return e


def ghz_isometry(n: int, r: int, m: int, s: int) -> np.ndarray:
    """The n^2 x n isometry M: |j> -> w^(-js) |j+r, j+m>.

    Columns are orthonormal (M^dag M = 1_n), and summing M A M^dag over all
    n^3 index triples depolarizes any n x n operator A to n tr(A) 1.  Up to
    normalization the columns are the two trailing slots of the GHZ vectors.
    """
    _check_n(n)
    w = root_of_unity(n)
    v = np.zeros((n * n, n), dtype=np.complex128)
    for j in range(n):
        v[((j + r) % n) * n + (j + m) % n, j] = w ** ((-j * s) % n)
    return v


def slice_to_diagonal(n: int, i: int) -> np.ndarray:
    """The n^2 x n^2 map sum_a |aa><a, i| selecting column slice i."""
    _check_n(n)
    i = i % n
    e = np.zeros((n * n, n * n), dtype=np.complex128)
    for a in range(n):
        e[a * n + a, a * n + i] = 1.0
    return e


def flip(n: int) -> np.ndarray:
    """Swap operator on the n x n product space."""
    _check_n(n)
    f = np.zeros((n * n, n * n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            f[i * n + j, j * n + i] = 1.0
    return f


def schur_twirl(sigma, n: int | None = None) -> np.ndarray:
    """Average of (U x U) sigma (U x U)^dag over the Haar measure.

    Closed form from Schur-Weyl duality: the result is a combination of the
    identity and the flip with weights fixed by tr(sigma) and tr(sigma F).
    """
    sigma = np.asarray(sigma, dtype=np.complex128)
    if n is None:
        n = int(round(np.sqrt(sigma.shape[0])))
    _check_n(n)
    if sigma.shape != (n * n, n * n):
        raise ValueError(f"sigma shape {sigma.shape} does not match n = {n}")
    f = flip(n)
    tr = np.trace(sigma)
    trf = np.trace(sigma @ f)
    denom = n * n * (n * n - 1.0)
    a1 = (n * n * tr - n * trf) / denom
    a2 = (n * n * trf - n * tr) / denom
    return a1 * np.eye(n * n) + a2 * f
