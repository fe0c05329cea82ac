"""Riemannian conjugate-gradient ascent on the unitary group.

The ascent direction lives in the skew-Hermitian tangent representation
G = Gamma U^dag - U Gamma^dag, where Gamma is the Euclidean gradient in the
convention value(X + eps D) = value + eps Re tr(D^dag Gamma) + O(eps^2).
Moving along exp(eta D) U keeps iterates exactly unitary; the directional
derivative of the objective along that curve is Re tr(D^dag G) / 2, which
for D = G gives the familiar ||G||_F^2 / 2 steepest-ascent slope.

The search is Polak-Ribiere conjugate gradient with nonnegativity clamp,
periodic direction restarts and a backtracking Armijo line search, wrapped
in a multi-start loop whose first start is always the identity.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .sampling import generator, haar_unitary

_IMAG_TOL = 1e-9
_UNITARY_TOL = 1e-8


@dataclass
class UnitaryObjective:
    """Callable bundle for a smooth real function on U(dim).

    ``value_and_gradient`` is optional; when present it saves the double
    evaluation on the hot path.
    """

    dim: int
    value: Callable[[np.ndarray], complex]
    euclidean_gradient: Callable[[np.ndarray], np.ndarray]
    value_and_gradient: Optional[Callable] = None

    def fused(self):
        if self.value_and_gradient is not None:
            return self.value_and_gradient
        return lambda U: (self.value(U), self.euclidean_gradient(U))


@dataclass
class OptimizerConfig:
    max_iters: int = 500
    grad_tol: float = 1e-8
    restarts: int = 10
    initial_step: float = 1.0
    armijo_c: float = 1e-4
    armijo_shrink: float = 0.5
    min_step: float = 1e-14
    seed: Optional[int] = None

    def __post_init__(self):
        if self.max_iters < 1 or self.restarts < 1:
            raise ValueError("max_iters and restarts must be positive")
        if self.grad_tol <= 0 or self.initial_step <= 0 or self.min_step <= 0:
            raise ValueError("tolerances and steps must be positive")
        if not 0.0 < self.armijo_shrink < 1.0:
            raise ValueError(f"armijo_shrink must lie in (0,1), got {self.armijo_shrink}")
        if self.armijo_c <= 0:
            raise ValueError("armijo_c must be positive")


@dataclass
class OptimizerResult:
    """Best run of a multi-start ascent.

    ``traces`` holds one (iterations, 2) array of (value, grad_norm) rows
    per start, in start order; ``best_index`` points at the winning run.
    ``iterations`` sums gradient steps over every start.
    """

    value: float
    maximizer: np.ndarray
    iterations: int
    converged: bool
    traces: list = field(repr=False, default_factory=list)
    best_index: int = 0

    @property
    def trace(self) -> np.ndarray:
        return self.traces[self.best_index]


def _real(v) -> float:
    v = complex(v)
    if abs(v.imag) > _IMAG_TOL * max(1.0, abs(v.real)):
        raise ValueError(f"objective returned a non-real value {v!r}")
    return v.real


def riemannian_gradient(u, egrad) -> np.ndarray:
    """Skew-Hermitian ascent direction Gamma u^dag - u Gamma^dag."""
    u = np.asarray(u)
    d = u.shape[0]
    dev = np.abs(u @ u.conj().T - np.eye(d)).max()
    if dev > _UNITARY_TOL:
        raise ValueError(f"base point is not unitary, deviation {dev:.3e}")
    return egrad @ u.conj().T - u @ egrad.conj().T


def _geodesic_factors(D):
    # D skew-Hermitian, so -iD is Hermitian; exp(eta D) = V e^{i eta lam} V^dag
    lam, V = np.linalg.eigh(-1j * D)
    return lam, V


def _geodesic_step(lam, V, eta, U):
    phases = np.exp(1j * eta * lam)
    return (V * phases) @ (V.conj().T @ U)


def _polar_project(U):
    u, _, vh = np.linalg.svd(U)
    return u @ vh


def _line_search(objective, U, f, lam, V, slope, eta0, cfg):
    eta = eta0
    while eta >= cfg.min_step:
        U_try = _geodesic_step(lam, V, eta, U)
        f_try = _real(objective.value(U_try))
        if f_try >= f + cfg.armijo_c * eta * slope:
            return eta, U_try, f_try
        eta *= cfg.armijo_shrink
    return None


def _climb(objective: UnitaryObjective, U0: np.ndarray, cfg: OptimizerConfig):
    """Single ascent run from U0: (value, U, iters, converged, trace)."""
    d = objective.dim
    fused = objective.fused()
    U = np.ascontiguousarray(np.asarray(U0, dtype=np.complex128))
    f, eg = fused(U)
    f = _real(f)
    G = eg @ U.conj().T - U @ eg.conj().T
    trace = []
    D = G
    G_prev = None
    gg_prev = None
    eta_accept = cfg.initial_step
    converged = False
    iters = 0
    restart_period = max(d * d, 2)

    while iters < cfg.max_iters:
        iters += 1
        gg = float(np.real(np.vdot(G, G)))
        trace.append((f, np.sqrt(gg)))
        if np.sqrt(gg) <= cfg.grad_tol:
            converged = True
            break

        if G_prev is None or (iters - 1) % restart_period == 0:
            beta = 0.0
        else:
            # Polak-Ribiere with nonnegativity clamp
            beta = max(0.0, float(np.real(np.vdot(G - G_prev, G))) / gg_prev)
        D = G if beta == 0.0 else G + beta * D
        slope = float(np.real(np.vdot(D, G))) / 2.0
        if slope <= 0.0:
            D = G
            slope = gg / 2.0

        lam, V = _geodesic_factors(D)
        hit = _line_search(objective, U, f, lam, V, slope,
                           min(cfg.initial_step, 2.0 * eta_accept), cfg)
        if hit is None and D is not G:
            # fall back to the raw gradient before giving up
            D = G
            slope = gg / 2.0
            lam, V = _geodesic_factors(D)
            hit = _line_search(objective, U, f, lam, V, slope,
                               min(cfg.initial_step, 2.0 * eta_accept), cfg)
        if hit is None:
            break

        eta_accept, U, f = hit
        G_prev = G
        gg_prev = gg
        _, eg = fused(U)
        G = eg @ U.conj().T - U @ eg.conj().T

    # remove accumulated rounding drift and make value/maximizer consistent
    U = _polar_project(U)
    f = _real(objective.value(U))
    return f, U, iters, converged, np.asarray(trace)


def ascend_from(objective: UnitaryObjective, start,
                config: OptimizerConfig | None = None) -> OptimizerResult:
    """Single-start ascent, used by the alternating block schemes."""
    cfg = config or OptimizerConfig()
    f, U, iters, converged, trace = _climb(objective, start, cfg)
    return OptimizerResult(value=f, maximizer=U, iterations=iters,
                           converged=converged, traces=[trace], best_index=0)


def maximize(objective: UnitaryObjective, config: OptimizerConfig | None = None,
             rng=None, starts=()) -> OptimizerResult:
    """Multi-start ascent over U(dim).

    The start list is the identity, then any caller-provided warm starts,
    then Haar-random unitaries until ``config.restarts`` starts have run
    (warm starts beyond that count still all run).  ``rng`` falls back to
    ``config.seed``.  Ties between runs break toward the earlier start.
    """
    cfg = config or OptimizerConfig()
    rng = generator(rng if rng is not None else cfg.seed)
    d = objective.dim

    inits = [np.eye(d, dtype=np.complex128)]
    for s in starts:
        s = np.asarray(s, dtype=np.complex128)
        if s.shape != (d, d):
            raise ValueError(f"warm start shape {s.shape} does not match dim {d}")
        inits.append(s)
    while len(inits) < cfg.restarts:
        inits.append(haar_unitary(d, rng))

    best = None
    best_index = 0
    traces = []
    total_iters = 0
    for k, U0 in enumerate(inits):
        f, U, iters, converged, trace = _climb(objective, U0, cfg)
        total_iters += iters
        traces.append(trace)
        if best is None or f > best[0]:
            best = (f, U, converged)
            best_index = k

    f, U, converged = best
    return OptimizerResult(value=f, maximizer=U, iterations=total_iters,
                           converged=converged, traces=traces, best_index=best_index)


def gradient_check(objective: UnitaryObjective, samples: int = 20,
                   directions: int = 3, step: float = 1e-6, rng=None) -> float:
    """Max relative error between analytic and central-difference slopes.

    Samples Haar-random base points and random skew-Hermitian directions,
    comparing Re tr((D U)^dag Gamma) against the symmetric difference of
    the objective along the geodesic exp(eps D) U.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = generator(rng)
    d = objective.dim
    worst = 0.0
    for _ in range(samples):
        U = haar_unitary(d, rng)
        eg = objective.euclidean_gradient(U)
        for _ in range(directions):
            z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            D = z - z.conj().T
            D /= np.linalg.norm(D)
            analytic = float(np.real(np.vdot(D @ U, eg)))
            lam, V = _geodesic_factors(D)
            f_plus = _real(objective.value(_geodesic_step(lam, V, step, U)))
            f_minus = _real(objective.value(_geodesic_step(lam, V, -step, U)))
            fd = (f_plus - f_minus) / (2.0 * step)
            rel = abs(fd - analytic) / max(abs(analytic), 1e-8)
            worst = max(worst, rel)
    return worst
