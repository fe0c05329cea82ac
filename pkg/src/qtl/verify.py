"""Built-in verification suites.

Two levels: ``quick`` (constructions, identities, channel consistency,
gradient checks; under a minute) and ``full`` (adds the n=3 dual-route
channel comparison, analytic-oracle spot checks, and a Monte-Carlo twirl
test; minutes).  Each check reports its worst residual against an
explicit tolerance, so a regression shows up as a named number, not just
a boolean.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import bases, channels, fef
from .linalg import kron
from .optimizer import OptimizerConfig, gradient_check
from .sampling import generator, haar_unitaries, haar_unitary, random_density
from .states import DensityMatrix


@dataclass
class CheckResult:
    name: str
    residual: float
    tolerance: float
    passed: bool
    seconds: float = 0.0

    def line(self) -> str:
        tag = "pass" if self.passed else "FAIL"
        return (f"[{tag}] {self.name:<38s} residual {self.residual:10.3e}"
                f"  tol {self.tolerance:8.1e}  ({self.seconds:.2f}s)")


def _result(name, residual, tol, t0) -> CheckResult:
    residual = float(residual)
    return CheckResult(name=name, residual=residual, tolerance=tol,
                       passed=bool(residual < tol), seconds=time.time() - t0)


def _weyl_orthogonality(n: int) -> float:
    ops = [bases.weyl_unitary(n, s, t) for s in range(n) for t in range(n)]
    worst = 0.0
    for i, a in enumerate(ops):
        for j, b in enumerate(ops):
            want = n if i == j else 0.0
            worst = max(worst, abs(np.trace(a.conj().T @ b) - want))
    return worst


def _gram_residual(vectors) -> float:
    g = np.asarray(vectors) @ np.asarray(vectors).conj().T
    return float(np.abs(g - np.eye(g.shape[0])).max())


def _ghz_gram(n: int) -> float:
    vecs = [bases.ghz_state(n, r, m, s)
            for r in range(n) for m in range(n) for s in range(n)]
    return _gram_residual(vecs)


def _isometry_relations(n: int) -> float:
    worst = 0.0
    for r in range(n):
        for m in range(n):
            for s in range(n):
                iso = bases.ghz_isometry(n, r, m, s)
                worst = max(worst, np.abs(iso.conj().T @ iso - np.eye(n)).max())
                proj = iso @ iso.conj().T
                worst = max(worst, np.abs(proj @ proj - proj).max())
                worst = max(worst, abs(np.trace(proj).real - n))
    return worst


def _depolarizing(n: int, rng, count: int) -> float:
    worst = 0.0
    for _ in range(count):
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        acc = np.zeros((n, n), dtype=np.complex128)
        for s in range(n):
            for t in range(n):
                u = bases.weyl_unitary(n, s, t)
                acc += u.conj().T @ a @ u
        worst = max(worst, np.abs(acc - n * np.trace(a) * np.eye(n)).max())
        a2 = rng.normal(size=(n * n, n * n)) + 1j * rng.normal(size=(n * n, n * n))
        acc2 = np.zeros((n * n, n * n), dtype=np.complex128)
        for r in range(n):
            for m in range(n):
                for s in range(n):
                    iso = bases.ghz_isometry(n, r, m, s)
                    acc2 += iso @ (iso.conj().T @ a2 @ iso) @ iso.conj().T
        # the isometry sum depolarizes the compressed n x n block
        acc3 = np.zeros((n, n), dtype=np.complex128)
        for r in range(n):
            for m in range(n):
                for s in range(n):
                    iso = bases.ghz_isometry(n, r, m, s)
                    acc3 += iso.conj().T @ a2 @ iso
        worst = max(worst, np.abs(acc3 - np.trace(a2) * np.eye(n) * n).max())
    return worst


def _schur_twirl_properties(rng) -> float:
    n = 2
    worst = 0.0
    for _ in range(5):
        sigma = (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
        sigma = sigma + sigma.conj().T
        tw = bases.schur_twirl(sigma)
        flip = bases.flip(n)
        worst = max(worst, abs(np.trace(tw) - np.trace(sigma)))
        worst = max(worst, abs(np.trace(tw @ flip) - np.trace(sigma @ flip)))
        for _ in range(3):
            u = haar_unitary(n, rng)
            uu = kron(u, u)
            worst = max(worst, np.abs(uu @ tw - tw @ uu).max())
        worst = max(worst, np.abs(bases.schur_twirl(tw) - tw).max())
    return worst


def _random_spec(protocol: str, n: int, rng) -> channels.ChannelSpec:
    if protocol == channels.ONE_CHANNEL_BELL:
        return channels.ChannelSpec(protocol=protocol, n=n)
    if protocol == channels.TWO_CHANNEL_GHZ:
        return channels.ChannelSpec(protocol=protocol, n=n,
                                    alice_op=haar_unitary(n * n, rng))
    return channels.ChannelSpec(protocol=protocol, n=n,
                                alice_op=haar_unitary(n * n, rng),
                                bob_op=haar_unitary(n * n, rng))


def _trace_preservation(n: int, rng, count: int) -> float:
    worst = 0.0
    for protocol in (channels.ONE_CHANNEL_BELL, channels.TWO_CHANNEL_BELL,
                     channels.TWO_CHANNEL_GHZ):
        for _ in range(count):
            spec = _random_spec(protocol, n, rng)
            chi = random_density(n * n, rng, dims=(n, n))
            rho = random_density(n, rng)
            out = channels.apply_channel(spec, chi, rho)
            worst = max(worst, abs(np.trace(out.mat) - 1.0))
            worst = max(worst, np.abs(out.mat - out.mat.conj().T).max())
    return worst


def _ideal_teleportation(n: int, rng, count: int) -> float:
    worst = 0.0
    bell = channels.ChannelSpec(protocol=channels.TWO_CHANNEL_BELL, n=n)
    ghz = channels.ChannelSpec(protocol=channels.TWO_CHANNEL_GHZ, n=n)
    one = channels.ChannelSpec(protocol=channels.ONE_CHANNEL_BELL, n=n)
    chi = DensityMatrix(bases.max_entangled_projector(n), (n, n))
    for _ in range(count):
        rho = random_density(n, rng)
        for spec in (bell, ghz, one):
            out = channels.apply_channel(spec, chi, rho)
            worst = max(worst, np.abs(out.mat - rho.mat).max())
    return worst


def _reduction(n: int, rng, count: int) -> float:
    worst = 0.0
    eye = np.eye(n * n)
    two = channels.ChannelSpec(protocol=channels.TWO_CHANNEL_BELL, n=n,
                               alice_op=eye, bob_op=eye)
    one = channels.ChannelSpec(protocol=channels.ONE_CHANNEL_BELL, n=n)
    for _ in range(count):
        chi = random_density(n * n, rng, dims=(n, n))
        rho = random_density(n, rng)
        a = channels.apply_channel(two, chi, rho)
        b = channels.apply_channel(one, chi, rho)
        worst = max(worst, np.abs(a.mat - b.mat).max())
    return worst


def _dual_route(n: int, rng, count: int) -> float:
    worst = 0.0
    for protocol in (channels.ONE_CHANNEL_BELL, channels.TWO_CHANNEL_BELL,
                     channels.TWO_CHANNEL_GHZ):
        for _ in range(count):
            spec = _random_spec(protocol, n, rng)
            chi = random_density(n * n, rng, dims=(n, n))
            rho = random_density(n, rng)
            a = channels.apply_channel(spec, chi, rho)
            b = channels.apply_channel_oracle(spec, chi, rho)
            worst = max(worst, np.abs(a.mat - b.mat).max())
    return worst


def _grad_checks(rng) -> float:
    n = 2
    chi = random_density(n * n, rng, dims=(n, n))
    worst = 0.0
    worst = max(worst, gradient_check(fef.f1_form(chi).objective(),
                                      samples=5, rng=rng))
    worst = max(worst, gradient_check(fef.f2_lower_form(chi).objective(),
                                      samples=5, rng=rng))
    om = haar_unitary(n * n, rng)
    v = haar_unitary(n * n, rng)
    om_form, v_form = fef.f2_full_block_forms(chi, om, v)
    worst = max(worst, gradient_check(om_form.objective(), samples=5, rng=rng))
    worst = max(worst, gradient_check(v_form.objective(), samples=5, rng=rng))
    return worst


def _boundaries(rng) -> float:
    worst = 0.0
    cfg = OptimizerConfig(restarts=3, seed=7)
    for n in (2, 3):
        mixed = DensityMatrix(np.eye(n * n) / n ** 2, (n, n))
        rep = fef.fef_f2_lower(mixed, cfg)
        worst = max(worst, abs(rep.value - 1.0 / n ** 2))
        ent = DensityMatrix(bases.max_entangled_projector(n), (n, n))
        rep = fef.fef_f2_lower(ent, cfg)
        worst = max(worst, abs(rep.value - 1.0))
    return worst


def _oracle_spot_checks(rng) -> float:
    cfg = OptimizerConfig(restarts=6, seed=11)
    worst = 0.0
    for n in (2, 3):
        for p in (0.0, 0.5, 1.0):
            rep = fef.fef_f1(fef.isotropic_state(n, p), cfg)
            worst = max(worst, abs(rep.value - fef.isotropic_f1(n, p)))
    for _ in range(5):
        chi = random_density(4, rng, dims=(2, 2))
        rep = fef.fef_f1(chi, cfg)
        worst = max(worst, abs(rep.value - fef.magic_f1(chi)))
    return worst


def _mc_twirl(rng, samples: int) -> float:
    """Worst entrywise deviation of the sampled twirl, in standard errors."""
    n = 2
    sigma = random_density(n * n, rng, dims=(n, n)).mat
    closed = bases.schur_twirl(sigma)
    s4 = sigma.reshape(n, n, n, n)
    total = np.zeros((n * n, n * n), dtype=np.complex128)
    totsq = np.zeros((n * n, n * n), dtype=np.float64)
    done = 0
    while done < samples:
        batch = min(20000, samples - done)
        us = haar_unitaries(n, batch, rng)
        out = np.einsum('kai,kbj,ijlm,kcl,kdm->kabcd', us, us, s4,
                        us.conj(), us.conj(), optimize=True)
        out = out.reshape(batch, n * n, n * n)
        total += out.sum(axis=0)
        totsq += (np.abs(out) ** 2).sum(axis=0)
        done += batch
    mean = total / samples
    var = totsq / samples - np.abs(mean) ** 2
    se = np.sqrt(np.maximum(var, 0.0) / samples)
    dev = np.abs(mean - closed)
    floor = 1e-12
    return float(np.max(dev / np.maximum(se, floor / 3.0)))


def _mc_fidelity(rng, samples: int) -> float:
    """Exact vs sampled average fidelity, in standard errors."""
    worst = 0.0
    for n, protocol in ((2, channels.TWO_CHANNEL_BELL), (2, channels.TWO_CHANNEL_GHZ)):
        spec = _random_spec(protocol, n, rng)
        chi = random_density(n * n, rng, dims=(n, n))
        exact = channels.average_fidelity_exact(spec, chi)
        mc, se = channels.average_fidelity_mc(spec, chi, samples=samples, rng=rng)
        worst = max(worst, abs(mc - exact) / se)
    return worst


def quick_suite(seed: int = 42) -> list:
    rng = generator(seed)
    results = []
    t = time.time(); results.append(_result(
        "weyl-orthogonality n=2,3", max(_weyl_orthogonality(2), _weyl_orthogonality(3)), 1e-12, t))
    t = time.time(); results.append(_result(
        "bell-basis gram n=2,3",
        max(_gram_residual(bases.bell_basis(2)), _gram_residual(bases.bell_basis(3))), 1e-12, t))
    t = time.time(); results.append(_result(
        "ghz-basis gram n=2,3", max(_ghz_gram(2), _ghz_gram(3)), 1e-12, t))
    t = time.time(); results.append(_result(
        "ghz-isometry relations n=2,3",
        max(_isometry_relations(2), _isometry_relations(3)), 1e-12, t))
    t = time.time(); results.append(_result(
        "depolarizing identities n=2,3",
        max(_depolarizing(2, rng, 5), _depolarizing(3, rng, 5)), 1e-11, t))
    t = time.time(); results.append(_result(
        "schur-twirl properties", _schur_twirl_properties(rng), 1e-10, t))
    t = time.time(); results.append(_result(
        "channel trace preservation n=2,3",
        max(_trace_preservation(2, rng, 5), _trace_preservation(3, rng, 5)), 1e-10, t))
    t = time.time(); results.append(_result(
        "ideal teleportation n=2,3",
        max(_ideal_teleportation(2, rng, 5), _ideal_teleportation(3, rng, 5)), 1e-10, t))
    t = time.time(); results.append(_result(
        "two-channel reduction n=2,3",
        max(_reduction(2, rng, 5), _reduction(3, rng, 5)), 1e-10, t))
    t = time.time(); results.append(_result(
        "dual-route channel agreement n=2", _dual_route(2, rng, 5), 1e-9, t))
    t = time.time(); results.append(_result(
        "gradient checks", _grad_checks(rng), 1e-5, t))
    t = time.time(); results.append(_result(
        "objective boundary values", _boundaries(rng), 1e-6, t))
    return results


def full_suite(seed: int = 42) -> list:
    rng = generator(seed + 1)
    results = quick_suite(seed)
    t = time.time(); results.append(_result(
        "dual-route channel agreement n=3", _dual_route(3, rng, 7), 1e-9, t))
    t = time.time(); results.append(_result(
        "analytic oracle spot checks", _oracle_spot_checks(rng), 1e-6, t))
    t = time.time(); results.append(_result(
        "mc twirl vs closed form (3 SE)", _mc_twirl(rng, 100000), 3.0, t))
    t = time.time(); results.append(_result(
        "mc fidelity vs exact (3 SE)", _mc_fidelity(rng, 100000), 3.0, t))
    return results


def run(level: str = "quick", seed: int = 42):
    """Run a suite; returns (results, all_passed)."""
    if level == "quick":
        results = quick_suite(seed)
    elif level == "full":
        results = full_suite(seed)
    else:
        raise ValueError(f"unknown level {level!r}, expected quick or full")
    return results, all(r.passed for r in results)
