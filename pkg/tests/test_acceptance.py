"""Acceptance gate: ten end-to-end checks with explicit tolerances.

Each test prints a one-line verdict so the full run reads as a checklist.
The checks cover basis constructions, the two depolarizing identities,
channel correctness along both implementation routes, the sampled Schur
twirl, optimizer soundness, the three analytic fraction oracles, the
one- vs two-channel gap experiment, boundary values, Monte-Carlo
consistency of optimized channels, and the mixing/local-unitary
structure of the two-copy functional.  Wall-clock budgets are asserted
alongside the numeric tolerances.
"""
import time

import numpy as np

from qtl import bases, channels, fef
from qtl.channels import (ChannelSpec, CorrectionFamily, ONE_CHANNEL_BELL,
                          TWO_CHANNEL_BELL, TWO_CHANNEL_GHZ)
from qtl.linalg import kron
from qtl.optimizer import OptimizerConfig, gradient_check, maximize
from qtl.sampling import generator, haar_unitaries, haar_unitary, random_density
from qtl.serialization import read_records, write_records
from qtl.states import DensityMatrix


def _verdict(num, name, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"[criterion {num}] {name}: {status} ({detail})")
    assert ok, f"criterion {num} {name}: {detail}"


def _max_ent(n):
    return DensityMatrix(bases.max_entangled_projector(n), (n, n))


def test_criterion_01_basis_integrity():
    t0 = time.time()
    worst = 0.0
    for n in (2, 3):
        ops = [bases.weyl_unitary(n, s, t) for s in range(n) for t in range(n)]
        for i, a in enumerate(ops):
            for j, b in enumerate(ops):
                want = float(n) if i == j else 0.0
                worst = max(worst, abs(np.trace(a.conj().T @ b) - want))

        bell = np.asarray(bases.bell_basis(n))
        worst = max(worst, np.abs(bell @ bell.conj().T - np.eye(n * n)).max())

        ghz = np.asarray([bases.ghz_state(n, r, m, s)
                          for r in range(n) for m in range(n) for s in range(n)])
        worst = max(worst, np.abs(ghz @ ghz.conj().T - np.eye(n ** 3)).max())

        diag = sum(np.outer(e, e.conj()) for e in
                   (np.eye(n * n)[j * n + j] for j in range(n)))
        for r in range(n):
            for m in range(n):
                for s in range(n):
                    iso = bases.ghz_isometry(n, r, m, s)
                    worst = max(worst, np.abs(iso.conj().T @ iso - np.eye(n)).max())
                    shift = kron(np.eye(n), np.linalg.matrix_power(
                        bases.shift(n), (m - r) % n))
                    proj = shift @ diag @ shift.conj().T
                    worst = max(worst, np.abs(iso @ iso.conj().T - proj).max())
    elapsed = time.time() - t0
    _verdict(1, "basis integrity n=2,3", worst < 1e-12 and elapsed < 5.0,
             f"residual {worst:.2e}, {elapsed:.1f}s")


def test_criterion_02_depolarizing_identities():
    t0 = time.time()
    rng = generator(202)
    worst = 0.0
    for n in (2, 3):
        weyl = [bases.weyl_unitary(n, s, t) for s in range(n) for t in range(n)]
        isos = [bases.ghz_isometry(n, r, m, s)
                for r in range(n) for m in range(n) for s in range(n)]
        for _ in range(50):
            a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            acc = sum(u.conj().T @ a @ u for u in weyl)
            worst = max(worst, np.abs(acc - n * np.trace(a) * np.eye(n)).max())
            acc2 = sum(iso @ a @ iso.conj().T for iso in isos)
            worst = max(worst, np.abs(acc2 - n * np.trace(a) * np.eye(n * n)).max())
    elapsed = time.time() - t0
    _verdict(2, "depolarizing identities n=2,3", worst < 1e-11 and elapsed < 5.0,
             f"residual {worst:.2e} on 50 random operators, {elapsed:.1f}s")


def test_criterion_03_channel_correctness():
    t0 = time.time()
    rng = generator(303)

    ideal = 0.0
    for n in (2, 3):
        spec = ChannelSpec(TWO_CHANNEL_BELL, n)
        for _ in range(20):
            rho = random_density(n, rng)
            out = channels.apply_channel(spec, _max_ent(n), rho)
            ideal = max(ideal, np.abs(out.mat - rho.mat).max())

    def random_spec(protocol, n):
        if protocol == ONE_CHANNEL_BELL:
            return ChannelSpec(protocol, n)
        if protocol == TWO_CHANNEL_GHZ:
            return ChannelSpec(protocol, n, alice_op=haar_unitary(n * n, rng))
        return ChannelSpec(protocol, n, alice_op=haar_unitary(n * n, rng),
                           bob_op=haar_unitary(n * n, rng))

    trace_dev = 0.0
    for protocol in (ONE_CHANNEL_BELL, TWO_CHANNEL_BELL, TWO_CHANNEL_GHZ):
        for k in range(50):
            n = 2 if k % 2 == 0 else 3
            spec = random_spec(protocol, n)
            chi = random_density(n * n, rng, dims=(n, n))
            out = channels.apply_channel(spec, chi, random_density(n, rng))
            trace_dev = max(trace_dev, abs(np.trace(out.mat) - 1.0))

    reduction = 0.0
    for k in range(20):
        n = 2 if k % 2 == 0 else 3
        eye = np.eye(n * n)
        two = ChannelSpec(TWO_CHANNEL_BELL, n, alice_op=eye, bob_op=eye)
        one = ChannelSpec(ONE_CHANNEL_BELL, n)
        chi = random_density(n * n, rng, dims=(n, n))
        rho = random_density(n, rng)
        a = channels.apply_channel(two, chi, rho)
        b = channels.apply_channel(one, chi, rho)
        reduction = max(reduction, np.abs(a.mat - b.mat).max())

    dual = 0.0
    protocols = (ONE_CHANNEL_BELL, TWO_CHANNEL_BELL, TWO_CHANNEL_GHZ)
    for k in range(20):
        spec = random_spec(protocols[k % 3], 2)
        chi = random_density(4, rng, dims=(2, 2))
        rho = random_density(2, rng)
        a = channels.apply_channel(spec, chi, rho)
        b = channels.apply_channel_oracle(spec, chi, rho)
        dual = max(dual, np.abs(a.mat - b.mat).max())

    elapsed = time.time() - t0
    ok = (ideal < 1e-10 and trace_dev < 1e-10 and reduction < 1e-10
          and dual < 1e-9 and elapsed < 120.0)
    _verdict(3, "channel correctness", ok,
             f"ideal {ideal:.2e}, trace {trace_dev:.2e}, "
             f"reduction {reduction:.2e}, dual-route {dual:.2e}, {elapsed:.1f}s")


def test_criterion_04_sampled_schur_twirl():
    t0 = time.time()
    rng = generator(404)
    n = 2
    sigma = random_density(n * n, rng, dims=(n, n)).mat
    closed = bases.schur_twirl(sigma)
    s4 = sigma.reshape(n, n, n, n)

    samples = 100_000
    total = np.zeros((n * n, n * n), dtype=np.complex128)
    totsq = np.zeros((n * n, n * n), dtype=np.float64)
    done = 0
    while done < samples:
        batch = min(20_000, samples - done)
        us = haar_unitaries(n, batch, rng)
        out = np.einsum('kai,kbj,ijlm,kcl,kdm->kabcd', us, us, s4,
                        us.conj(), us.conj(), optimize=True)
        out = out.reshape(batch, n * n, n * n)
        total += out.sum(axis=0)
        totsq += (np.abs(out) ** 2).sum(axis=0)
        done += batch
    mean = total / samples
    se = np.sqrt(np.maximum(totsq / samples - np.abs(mean) ** 2, 0.0) / samples)
    ratio = np.abs(mean - closed) / np.maximum(se, 1e-12)

    elapsed = time.time() - t0
    worst = float(ratio.max())
    _verdict(4, "sampled Schur twirl vs closed form",
             worst < 3.0 and elapsed < 60.0,
             f"max deviation {worst:.2f} standard errors "
             f"over {samples} samples, {elapsed:.1f}s")


def test_criterion_05_optimizer_soundness():
    t0 = time.time()
    rng = generator(505)
    n = 2
    chi = random_density(n * n, rng, dims=(n, n))

    grad_worst = gradient_check(fef.f1_form(chi).objective(), samples=20, rng=rng)
    grad_worst = max(grad_worst, gradient_check(
        fef.f2_lower_form(chi).objective(), samples=20, rng=rng))
    om_form, v_form = fef.f2_full_block_forms(
        chi, haar_unitary(n * n, rng), haar_unitary(n * n, rng))
    grad_worst = max(grad_worst, gradient_check(om_form.objective(),
                                                samples=20, rng=rng))
    grad_worst = max(grad_worst, gradient_check(v_form.objective(),
                                                samples=20, rng=rng))

    dip = 0.0
    unit = 0.0
    for form in (fef.f1_form(chi), fef.f2_lower_form(chi), om_form):
        res = maximize(form.objective(), OptimizerConfig(restarts=4, seed=5))
        for trace in res.traces:
            if len(trace) > 1:
                dip = min(dip, float(np.diff(trace[:, 0]).min()))
        u = res.maximizer
        unit = max(unit, np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())

    elapsed = time.time() - t0
    ok = grad_worst < 1e-5 and dip > -1e-12 and unit < 1e-8 and elapsed < 120.0
    _verdict(5, "optimizer soundness", ok,
             f"gradient error {grad_worst:.2e}, worst dip {dip:.1e}, "
             f"unitarity {unit:.2e}, {elapsed:.1f}s")


def test_criterion_06_f1_oracles():
    t0 = time.time()
    rng = generator(606)

    iso_dev = 0.0
    for n in (2, 3):
        for p in (0.0, 0.25, 0.5, 0.75, 1.0):
            rep = fef.fef_f1(fef.isotropic_state(n, p))
            iso_dev = max(iso_dev, abs(rep.value - fef.isotropic_f1(n, p)))

    pure_dev = 0.0
    for n in (2, 3):
        for _ in range(10):
            lam = rng.dirichlet(np.ones(n))
            base = np.zeros(n * n, dtype=np.complex128)
            for i in range(n):
                base[i * n + i] = np.sqrt(lam[i])
            vec = kron(haar_unitary(n, rng), haar_unitary(n, rng)) @ base
            chi = DensityMatrix(np.outer(vec, vec.conj()), (n, n))
            expected = float(np.sqrt(lam).sum() ** 2 / n)
            rep = fef.fef_f1(chi)
            pure_dev = max(pure_dev, abs(rep.value - expected))
            pure_dev = max(pure_dev, abs(fef.pure_f1(vec) - expected))

    magic_dev = 0.0
    for _ in range(50):
        chi = random_density(4, rng, dims=(2, 2))
        rep = fef.fef_f1(chi)
        magic_dev = max(magic_dev, abs(rep.value - fef.magic_f1(chi)))

    elapsed = time.time() - t0
    ok = (iso_dev < 1e-6 and pure_dev < 1e-6 and magic_dev < 1e-6
          and elapsed < 300.0)
    _verdict(6, "analytic fraction oracles", ok,
             f"isotropic {iso_dev:.2e}, pure {pure_dev:.2e}, "
             f"magic-basis {magic_dev:.2e}, {elapsed:.1f}s")


def test_criterion_07_gap_experiment(tmp_path):
    t0 = time.time()
    records2 = fef.df_experiment(2, 100, 42)
    records3 = fef.df_experiment(3, 50, 42)

    floor = min(r.df for r in records2 + records3)
    hits2 = sum(1 for r in records2 if r.df > 1e-3)
    hits3 = sum(1 for r in records3 if r.df > 1e-3)

    out = tmp_path / "df-scatter.csv"
    write_records(records2 + records3, str(out))
    back = read_records(str(out))

    elapsed = time.time() - t0
    ok = (floor >= -1e-6 and hits2 >= 1 and hits3 >= 1
          and len(back) == 150 and elapsed < 1800.0)
    _verdict(7, "two-copy gap experiment", ok,
             f"floor {floor:.1e}, gap states n=2: {hits2}, n=3: {hits3}, "
             f"csv rows {len(back)}, {elapsed:.0f}s")


def test_criterion_08_boundary_values():
    t0 = time.time()
    dev_mixed = 0.0
    dev_ent = 0.0
    for n in (2, 3):
        mixed = DensityMatrix(np.eye(n * n) / n ** 2, (n, n))
        dev_mixed = max(dev_mixed,
                        abs(fef.fef_f2_lower(mixed).value - 1.0 / n ** 2))
        dev_ent = max(dev_ent, abs(fef.fef_f2_lower(_max_ent(n)).value - 1.0))
    elapsed = time.time() - t0
    ok = dev_mixed < 1e-8 and dev_ent < 1e-6 and elapsed < 60.0
    _verdict(8, "boundary values of the two-copy bound", ok,
             f"mixed {dev_mixed:.2e}, entangled {dev_ent:.2e}, {elapsed:.1f}s")


def test_criterion_09_mc_consistency_of_optimized_channels():
    t0 = time.time()
    rng = generator(909)
    samples = 100_000
    worst = 0.0

    for n in (2, 3):
        chi = random_density(n * n, rng, dims=(n, n))
        rep = fef.fef_f2_full(chi)
        spec = ChannelSpec(TWO_CHANNEL_BELL, n,
                           alice_op=rep.maximizers["omega"],
                           bob_op=rep.maximizers["v"])
        mc, se = channels.average_fidelity_mc(spec, chi, samples=samples,
                                              rng=generator(90 + n))
        expected = (n * rep.value + 1.0) / (n + 1.0)
        assert abs(rep.optimal_fidelity - expected) < 1e-12
        worst = max(worst, abs(mc - expected) / se)

    chi = random_density(4, rng, dims=(2, 2))
    rep = fef.fef_f2_ghz(chi)
    family = CorrectionFamily("ghz", 2, rep.maximizers["t"])
    spec = ChannelSpec(TWO_CHANNEL_GHZ, 2, alice_op=rep.maximizers["w"],
                       corrections=family)
    mc, se = channels.average_fidelity_mc(spec, chi, samples=samples,
                                          rng=generator(99))
    expected = (2.0 * rep.value + 1.0) / 3.0
    worst = max(worst, abs(mc - expected) / se)

    elapsed = time.time() - t0
    _verdict(9, "closed-form fidelity of optimized channels",
             worst < 3.0 and elapsed < 600.0,
             f"max deviation {worst:.2f} standard errors "
             f"over {samples} samples, {elapsed:.0f}s")


def test_criterion_10_mixing_and_local_unitary_structure():
    t0 = time.time()
    cfg = OptimizerConfig(restarts=4, seed=10)
    rng = generator(1010)

    min_slack = np.inf
    for _ in range(20):
        chi_a = random_density(4, rng, dims=(2, 2))
        chi_b = random_density(4, rng, dims=(2, 2))
        report = fef.convexity_probe(chi_a, chi_b, xi_grid=(0.25, 0.5, 0.75),
                                     config=cfg, rng=rng)
        min_slack = min(min_slack, report.min_slack)

    drift = 0.0
    for _ in range(20):
        chi = random_density(4, rng, dims=(2, 2))
        u = haar_unitary(2, rng)
        v = haar_unitary(2, rng)
        uv = kron(u, v)
        moved = DensityMatrix(uv @ chi.mat @ uv.conj().T, (2, 2))

        rep_a = fef.fef_f2_lower(chi, cfg, rng=rng)
        rep_b = fef.fef_f2_lower(
            moved, cfg, rng=rng,
            warm_starts=(fef.transport_lower_maximizer(
                rep_a.maximizers["omega"], u, v),))
        rep_a2 = fef.fef_f2_lower(
            chi, cfg, rng=rng,
            warm_starts=(fef.transport_lower_maximizer(
                rep_b.maximizers["omega"], u.conj().T, v.conj().T),))
        drift = max(drift, abs(rep_a2.value - rep_b.value))

    elapsed = time.time() - t0
    ok = min_slack >= -1e-4 and drift < 1e-4 and elapsed < 900.0
    _verdict(10, "mixing slack and local-unitary invariance", ok,
             f"min slack {min_slack:.1e}, max drift {drift:.1e}, {elapsed:.0f}s")
