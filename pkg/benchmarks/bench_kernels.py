"""Micro and end-to-end timings for the two kernel backends.

Runs each hot kernel on problem sizes matching one-copy (X on U(n)) and
two-copy (X on U(n^2)) objectives, then times a full two-copy
maximization under each backend with identical seeds.  Values must agree
across backends to near machine precision; the script fails loudly if
they drift.

    python3 benchmarks/bench_kernels.py [--repeat 200]
"""
import argparse
import time

import numpy as np

from qtl import _kernels, fef
from qtl.optimizer import OptimizerConfig
from qtl.sampling import generator, haar_unitary, random_density


def _hermitian(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return a + a.conj().T


def _median_time(fn, repeat):
    best = []
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(repeat):
            fn()
        best.append((time.perf_counter() - t0) / repeat)
    return float(np.median(best))


def _cases(rng):
    cases = []
    for n in (2, 3, 4):
        for label, d in ((f"n={n} one-copy", n), (f"n={n} two-copy", n * n)):
            m = n
            a = _hermitian(rng, m * d)
            b = _hermitian(rng, m * d)
            x = haar_unitary(d, rng)
            s = rng.normal(size=(d, d * d)) + 1j * rng.normal(size=(d, d * d))
            cases.append((label, a, b, x, m, s))
    return cases


def run_micro(repeat):
    rng = generator(0)
    rows = []
    for label, a, b, x, m, s in _cases(rng):
        for kernel, args in (("quad_value", (a, b, x, m)),
                             ("quad_value_grad", (a, b, x, m)),
                             ("trsq_value", (s, x)),
                             ("trsq_value_grad", (s, x))):
            fn = getattr(_kernels, kernel)
            times = {}
            values = {}
            for backend in _kernels.available_backends():
                _kernels.set_backend(backend)
                out = fn(*args)
                values[backend] = out[0] if isinstance(out, tuple) else out
                times[backend] = _median_time(lambda: fn(*args), repeat)
            vals = [complex(v) for v in values.values()]
            spread = max(abs(p - q) for p in vals for q in vals)
            if spread > 1e-9:
                raise SystemExit(f"backend disagreement in {kernel} ({label}): {spread}")
            rows.append((kernel, label, times))
    return rows


def run_end_to_end():
    rows = []
    for n in (2, 3):
        chi = random_density(n * n, generator(7), dims=(n, n))
        cfg = OptimizerConfig(restarts=4, seed=3)
        for backend in _kernels.available_backends():
            _kernels.set_backend(backend)
            t0 = time.perf_counter()
            rep = fef.fef_f2_lower(chi, cfg)
            rows.append((f"fef_f2_lower n={n}", backend,
                         time.perf_counter() - t0, rep.value))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=200,
                        help="calls per timing sample (default 200)")
    args = parser.parse_args()

    print(f"backends: {', '.join(_kernels.available_backends())}")
    print()
    print(f"{'kernel':<16} {'case':<16} {'pure':>10} {'compiled':>10} {'speedup':>8}")
    for kernel, label, times in run_micro(args.repeat):
        pure = times.get("pure", float("nan"))
        comp = times.get("compiled", float("nan"))
        ratio = pure / comp if comp and comp == comp else float("nan")
        print(f"{kernel:<16} {label:<16} {pure * 1e6:>8.1f}us {comp * 1e6:>8.1f}us"
              f" {ratio:>7.2f}x")

    print()
    print(f"{'end-to-end':<24} {'backend':<10} {'seconds':>8}   value")
    baseline = {}
    for label, backend, seconds, value in run_end_to_end():
        print(f"{label:<24} {backend:<10} {seconds:>8.3f}   {value:.12f}")
        if label in baseline and abs(baseline[label] - value) > 1e-9:
            raise SystemExit(f"end-to-end value drift in {label}")
        baseline[label] = value
    _kernels.set_backend("compiled" if "compiled" in _kernels.available_backends()
                         else "pure")


if __name__ == "__main__":
    main()
