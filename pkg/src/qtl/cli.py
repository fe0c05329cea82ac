"""Command-line interface.

Subcommands: ``basis`` (dump operator/state bases with orthogonality
residuals), ``simulate`` (run a teleportation channel on files),
``fef`` (maximize an entangled-fraction objective), ``df-scatter``
(emit the F1-vs-F2 experiment CSV), ``verify`` (self-check suites).

Everything is configured by flags; no environment variables are read.
Exit codes: 0 success, 1 verification-suite failure, 2 validation
failure, 3 optimizer non-convergence, 4 file IO failure.  Reruns with
identical flags produce byte-identical artifacts.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__, bases, channels, fef, serialization, verify
from .optimizer import OptimizerConfig
from .states import ValidationError

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_VALIDATION = 2
EXIT_NONCONVERGENCE = 3
EXIT_IO = 4

DEFAULT_SEED = 42
DEFAULT_SAMPLES = 20000


def _g12(x) -> str:
    return f"{float(x):.12g}"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtl",
        description="teleportation-fidelity laboratory for n-dimensional systems")
    parser.add_argument("--version", action="version", version=f"qtl {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_default):
        p.add_argument("--n", type=int, default=2, help="local dimension (default 2)")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                       help=f"PRNG seed (default {DEFAULT_SEED})")
        p.add_argument("--count", type=int, default=50,
                       help="number of random states (default 50)")
        p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES,
                       help=f"Monte-Carlo samples (default {DEFAULT_SAMPLES})")
        p.add_argument("--restarts", type=int, default=None,
                       help="optimizer restarts override")
        p.add_argument("--out", type=str, default=out_default,
                       help=f"output path (default {out_default})")
        p.add_argument("--in", dest="inputs", type=str, action="append", default=[],
                       help="input file path (repeatable)")

    p = sub.add_parser("basis", help="dump a basis family with residuals")
    p.add_argument("family", choices=["bell", "ghz", "weyl"])
    common(p, None)

    p = sub.add_parser("simulate", help="apply a teleportation channel to files")
    common(p, "qtl-simulate-out.json")

    p = sub.add_parser("fef", help="maximize an entangled-fraction objective")
    p.add_argument("kind", choices=["f1", "f2lower", "f2full", "f2ghz"])
    common(p, None)

    p = sub.add_parser("df-scatter", help="emit the F1 vs F2 scatter CSV")
    common(p, "qtl-df-scatter.csv")

    p = sub.add_parser("verify", help="run the self-check suites")
    p.add_argument("level", choices=["quick", "full"])
    common(p, None)
    return parser


def _warn_cost(n: int):
    if n >= 4:
        print(f"warning: n={n} optimizes over U({n * n}); this can take minutes",
              file=sys.stderr)


def _config(args) -> OptimizerConfig:
    if args.restarts is not None:
        return OptimizerConfig(restarts=args.restarts, seed=args.seed)
    return OptimizerConfig(seed=args.seed)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_basis(args) -> int:
    n = args.n
    fam = args.family
    if fam == "weyl":
        ops = {f"{s},{t}": bases.weyl_unitary(n, s, t)
               for s in range(n) for t in range(n)}
        keys = list(ops)
        worst = 0.0
        for i in keys:
            for j in keys:
                want = n if i == j else 0.0
                worst = max(worst, abs(np.trace(ops[i].conj().T @ ops[j]) - want))
        payload = {
            "family": "weyl", "n": n,
            "elements": {k: serialization._mat_to_json(v) for k, v in ops.items()},
            "orthogonality_residual": worst,
        }
    else:
        if fam == "bell":
            vecs = {f"{s},{t}": bases.bell_state(n, s, t)
                    for s in range(n) for t in range(n)}
        else:
            vecs = {f"{r},{m},{s}": bases.ghz_state(n, r, m, s)
                    for r in range(n) for m in range(n) for s in range(n)}
        stack = np.asarray(list(vecs.values()))
        gram = stack @ stack.conj().T
        worst = float(np.abs(gram - np.eye(len(vecs))).max())
        payload = {
            "family": fam, "n": n,
            "elements": {k: {"re": v.real.tolist(), "im": v.imag.tolist()}
                         for k, v in vecs.items()},
            "orthogonality_residual": worst,
        }
    text = json.dumps(payload, sort_keys=True, separators=(",", ": "), indent=1)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {len(payload['elements'])} elements to {args.out}")
    else:
        print(text)
    print(f"orthogonality residual: {_g12(worst)}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    if len(args.inputs) != 3:
        raise ValidationError(
            "inputs", "simulate needs three --in paths: channel spec, resource, input state")
    spec = serialization.load_channel_spec(args.inputs[0])
    chi = serialization.load_density(args.inputs[1])
    rho = serialization.load_density(args.inputs[2])
    out = channels.apply_channel(spec, chi, rho)

    trace_resid = abs(float(np.trace(out.mat).real) - 1.0)
    eigs = np.linalg.eigvalsh(out.mat)
    pos_resid = max(0.0, float(-eigs[0]))
    mc, se = channels.average_fidelity_mc(spec, chi, samples=args.samples,
                                          rng=np.random.default_rng(args.seed))
    serialization.save_density(out, args.out)
    print(f"output: {args.out}")
    print(f"trace residual: {_g12(trace_resid)}")
    print(f"positivity residual: {_g12(pos_resid)}")
    print(f"mc fidelity: {_g12(mc)} +- {_g12(se)}  ({args.samples} samples)")
    return EXIT_OK


_FEF_RUNNERS = {
    "f1": fef.fef_f1,
    "f2lower": fef.fef_f2_lower,
    "f2full": fef.fef_f2_full,
    "f2ghz": fef.fef_f2_ghz,
}


def _cmd_fef(args) -> int:
    if len(args.inputs) != 1:
        raise ValidationError("inputs", "fef needs exactly one --in resource-state path")
    chi = serialization.load_density(args.inputs[0])
    if len(chi.dims) != 2 or chi.dims[0] != chi.dims[1]:
        raise ValidationError("dims", f"resource must be bipartite n x n, got {chi.dims}")
    _warn_cost(chi.dims[0])
    cfg = _config(args)
    report = _FEF_RUNNERS[args.kind](chi, cfg)
    out = args.out or f"qtl-fef-{args.kind}.json"
    serialization.save_maximizers(report, out)
    print(f"kind: {report.kind}")
    print(f"n: {report.n}")
    print(f"value: {_g12(report.value)}")
    print(f"optimal fidelity: {_g12(report.optimal_fidelity)}")
    print(f"useful: {'true' if report.useful else 'false'}")
    print(f"iterations: {report.iterations}")
    print(f"converged: {'true' if report.converged else 'false'}")
    print(f"maximizers: {out}")
    return EXIT_OK if report.converged else EXIT_NONCONVERGENCE


def _cmd_df_scatter(args) -> int:
    _warn_cost(args.n)
    cfg = _config(args)
    records = fef.df_experiment(args.n, args.count, args.seed, cfg)
    serialization.write_records(records, args.out)
    positive = sum(r.df > 1e-3 for r in records)
    print(f"wrote {len(records)} records to {args.out}")
    if records:
        print(f"max dF: {_g12(max(r.df for r in records))}")
        print(f"records with dF > 1e-3: {positive}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    results, ok = verify.run(args.level, seed=args.seed)
    for r in results:
        print(r.line())
    print(f"verify {args.level}: {'PASS' if ok else 'FAIL'} "
          f"({sum(r.passed for r in results)}/{len(results)} checks)")
    return EXIT_OK if ok else EXIT_VERIFY


_COMMANDS = {
    "basis": _cmd_basis,
    "simulate": _cmd_simulate,
    "fef": _cmd_fef,
    "df-scatter": _cmd_df_scatter,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
