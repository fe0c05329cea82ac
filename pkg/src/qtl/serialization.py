"""File formats: density matrices, channel specs, maximizers, CSV tables.

All structured data is JSON with complex matrices stored as separate
"re"/"im" nested lists (row-major).  Floats go through repr, so matrix
files round-trip bit-exactly; CSV tables carry 12 significant digits.
Writers emit a canonical byte stream (sorted keys, fixed separators,
trailing newline) so identical inputs produce identical files.
"""
from __future__ import annotations

import json
import os

import numpy as np

from .channels import ChannelSpec, CorrectionFamily
from .states import DensityMatrix, ValidationError

CSV_HEADER = "n,seed,F1,F2,dF,f1_opt,f2_opt,iters_f1,iters_f2"
TRACE_HEADER = "restart,iteration,value,grad_norm"


def _mat_to_json(mat) -> dict:
    mat = np.asarray(mat, dtype=np.complex128)
    return {"re": mat.real.tolist(), "im": mat.imag.tolist()}


def _mat_from_json(obj, field: str) -> np.ndarray:
    if not isinstance(obj, dict) or "re" not in obj or "im" not in obj:
        raise ValidationError(field, "expected an object with 're' and 'im' arrays")
    try:
        re = np.asarray(obj["re"], dtype=np.float64)
        im = np.asarray(obj["im"], dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ValidationError(field, f"non-numeric matrix data: {exc}") from None
    if re.shape != im.shape or re.ndim != 2:
        raise ValidationError(field, f"re/im shapes {re.shape} vs {im.shape} unusable")
    return re + 1j * im


def _dump(payload: dict, path: str):
    text = json.dumps(payload, sort_keys=True, separators=(",", ": "), indent=1)
    with open(path, "w") as fh:
        fh.write(text + "\n")


def _load(path: str) -> dict:
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError("json", f"{path}: {exc}") from None
    if not isinstance(payload, dict):
        raise ValidationError("json", f"{path}: top level must be an object")
    return payload


# ---------------------------------------------------------------------------
# density matrices


def save_density(state: DensityMatrix, path: str):
    payload = {"dims": list(state.dims)}
    payload.update(_mat_to_json(state.mat))
    _dump(payload, path)


def load_density(path: str) -> DensityMatrix:
    """Parse and fully validate a density-matrix file."""
    payload = _load(path)
    if "dims" not in payload:
        raise ValidationError("dims", "missing 'dims' field")
    dims = payload["dims"]
    if (not isinstance(dims, list) or not dims
            or not all(isinstance(d, int) and d >= 1 for d in dims)):
        raise ValidationError("dims", f"'dims' must be positive integers, got {dims!r}")
    mat = _mat_from_json(payload, "matrix")
    return DensityMatrix(mat, tuple(dims))


# ---------------------------------------------------------------------------
# channel specs


def _table_to_json(table: dict) -> dict:
    return {",".join(str(i) for i in key): _mat_to_json(op)
            for key, op in sorted(table.items())}


def _table_from_json(obj, field: str) -> dict:
    if not isinstance(obj, dict):
        raise ValidationError(field, "correction table must be an object")
    table = {}
    for key, val in obj.items():
        try:
            idx = tuple(int(p) for p in key.split(","))
        except ValueError:
            raise ValidationError(field, f"bad outcome label {key!r}") from None
        table[idx] = _mat_from_json(val, f"{field}[{key}]")
    return table


def save_channel_spec(spec: ChannelSpec, path: str):
    payload = {"protocol": spec.protocol, "n": spec.n}
    if spec.alice_op is not None:
        payload["alice_op"] = _mat_to_json(spec.alice_op)
    if spec.bob_op is not None:
        payload["bob_op"] = _mat_to_json(spec.bob_op)
    if spec.corrections is not None:
        payload["corrections"] = {
            "kind": spec.corrections.kind,
            "n": spec.corrections.n,
            "table": _table_to_json(spec.corrections.table),
        }
    _dump(payload, path)


def load_channel_spec(path: str) -> ChannelSpec:
    payload = _load(path)
    for fieldname in ("protocol", "n"):
        if fieldname not in payload:
            raise ValidationError(fieldname, f"missing '{fieldname}' field")
    if not isinstance(payload["n"], int):
        raise ValidationError("n", f"'n' must be an integer, got {payload['n']!r}")
    corrections = None
    if "corrections" in payload and payload["corrections"] is not None:
        block = payload["corrections"]
        if not isinstance(block, dict) or "kind" not in block or "table" not in block:
            raise ValidationError("corrections", "expected object with 'kind' and 'table'")
        corrections = CorrectionFamily(
            kind=block["kind"],
            n=int(block.get("n", payload["n"])),
            table=_table_from_json(block["table"], "corrections"),
        )
    alice = payload.get("alice_op")
    bob = payload.get("bob_op")
    return ChannelSpec(
        protocol=payload["protocol"],
        n=payload["n"],
        alice_op=None if alice is None else _mat_from_json(alice, "alice_op"),
        bob_op=None if bob is None else _mat_from_json(bob, "bob_op"),
        corrections=corrections,
    )


# ---------------------------------------------------------------------------
# maximizer bundles


def save_maximizers(report, path: str):
    """Write a FefReport's maximizers with its headline numbers."""
    maxi = {}
    for name, val in report.maximizers.items():
        if isinstance(val, dict):
            maxi[name] = _table_to_json(val)
        else:
            maxi[name] = _mat_to_json(val)
    _dump({
        "kind": report.kind,
        "n": report.n,
        "value": report.value,
        "optimal_fidelity": report.optimal_fidelity,
        "useful": report.useful,
        "iterations": report.iterations,
        "converged": report.converged,
        "maximizers": maxi,
    }, path)


def load_maximizers(path: str) -> dict:
    """Load a maximizer bundle back; matrices and tables as numpy data."""
    payload = _load(path)
    if "maximizers" not in payload or not isinstance(payload["maximizers"], dict):
        raise ValidationError("maximizers", "missing 'maximizers' object")
    out = dict(payload)
    maxi = {}
    for name, val in payload["maximizers"].items():
        if isinstance(val, dict) and "re" in val:
            maxi[name] = _mat_from_json(val, name)
        else:
            maxi[name] = _table_from_json(val, name)
    out["maximizers"] = maxi
    return out


# ---------------------------------------------------------------------------
# CSV tables


def _g12(x: float) -> str:
    return f"{float(x):.12g}"


def format_records(records) -> str:
    lines = [CSV_HEADER]
    for r in records:
        lines.append(",".join([
            str(r.n), str(r.seed),
            _g12(r.f1), _g12(r.f2), _g12(r.df),
            _g12(r.fidelity_f1), _g12(r.fidelity_f2),
            str(r.iterations_f1), str(r.iterations_f2),
        ]))
    return "\n".join(lines) + "\n"


def write_records(records, path: str):
    with open(path, "w") as fh:
        fh.write(format_records(records))


def read_records(path: str) -> list:
    """Rows back as ExperimentRecords (values at CSV precision)."""
    from .fef import ExperimentRecord
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln]
    if not lines or lines[0] != CSV_HEADER:
        raise ValidationError("header", f"expected '{CSV_HEADER}'")
    records = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 9:
            raise ValidationError("row", f"expected 9 fields, got {len(parts)}")
        f1, f2 = float(parts[2]), float(parts[3])
        # df is recomputed so the record invariant holds exactly despite
        # column-wise rounding; the stored column is only sanity-checked
        if abs(float(parts[4]) - (f2 - f1)) > 1e-9:
            raise ValidationError("dF", f"inconsistent dF column in row {ln!r}")
        records.append(ExperimentRecord(
            n=int(parts[0]), seed=int(parts[1]), f1=f1, f2=f2,
            df=f2 - f1,
            fidelity_f1=float(parts[5]), fidelity_f2=float(parts[6]),
            iterations_f1=int(parts[7]), iterations_f2=int(parts[8])))
    return records


def write_trace(result, path: str):
    """Optimizer trace CSV: one row per iterate of each restart."""
    lines = [TRACE_HEADER]
    for restart, trace in enumerate(result.traces):
        for it, (value, grad_norm) in enumerate(np.asarray(trace)):
            lines.append(f"{restart},{it},{_g12(value)},{_g12(grad_norm)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
