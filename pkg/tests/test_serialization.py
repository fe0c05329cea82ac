import json

import numpy as np
import pytest

from qtl.channels import (ChannelSpec, CorrectionFamily, ONE_CHANNEL_BELL,
                          TWO_CHANNEL_BELL, TWO_CHANNEL_GHZ)
from qtl.fef import ExperimentRecord, fef_f1, fef_f2_ghz
from qtl.optimizer import OptimizerConfig, maximize
from qtl.forms import QuadForm
from qtl.serialization import (CSV_HEADER, TRACE_HEADER, format_records,
                               load_channel_spec, load_density,
                               load_maximizers, read_records, save_channel_spec,
                               save_density, save_maximizers, write_records,
                               write_trace)
from qtl.states import DensityMatrix, ValidationError

import oracles


def test_density_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    path = str(tmp_path / "chi.json")
    for dims in ((4,), (2, 2), (2, 3)):
        d = int(np.prod(dims))
        state = DensityMatrix(oracles.rand_density(d, rng), dims)
        save_density(state, path)
        back = load_density(path)
        assert back.dims == dims
        assert np.array_equal(back.mat, state.mat)


def test_density_file_layout(tmp_path):
    path = str(tmp_path / "rho.json")
    save_density(DensityMatrix(np.eye(2) / 2, (2,)), path)
    payload = json.loads(open(path).read())
    assert set(payload) == {"dims", "re", "im"}
    assert payload["dims"] == [2]
    assert payload["re"] == [[0.5, 0.0], [0.0, 0.5]]
    assert payload["im"] == [[0.0, 0.0], [0.0, 0.0]]
    # canonical bytes: rewriting produces the identical file
    first = open(path, "rb").read()
    save_density(DensityMatrix(np.eye(2) / 2, (2,)), path)
    assert open(path, "rb").read() == first
    assert first.endswith(b"\n")


def test_load_density_validation(tmp_path):
    path = str(tmp_path / "bad.json")
    with open(path, "w") as fh:
        fh.write("{not json")
    with pytest.raises(ValidationError) as err:
        load_density(path)
    assert err.value.field == "json"

    with open(path, "w") as fh:
        fh.write("[1, 2]\n")
    with pytest.raises(ValidationError) as err:
        load_density(path)
    assert err.value.field == "json"

    with open(path, "w") as fh:
        json.dump({"re": [[1.0]], "im": [[0.0]]}, fh)
    with pytest.raises(ValidationError) as err:
        load_density(path)
    assert err.value.field == "dims"

    with open(path, "w") as fh:
        json.dump({"dims": [2, 0], "re": [[1.0]], "im": [[0.0]]}, fh)
    with pytest.raises(ValidationError) as err:
        load_density(path)
    assert err.value.field == "dims"

    with open(path, "w") as fh:
        json.dump({"dims": [1], "re": [[1.0]]}, fh)
    with pytest.raises(ValidationError) as err:
        load_density(path)
    assert err.value.field == "matrix"

    # a parseable file still goes through full state validation
    mat = np.eye(2) * 0.7
    with open(path, "w") as fh:
        json.dump({"dims": [2], "re": mat.tolist(), "im": (0 * mat).tolist()}, fh)
    with pytest.raises(ValidationError) as err:
        load_density(path)
    assert err.value.field == "trace"

    bad = [[0.5, 0.3], [0.1, 0.5]]
    with open(path, "w") as fh:
        json.dump({"dims": [2], "re": bad, "im": [[0.0, 0.0], [0.0, 0.0]]}, fh)
    with pytest.raises(ValidationError) as err:
        load_density(path)
    assert err.value.field == "hermiticity"


def test_channel_spec_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    path = str(tmp_path / "spec.json")

    plain = ChannelSpec(ONE_CHANNEL_BELL, 3)
    save_channel_spec(plain, path)
    back = load_channel_spec(path)
    assert back.protocol == ONE_CHANNEL_BELL
    assert back.n == 3
    assert back.alice_op is None and back.bob_op is None and back.corrections is None

    fam = CorrectionFamily(CorrectionFamily.BELL, 2,
                           {(s, t): oracles.haar(2, rng)
                            for s in range(2) for t in range(2)})
    spec = ChannelSpec(TWO_CHANNEL_BELL, 2, alice_op=oracles.haar(4, rng),
                       bob_op=oracles.haar(4, rng), corrections=fam)
    save_channel_spec(spec, path)
    back = load_channel_spec(path)
    assert np.array_equal(back.alice_op, spec.alice_op)
    assert np.array_equal(back.bob_op, spec.bob_op)
    assert back.corrections.kind == CorrectionFamily.BELL
    for k, op in fam.items():
        assert np.array_equal(back.corrections[k], op)

    gfam = CorrectionFamily(CorrectionFamily.GHZ, 2,
                            {(r, m, s): oracles.haar(4, rng)
                             for r in range(2) for m in range(2) for s in range(2)})
    gspec = ChannelSpec(TWO_CHANNEL_GHZ, 2, alice_op=oracles.haar(4, rng),
                        corrections=gfam)
    save_channel_spec(gspec, path)
    back = load_channel_spec(path)
    assert back.protocol == TWO_CHANNEL_GHZ
    for k, op in gfam.items():
        assert np.array_equal(back.corrections[k], op)


def test_load_channel_spec_validation(tmp_path):
    path = str(tmp_path / "spec.json")
    with open(path, "w") as fh:
        json.dump({"n": 2}, fh)
    with pytest.raises(ValidationError) as err:
        load_channel_spec(path)
    assert err.value.field == "protocol"

    with open(path, "w") as fh:
        json.dump({"protocol": ONE_CHANNEL_BELL}, fh)
    with pytest.raises(ValidationError) as err:
        load_channel_spec(path)
    assert err.value.field == "n"

    with open(path, "w") as fh:
        json.dump({"protocol": ONE_CHANNEL_BELL, "n": "two"}, fh)
    with pytest.raises(ValidationError) as err:
        load_channel_spec(path)
    assert err.value.field == "n"

    with open(path, "w") as fh:
        json.dump({"protocol": "carrier-pigeon", "n": 2}, fh)
    with pytest.raises(ValidationError) as err:
        load_channel_spec(path)
    assert err.value.field == "protocol"

    with open(path, "w") as fh:
        json.dump({"protocol": TWO_CHANNEL_BELL, "n": 2,
                   "corrections": {"table": {}}}, fh)
    with pytest.raises(ValidationError) as err:
        load_channel_spec(path)
    assert err.value.field == "corrections"


def test_maximizer_bundle_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    path = str(tmp_path / "max.json")
    chi = oracles.rand_density(4, rng)
    rep = fef_f1(chi, OptimizerConfig(restarts=2, seed=0))
    save_maximizers(rep, path)
    back = load_maximizers(path)
    assert back["kind"] == "f1"
    assert back["n"] == 2
    assert back["value"] == rep.value
    assert back["optimal_fidelity"] == rep.optimal_fidelity
    assert back["useful"] == rep.useful
    assert back["iterations"] == rep.iterations
    assert back["converged"] == rep.converged
    assert np.array_equal(back["maximizers"]["u"], rep.maximizers["u"])


def test_maximizer_bundle_with_table(tmp_path):
    path = str(tmp_path / "ghz.json")
    rep = fef_f2_ghz(np.eye(4) / 4, OptimizerConfig(restarts=1, seed=1), rng=1)
    save_maximizers(rep, path)
    back = load_maximizers(path)
    assert np.array_equal(back["maximizers"]["w"], rep.maximizers["w"])
    table = back["maximizers"]["t"]
    assert sorted(table) == sorted(rep.maximizers["t"])
    for key, op in rep.maximizers["t"].items():
        assert np.array_equal(table[key], op)


def test_load_maximizers_validation(tmp_path):
    path = str(tmp_path / "max.json")
    with open(path, "w") as fh:
        json.dump({"kind": "f1"}, fh)
    with pytest.raises(ValidationError) as err:
        load_maximizers(path)
    assert err.value.field == "maximizers"


def _records():
    return [
        ExperimentRecord(n=2, seed=42, f1=0.3333333333333333, f2=0.39778,
                         df=0.39778 - 0.3333333333333333,
                         fidelity_f1=(2 * 0.3333333333333333 + 1) / 3,
                         fidelity_f2=(2 * 0.39778 + 1) / 3,
                         iterations_f1=120, iterations_f2=450),
        ExperimentRecord(n=2, seed=43, f1=0.25, f2=0.25, df=0.0,
                         fidelity_f1=0.5, fidelity_f2=0.5,
                         iterations_f1=80, iterations_f2=90),
    ]


def test_records_csv_round_trip(tmp_path):
    path = str(tmp_path / "scatter.csv")
    records = _records()
    write_records(records, path)
    text = open(path).read()
    lines = text.splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 3
    # 12 significant digits per float column
    assert lines[1].split(",")[2] == "0.333333333333"
    back = read_records(path)
    assert len(back) == 2
    for orig, b in zip(records, back):
        assert b.n == orig.n and b.seed == orig.seed
        assert abs(b.f1 - orig.f1) < 1e-11
        assert abs(b.f2 - orig.f2) < 1e-11
        assert abs(b.df - (b.f2 - b.f1)) < 1e-15
        assert b.iterations_f1 == orig.iterations_f1
    # canonical bytes on rewrite
    write_records(back, path)
    assert format_records(back) == open(path).read()


def test_read_records_validation(tmp_path):
    path = str(tmp_path / "scatter.csv")
    with open(path, "w") as fh:
        fh.write("wrong,header\n")
    with pytest.raises(ValidationError) as err:
        read_records(path)
    assert err.value.field == "header"

    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n2,1,0.5,0.5\n")
    with pytest.raises(ValidationError) as err:
        read_records(path)
    assert err.value.field == "row"

    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n2,1,0.5,0.6,0.2,0.6666,0.7333,5,9\n")
    with pytest.raises(ValidationError) as err:
        read_records(path)
    assert err.value.field == "dF"

    # empty table round-trips as header only
    write_records([], path)
    assert open(path).read() == CSV_HEADER + "\n"
    assert read_records(path) == []


def test_write_trace(tmp_path):
    rng = np.random.default_rng(3)
    chi = oracles.rand_density(4, rng)
    form = QuadForm(chi, np.outer(oracles.max_ent(2), oracles.max_ent(2).conj()), 2)
    res = maximize(form.objective(), OptimizerConfig(restarts=2, seed=2))
    path = str(tmp_path / "trace.csv")
    write_trace(res, path)
    lines = open(path).read().splitlines()
    assert lines[0] == TRACE_HEADER
    assert len(lines) == 1 + sum(len(t) for t in res.traces)
    restarts = {int(ln.split(",")[0]) for ln in lines[1:]}
    assert restarts == {0, 1}
    first = lines[1].split(",")
    assert first[1] == "0"
    assert float(first[2]) <= res.value + 1e-9
    assert float(first[3]) >= 0.0
