import json

import numpy as np
import pytest

from descest import cli, io
from descest.demo import demo_generate
from descest.errors import ContractError
from descest.model import DescriptorModel, UncertaintyWeights, validate


@pytest.fixture
def chain_files(tmp_path, scalar_chain):
    model, w, y = scalar_chain
    mpath, ypath = tmp_path / "model.json", tmp_path / "y.csv"
    mpath.write_text(io.dumps(io.model_to_dict(model, w)))
    ypath.write_text(io.measurements_csv(y))
    return mpath, ypath


def run_cli(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_model_round_trip(rng):
    from instances import random_instance

    model, w, y, _ = random_instance(rng, 3, 4, descriptor=True)
    doc = json.loads(io.dumps(io.model_to_dict(model, w)))
    model2, w2 = io.model_from_dict(doc)
    for a, b in zip(model.F + model.C + model.H, model2.F + model2.C + model2.H):
        np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(w.S, w2.S)


def test_time_invariant_broadcast():
    model = DescriptorModel.constant([[1.0]], [[0.5]], [[1.0]], 3)
    w = UncertaintyWeights.constant([[1.0]], [[2.0]], [[3.0]], 3)
    doc = io.model_to_dict(model, w)
    assert doc["time_invariant"] and doc["F"] == [[1.0]]
    model2, w2 = io.model_from_dict(doc)
    assert model2.N == 3 and len(w2.R_seq) == 4 and not validate(model2, w2)


def test_model_missing_field():
    with pytest.raises(ContractError, match="C"):
        io.model_from_dict({"N": 1, "time_invariant": True, "F": [[1.0]], "H": [[1.0]]})


def test_measurements_round_trip(tmp_path):
    y = [np.array([0.1, 1 / 3]), np.array([-2.0, 1e-300])]
    p = tmp_path / "y.csv"
    p.write_text(io.measurements_csv(y))
    back = io.read_measurements(p)
    for a, b in zip(y, back):
        np.testing.assert_array_equal(a, b)


def test_measurements_bad_order(tmp_path):
    p = tmp_path / "y.csv"
    p.write_text("k,y0\n1,0.0\n0,1.0\n")
    with pytest.raises(ContractError):
        io.read_measurements(p)


def test_cli_estimate_scalar_chain(capsys, chain_files):
    m, y = chain_files
    code, out, _ = run_cli(capsys, "estimate", "--model", m, "--measurements", y, "--direction", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["value"] == pytest.approx(0.6, abs=1e-12)
    assert doc["error"] == pytest.approx(0.6, abs=1e-12)
    assert doc["observable"] is True


def test_cli_estimate_all_basis_csv(capsys, chain_files):
    m, y = chain_files
    code, out, _ = run_cli(capsys, "estimate", "--model", m, "--measurements", y,
                           "--all-basis", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "i,value,error,observable"


def test_cli_index_noncausal(capsys, tmp_path):
    model = DescriptorModel([[[1.0]], [[0.0]]], [[[1.0]]], [[[1.0]], [[0.0]]])
    w = UncertaintyWeights([[1.0]], [[[1.0]]], [[[1.0]], [[1.0]]])
    m, y = tmp_path / "m.json", tmp_path / "y.csv"
    m.write_text(io.dumps(io.model_to_dict(model, w)))
    y.write_text(io.measurements_csv([[0.0], [0.0]]))
    code, out, _ = run_cli(capsys, "index", "--model", m, "--measurements", y)
    assert code == 0 and json.loads(out) == {"I_N": 0, "causal": False}


def test_cli_missing_model(capsys, tmp_path):
    missing = tmp_path / "nope.json"
    code, _, err = run_cli(capsys, "estimate", "--model", missing, "--measurements", missing)
    assert code == 2 and str(missing) in err


def test_cli_invalid_weights(capsys, tmp_path, scalar_chain):
    model, _, y = scalar_chain
    w = UncertaintyWeights([[1.0]], [[[-1.0]]], [[[1.0]], [[1.0]]])
    m, yp = tmp_path / "m.json", tmp_path / "y.csv"
    m.write_text(io.dumps(io.model_to_dict(model, w)))
    yp.write_text(io.measurements_csv(y))
    out = tmp_path / "out.json"
    code, _, err = run_cli(capsys, "ellipsoid", "--model", m, "--measurements", yp, "--out", out)
    assert code == 2 and "k=0" in err
    assert not out.exists()


def test_cli_outputs_deterministic(capsys, chain_files, tmp_path):
    m, y = chain_files
    texts = []
    for i in range(2):
        out = tmp_path / f"o{i}.json"
        assert run_cli(capsys, "oracle", "--model", m, "--measurements", y,
                       "--direction", "1", "--out", out)[0] == 0
        texts.append(out.read_bytes())
    assert texts[0] == texts[1]
    doc = json.loads(texts[0])
    assert doc["interval"] == pytest.approx([0.0, 1.2], abs=1e-12)
    assert doc["min_cost"] == pytest.approx(0.4, abs=1e-12)


def test_cli_ellipsoid_rank_deficient_radius(capsys, tmp_path):
    model = DescriptorModel.constant(np.eye(2), np.eye(2), [[1.0, 0.0]], 2)
    w = UncertaintyWeights.constant(np.diag([1.0, 0.0]) + 0.0, np.eye(2), [[1.0]], 2)
    m, y = tmp_path / "m.json", tmp_path / "y.csv"
    m.write_text(io.dumps(io.model_to_dict(model, w)))
    y.write_text(io.measurements_csv([[0.1]] * 3))
    code, out, _ = run_cli(capsys, "ellipsoid", "--model", m, "--measurements", y)
    assert code == 0 and json.loads(out)["radius"] == float("inf")


def test_cli_demo_files(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "demo", "--seed", "0", "--out", tmp_path)
    assert code == 0
    summary = json.loads(out)
    assert summary["estimate_beats_raw"] and summary["disturbance_cost"] <= 1.0
    model, w = io.load_model(tmp_path / "model.json")
    y = io.read_measurements(tmp_path / "measurements.csv")
    assert not validate(model, w) and len(y) == model.N + 1
    np.testing.assert_array_equal(np.concatenate(y), np.concatenate(demo_generate(0).y))
    assert json.loads((tmp_path / "summary.json").read_text()) == summary


def _continuous_doc(K=40, **extra):
    doc = {"F": [[1.0]], "C": [[0.0]], "t0": 0.0, "T": 1.0, "K": K, "ell": [1.0]}
    doc.update(extra)
    return doc


def test_cli_continuous_apriori(capsys, tmp_path):
    m = tmp_path / "c.json"
    m.write_text(json.dumps(_continuous_doc(K=400)))
    code, out, _ = run_cli(capsys, "continuous-apriori", "--model", m)
    assert code == 0
    assert json.loads(out)["sigma2"] == pytest.approx(0.567667, abs=5e-4)


def test_cli_continuous_aposteriori(capsys, tmp_path):
    m, y = tmp_path / "c.json", tmp_path / "y.csv"
    m.write_text(json.dumps(_continuous_doc(K=20)))
    t = np.linspace(0, 1, 21)
    y.write_text(io.measurements_csv([[v] for v in np.zeros(21)], key="t", keys=t))
    code, out, _ = run_cli(capsys, "continuous-aposteriori", "--model", m, "--measurements", y)
    assert code == 0 and json.loads(out)["estimate"] == 0.0


def test_cli_continuous_grid_mismatch(capsys, tmp_path):
    m, y = tmp_path / "c.json", tmp_path / "y.csv"
    m.write_text(json.dumps(_continuous_doc(K=20)))
    y.write_text(io.measurements_csv([[0.0]] * 5, key="t", keys=np.linspace(0, 1, 5)))
    code, _, err = run_cli(capsys, "continuous-aposteriori", "--model", m, "--measurements", y)
    assert code == 2 and "grid" in err


def test_cli_numerical_failure(capsys, tmp_path):
    m = tmp_path / "c.json"
    m.write_text(json.dumps(_continuous_doc(F=[[0.0]], H=[[0.0]])))
    code, _, err = run_cli(capsys, "continuous-apriori", "--model", m)
    assert code == 3 and "numerical" in err


def test_cli_requires_model(capsys):
    code, _, err = run_cli(capsys, "estimate")
    assert code == 2 and "--model" in err
