"""JSON model files, CSV measurement files and atomic writes."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import ContractError
from .model import ContinuousModel, DescriptorModel, UncertaintyWeights


def _depth(x) -> int:
    d = 0
    while isinstance(x, (list, tuple)):
        if not x:
            return d + 1
        x = x[0]
        d += 1
    return d


def _matrix_seq(value, count, name, broadcast):
    """A list of `count` matrices, or one matrix repeated when `broadcast`."""
    if count == 0 and value == []:
        return []
    depth = _depth(value)
    if depth <= 2:
        if not broadcast:
            raise ContractError(f"{name}: expected a list of {count} matrices")
        return [value] * count
    if len(value) != count:
        raise ContractError(f"{name}: expected {count} matrices, got {len(value)}")
    return list(value)


def model_from_dict(doc: dict):
    """Build ``(DescriptorModel, UncertaintyWeights)`` from the JSON schema."""
    try:
        N = int(doc["N"])
        ti = bool(doc.get("time_invariant", False))
        F = doc["F"]
        if ti and _depth(F) <= 2:
            F = [F] * (N + 1)
        F = _matrix_seq(F, N + 1, "F", ti)
        C = _matrix_seq(doc["C"], N, "C", ti)
        H = _matrix_seq(doc["H"], N + 1, "H", ti)
        S_seq = _matrix_seq(doc["S_seq"], N, "S_seq", ti)
        R_seq = _matrix_seq(doc["R_seq"], N + 1, "R_seq", ti)
        model = DescriptorModel(F, C, H, time_invariant=ti)
        w = UncertaintyWeights(doc["S"], S_seq, R_seq)
    except KeyError as exc:
        raise ContractError(f"model file is missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ContractError(f"model file is malformed: {exc}") from exc
    if "n" in doc and int(doc["n"]) != model.n:
        raise ContractError(f"model declares n={doc['n']} but matrices have {model.n} columns")
    return model, w


def _uniform(seq):
    return len(seq) > 0 and all(np.array_equal(a, seq[0]) for a in seq)


def model_to_dict(model: DescriptorModel, w: UncertaintyWeights) -> dict:
    seqs = {"F": model.F, "C": model.C, "H": model.H, "S_seq": w.S_seq, "R_seq": w.R_seq}
    broadcast = model.time_invariant and all(_uniform(v) for v in seqs.values())
    doc = {"n": model.n, "N": model.N, "time_invariant": broadcast}
    for name, seq in seqs.items():
        doc[name] = seq[0].tolist() if broadcast else [a.tolist() for a in seq]
    doc["S"] = w.S.tolist()
    return doc


def load_json(path):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ContractError(f"{path}: invalid JSON ({exc})") from exc


def load_model(path):
    return model_from_dict(load_json(path))


def _read_rows(path, key):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows or rows[0][0].strip() != key:
        raise ContractError(f"{path}: expected a header starting with '{key}'")
    out = []
    try:
        for row in rows[1:]:
            vals = [float(v) for v in row if v.strip() != ""]
            out.append((vals[0], np.array(vals[1:])))
    except (ValueError, IndexError) as exc:
        raise ContractError(f"{path}: malformed row ({exc})") from exc
    return out


def read_measurements(path) -> list:
    """Discrete record: header ``k,y0,y1,...``, one row per step."""
    rows = _read_rows(path, "k")
    ks = [int(k) for k, _ in rows]
    if ks != list(range(len(ks))):
        raise ContractError(f"{path}: rows must be k = 0, 1, 2, ... in order")
    return [y for _, y in rows]


def read_continuous_measurements(path):
    """Grid record: header ``t,y0,y1,...``; returns ``(t, Y)``."""
    rows = _read_rows(path, "t")
    t = np.array([t for t, _ in rows])
    try:
        Y = np.stack([y for _, y in rows])
    except ValueError as exc:
        raise ContractError(f"{path}: rows have different lengths") from exc
    return t, Y


def _fmt(x) -> str:
    return repr(float(x))


def measurements_csv(y, key="k", keys=None) -> str:
    width = max((np.size(v) for v in y), default=0)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow([key] + [f"y{i}" for i in range(width)])
    for i, v in enumerate(y):
        label = i if keys is None else _fmt(keys[i])
        wr.writerow([label] + [_fmt(c) for c in np.atleast_1d(v)])
    return buf.getvalue()


def continuous_model_from_dict(doc: dict):
    """Continuous model JSON -> ``(ContinuousModel, K)``.

    Time-indexed fields hold ``K+1`` samples on the uniform grid.
    """
    try:
        K = int(doc["K"])
        kw = {"F": doc["F"], "C": np.asarray(doc["C"], dtype=float),
              "t0": float(doc["t0"]), "T": float(doc["T"])}
        for name in ("H", "Q0", "Q1", "Q2", "ell"):
            if doc.get(name) is not None:
                kw[name] = np.asarray(doc[name], dtype=float)
    except KeyError as exc:
        raise ContractError(f"continuous model file is missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ContractError(f"continuous model file is malformed: {exc}") from exc
    for name in ("C", "H", "Q1", "Q2"):
        arr = kw.get(name)
        if arr is not None and arr.ndim == 3 and arr.shape[0] != K + 1:
            raise ContractError(f"{name}: expected K+1={K + 1} samples, got {arr.shape[0]}")
    ell = kw.get("ell")
    if ell is not None and ell.ndim == 2 and ell.shape[0] != K + 1:
        raise ContractError(f"ell: expected K+1={K + 1} samples, got {ell.shape[0]}")
    return ContinuousModel(**kw), K


def dumps(doc) -> str:
    """JSON text; floats use the shortest repr that round-trips exactly."""
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def atomic_write(path, text: str) -> None:
    """Write via a temporary file in the same directory and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
