import csv
import io
import json

import numpy as np
import pytest

from krylovgap import InvalidArgument, is_h_compatible, thin_svd
from krylovgap.harness import (
    CSV_COLUMNS, ExperimentConfig, generate_guess, generate_test_matrix, parse_spectrum,
    run_sweep, trial_rng,
)


def test_parse_spectrum():
    assert parse_spectrum("3,2*3,1").tolist() == [3, 2, 2, 2, 1]
    assert parse_spectrum([2, 1]).tolist() == [2, 1]
    for bad in ("", "3,x", "1,2", "2*0", "-1"):
        with pytest.raises(InvalidArgument):
            parse_spectrum(bad)


@pytest.mark.parametrize("spec,m,n", [("3,2*3,1", 9, 7), ("5,1e-3,1e-3", 3, 3), ("2,1", 6, 4)])
def test_generated_spectrum(spec, m, n):
    A = generate_test_matrix(spec, m, n, 4)
    s = np.linalg.svd(A, compute_uv=False)
    want = np.zeros(min(m, n))
    want[: len(parse_spectrum(spec))] = parse_spectrum(spec)
    assert np.max(np.abs(s - want)) <= 1e-12 * max(1.0, want[0])


def test_generation_deterministic():
    a = generate_test_matrix("3,2,1", 5, 4, 9)
    b = generate_test_matrix("3,2,1", 5, 4, 9)
    assert a.tobytes() == b.tobytes()
    assert a.tobytes() != generate_test_matrix("3,2,1", 5, 4, 10).tobytes()
    assert trial_rng(1, 2, 0).random() == trial_rng(1, 2, 0).random()


def test_unit_spectrum_orthogonal():
    Q = generate_test_matrix("1*5", 5, 5, 2)
    assert np.allclose(Q.T @ Q, np.eye(5), atol=1e-13)


def test_guess_modes():
    svd = thin_svd(np.diag([3.0, 2.0, 2.0, 1.0]))
    X = generate_guess(svd, 2, "exact-dominant")
    assert np.allclose(np.abs(X), np.eye(4)[:, :2])
    X = generate_guess(svd, 2, "perturbed", 0, eps=1e-6)
    assert np.allclose(np.linalg.norm(X, axis=0), 1) and np.allclose(np.abs(X), np.eye(4)[:, :2], atol=1e-5)
    assert generate_guess(svd, 2, "random", 0, r=3).shape == (4, 3)
    with pytest.raises(InvalidArgument):
        generate_guess(svd, 2, "bogus")


def test_adversarial_guess_incompatible():
    svd = thin_svd(np.diag([2.0, 2.0, 1.0]))
    for seed in range(5):
        X = generate_guess(svd, 1, "adversarial-orthogonal", seed)
        assert not is_h_compatible(svd, X, 1).compatible


def test_random_guess_compatible():
    hits = 0
    for seed in range(200):
        A = generate_test_matrix("3,2*3,1", 8, 6, seed)
        svd = thin_svd(A)
        X = generate_guess(svd, 2, "random", seed + 1000)
        hits += is_h_compatible(svd, X, 2).compatible
    assert hits == 200


def _cfg(**kw):
    base = dict(spectrum="3,2*3,1,0.5", m=10, n=8, h=2, q_grid=[0, 1, 2], t_grid=[0, 1],
                trials=4, seed=5)
    base.update(kw)
    return ExperimentConfig.from_dict(base)


def test_sweep_rows_and_agreement(tmp_path):
    cfg = _cfg(json_path=str(tmp_path / "r.json"), csv_path=str(tmp_path / "r.csv"))
    rep = run_sweep(cfg)
    assert rep["summary"]["violations"] == 0
    rows = list(csv.DictReader(io.StringIO((tmp_path / "r.csv").read_text())))
    assert len(rows) == 24 and tuple(rows[0]) == CSV_COLUMNS
    assert [(int(r["q"]), int(r["t"])) for r in rows] == sorted((int(r["q"]), int(r["t"])) for r in rows)
    data = json.loads((tmp_path / "r.json").read_text())
    assert data["schema"] == "krylovgap.sweep/1"
    for r in rows:
        tr = next(t for t in data["trials"] if t["seed"] == int(r["seed"]))
        pt = next(p for p in tr["points"] if p["q"] == int(r["q"]) and p["t"] == int(r["t"]))
        t34 = next(c for c in pt["certificates"] if c["theorem"] == "T34")
        assert float(r["rhs2"]) == t34["rhs2"] and float(r["lhsF"]) == t34["lhsF"]
        assert int(r["violations"]) == pt["violations"]


def test_sweep_byte_identical():
    a = run_sweep(_cfg())
    b = run_sweep(_cfg())
    c = run_sweep(_cfg(), threads=3)
    assert a["_json"] == b["_json"] == c["_json"]
    assert a["_csv"] == b["_csv"] == c["_csv"]
    assert run_sweep(_cfg(seed=6))["_csv"] != a["_csv"]


def test_threads_env(monkeypatch):
    monkeypatch.setenv("KRYLOVGAP_THREADS", "2")
    assert run_sweep(_cfg(trials=2))["summary"]["trials"] == 2
    monkeypatch.setenv("KRYLOVGAP_THREADS", "two")
    with pytest.raises(InvalidArgument):
        run_sweep(_cfg(trials=1))


def test_incompatible_sweep_rows():
    rep = run_sweep(_cfg(spectrum="2,2,1", m=4, n=3, h=1, guess_mode="adversarial-orthogonal",
                         trials=2))
    assert rep["summary"]["incompatible_trials"] == 2
    rows = list(csv.DictReader(io.StringIO(rep["_csv"])))
    assert len(rows) == 12 and all(r["rhs2"] == "" for r in rows)


@pytest.mark.parametrize("bad", [
    {"q_grid": []}, {"t_grid": [-1]}, {"trials": 0}, {"guess_mode": "x"}, {"h": 9},
    {"theta0": 2.0}, {"spectrum": "1*20"}, {"bogus": 1},
])
def test_config_validation(bad):
    with pytest.raises(InvalidArgument):
        _cfg(**bad)


def test_config_from_json(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"spectrum": "2,1", "m": 3, "n": 2, "h": 1}))
    assert ExperimentConfig.from_json(p).h == 1
    p.write_text("{")
    with pytest.raises(InvalidArgument):
        ExperimentConfig.from_json(p)
    with pytest.raises(InvalidArgument):
        ExperimentConfig.from_json(tmp_path / "missing.json")
