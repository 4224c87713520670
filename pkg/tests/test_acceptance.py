"""One pass/fail check per acceptance criterion, at full size and pinned tolerances."""

import math
import time

import pytest

from ncsp.experiments import dumps, run_suite

pytestmark = pytest.mark.slow


def _failures(rep):
    return [r for r in rep["rows"] if r.get("ok") is False]


def test_01_scalar_collapse():
    t0 = time.perf_counter()
    rep = run_suite("scalar-collapse", samples=40)
    elapsed = time.perf_counter() - t0
    rows = rep["rows"]
    assert len(rows) == 40
    assert len({r["p"] for r in rows}) == 5
    assert all(1 <= r["m"] <= 4 for r in rows)
    for r in rows:
        assert r["lower"] * (1 - 1e-9) <= r["schatten"] <= r["upper"] * (1 + 1e-9)
        assert r["ratio"] <= 1.001
    assert rep["passed"], _failures(rep)
    assert elapsed <= 120


def test_02_endpoint_exactness():
    rep = run_suite("endpoints", samples=100)
    assert len(rep["rows"]) == 100
    assert {r["space"] for r in rep["rows"]} == {"diag:2", "full:2", "column:3", "row:3"}
    assert all(r["error"] <= 1e-10 * max(1.0, r["ambient"]) for r in rep["rows"])
    assert rep["passed"]


def test_03_haagerup_endpoints():
    rep = run_suite("haagerup-endpoints", samples=40, n_max=4)
    assert len(rep["rows"]) == 80
    assert all(r["gap"] <= 1e-2 for r in rep["rows"])
    assert rep["passed"], _failures(rep)


def test_04_theorem1():
    rep = run_suite("theorem1", samples=20)
    assert len(rep["rows"]) == 20
    assert all(r["gap"] <= 1e-3 for r in rep["rows"]), rep["summary"]
    assert rep["passed"]


def test_05_duality():
    rep = run_suite("duality", samples=20, fuzz=1000)
    tight = [r for r in rep["rows"] if r["kind"] == "tightness"]
    assert len(tight) == 60
    assert all(r["ratio"] >= 0.95 for r in tight)
    fuzz = [r for r in rep["rows"] if r["kind"] == "weak-duality"][0]
    assert fuzz["cases"] == 1000 and fuzz["violations"] == 0
    assert rep["passed"]


def test_06_fubini():
    rep = run_suite("fubini", samples=30, fuzz=200)
    reshape = [r for r in rep["rows"] if r["kind"] == "reshape"]
    assert len(reshape) == 30
    assert all(r["gap"] <= 2e-2 for r in reshape)
    inc = [r for r in rep["rows"] if r["kind"] == "inclusion"][0]
    assert inc["cases"] == 200 and inc["violations"] == 0
    assert rep["passed"]


def test_07_s2_is_oh():
    rep = run_suite("s2-oh", samples=30)
    level = [r for r in rep["rows"] if r["kind"] == "S2-level"]
    vec = [r for r in rep["rows"] if r["kind"] == "S2[OH]"]
    assert len(level) == 30 and len(vec) == 30
    assert all(r["rel_gap"] <= 5e-3 for r in level)
    assert all(r["rel_gap"] <= 1e-2 for r in vec)
    assert rep["passed"]


def test_08_pi2_identity():
    rep = run_suite("pi2-identity", timing=True)
    rows = {r["space"]: r for r in rep["rows"]}
    assert set(rows) == {"diag:2", "column:2", "row:2", "oh:2", "full:2"}
    for ref, r in rows.items():
        lo_req, up_req = (1.8, 2.3) if ref == "full:2" else (0.9 * math.sqrt(2), 1.15 * math.sqrt(2))
        assert r["lower"] >= lo_req, ref
        assert r["upper"] <= up_req, ref
        assert r["runtime"] <= 600, ref
    assert rep["passed"]


def test_09_hs_coincidence():
    rep = run_suite("hs-oh", samples=20)
    assert len(rep["rows"]) == 20
    for r in rep["rows"]:
        assert r["lower"] <= r["hs"] * (1 + 1e-6) and r["hs"] <= r["upper"] * (1 + 1e-6)
        assert r["gap"] <= 0.1
    assert rep["passed"]


def test_10_cb_minorization():
    rep = run_suite("minorization")
    assert len(rep["rows"]) >= 10
    assert rep["summary"]["violations"] == 0
    assert rep["passed"]


def test_11_interpolation():
    rep = run_suite("interp", samples=20)
    mid = [r for r in rep["rows"] if r["kind"] == "S2-midpoint"]
    assert len(mid) == 20 and {r["d"] for r in mid} == {1, 2, 3}
    assert all(r["gap"] <= 0.05 for r in mid)
    couples = [r for r in rep["rows"] if r["kind"] == "couples"][0]
    assert couples["configuration"] == "scalar/scalar" and couples["ok"]
    assert rep["passed"]


DETERMINISM_RUNS = [
    ("scalar-collapse", {"samples": 5}),
    ("endpoints", {"samples": 8}),
    ("haagerup-endpoints", {"samples": 4}),
    ("theorem1", {"samples": 2}),
    ("duality", {"samples": 2, "fuzz": 20}),
    ("fubini", {"samples": 2, "fuzz": 10}),
    ("s2-oh", {"samples": 2}),
    ("pi2-identity", {"spaces": ("diag:2",)}),
    ("hs-oh", {"samples": 2}),
    ("minorization", {}),
    ("interp", {"samples": 2, "couples_samples": 1}),
]


def test_12_determinism():
    for name, kw in DETERMINISM_RUNS:
        a = dumps(run_suite(name, seed=11, **kw))
        b = dumps(run_suite(name, seed=11, **kw))
        assert a == b, name
