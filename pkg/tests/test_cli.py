import json

import numpy as np
import pytest

from ncsp.cli import main


def lit(a):
    a = np.asarray(a, complex)
    return np.stack([a.real, a.imag], -1).tolist()


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


def test_norm_identity(tmp_path, capsys):
    f = write(tmp_path, "id.json", lit(np.eye(2)))
    code, out = run(["norm", "full:2", f, "1"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["value"] == pytest.approx(1.0)
    assert rep["tool"] == "ncsp" and rep["seed"] == 0


def test_vsnorm_inf_equals_norm(tmp_path, capsys):
    c = np.random.default_rng(0).standard_normal((2, 2, 2))
    f = write(tmp_path, "x.json", {"space": "diag:2", "coeffs": lit(c)})
    code, out = run(["vsnorm", f, "--p", "inf"], capsys)
    v = json.loads(out)
    code2, out2 = run(["norm", "diag:2", f], capsys)
    assert code == code2 == 0
    assert v["value"] == pytest.approx(json.loads(out2)["value"])


def test_vsnorm_tight_tolerance_fails(tmp_path, capsys):
    c = np.random.default_rng(1).standard_normal((2, 2, 4))
    f = write(tmp_path, "x.json", {"space": "full:2", "coeffs": lit(c), "p": 1})
    code, out = run(["vsnorm", f, "--tol", "1e-14"], capsys)
    assert code in (0, 1)
    rep = json.loads(out)
    assert (code == 0) == (rep["width"] <= 1e-14)


@pytest.mark.parametrize("argv", [
    ["norm", "nosuch:2", "missing.json"],
    ["norm", "full:2", "missing.json"],
    ["interp", "bogus:2", "0.5", "missing.json"],
])
def test_bad_input_exit_2(argv, capsys):
    assert main(argv) == 2


def test_matrix_outside_space(tmp_path, capsys):
    f = write(tmp_path, "m.json", lit([[0, 1], [0, 0]]))
    assert main(["norm", "diag:2", f]) == 2


def test_haagerup_and_interp(tmp_path, capsys):
    X = np.array([[1.0, 2.0], [0.0, 1.0]])
    f = write(tmp_path, "x.json", lit(X))
    code, out = run(["haagerup", "column:2", "row:2", f], capsys)
    assert code == 0
    assert json.loads(out)["upper"] == pytest.approx(np.linalg.norm(X, 2), rel=1e-6)
    code, out = run(["interp", "schatten:2", "0.5", f], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["lower"] <= np.linalg.norm(X) <= rep["upper"] * (1 + 1e-9)


def test_pisum(tmp_path, capsys):
    f = write(tmp_path, "u.json", {"domain": "diag:2", "codomain": "diag:2", "action": lit(np.eye(2))})
    code, out = run(["pisum", f, "--m-max", "2"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["lower"] <= np.sqrt(2) * (1 + 1e-6) <= rep["upper"] * (1 + 1e-3)


def test_suite_deterministic_and_csv(capsys):
    _, a = run(["suite", "endpoints", "--samples", "3", "--seed", "4"], capsys)
    _, b = run(["suite", "endpoints", "--samples", "3", "--seed", "4"], capsys)
    assert a == b
    assert "runtime" not in a
    code, c = run(["suite", "endpoints", "--samples", "3", "--out", "csv"], capsys)
    assert code == 0 and len(c.strip().splitlines()) == 4


def test_config_file(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {"seed": 7, "cb_restarts": 2})
    f = write(tmp_path, "id.json", lit(np.eye(2)))
    code, out = run(["norm", "full:2", f, "--config", cfg], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["seed"] == 7 and rep["config"]["budget"]["cb_restarts"] == 2
    bad = write(tmp_path, "b.json", {"nonsense": 1})
    assert main(["norm", "full:2", f, "--config", bad]) == 2
