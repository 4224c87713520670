import numpy as np
import pytest

from ncsp.bracket import overlap_gap
from ncsp.haagerup import haagerup_norm, s2_oh_isometry_check, theorem1_s2_norm
from ncsp.matrix_core import random_complex, schatten_norm
from ncsp.opspace import column_space, diag_space, min_tensor_norm, row_space, scalar_space
from ncsp.vector_schatten import SpElement, sp_norm


@pytest.mark.parametrize("n", [1, 2, 3])
def test_column_row_is_operator_norm(n, rng):
    X = random_complex((n, n), rng)
    b = haagerup_norm(column_space(n), row_space(n), X)
    assert b.contains(schatten_norm(X, np.inf), 1e-9)
    assert b.width <= 1e-6 * b.upper


@pytest.mark.parametrize("n", [1, 2, 3])
def test_row_column_is_trace_norm(n, rng):
    X = random_complex((n, n), rng)
    b = haagerup_norm(row_space(n), column_space(n), X)
    assert b.contains(schatten_norm(X, 1), 1e-9)
    assert b.upper <= schatten_norm(X, 1) * (1 + 1e-2)


def test_zero_and_scalar():
    S = scalar_space()
    assert haagerup_norm(S, S, np.zeros((1, 1))).upper == 0.0
    b = haagerup_norm(S, S, np.array([[3 - 4j]]))
    assert b.lower == pytest.approx(5) and b.upper == pytest.approx(5)


def test_dominates_min_norm(rng):
    E, F = diag_space(2), column_space(2)
    X = random_complex((2, 2), rng)
    b = haagerup_norm(E, F, X)
    mn = min_tensor_norm(E, F, X)
    assert b.upper >= mn * (1 - 1e-9)
    assert b.lower >= mn * (1 - 1e-9)


def test_shape_validation():
    with pytest.raises(ValueError):
        haagerup_norm(row_space(2), column_space(3), np.zeros((2, 2)))


def test_theorem1_matches_schatten_route(rng):
    u = SpElement(2, diag_space(2), random_complex((2, 2, 2), rng))
    b1 = sp_norm(u)
    bh = theorem1_s2_norm(u)
    assert overlap_gap(b1, bh) <= 1e-3
    assert abs(bh.upper / b1.lower - 1) <= 1e-3


def test_theorem1_zero():
    b = theorem1_s2_norm(SpElement(2, diag_space(2), np.zeros((2, 2, 2))))
    assert b.upper == 0.0


def test_s2_oh_rows():
    rows = s2_oh_isometry_check(2, level=2, samples=2, seed=3)
    assert len(rows) == 4
    for r in rows:
        assert r["lower"] <= r["oh"] * (1 + 1e-6) <= r["upper"] * (1 + 1e-5)
        assert r["rel_gap"] <= 1e-2
