import numpy as np
import pytest

from ncsp.cbnorm import LinearMap, cb_norm, cb_upper, identity_map, level_ratio
from ncsp.matrix_core import operator_norm, random_complex
from ncsp.opspace import column_space, diag_space, full_space, oh_space, row_space


def test_zero_map():
    b = cb_norm(LinearMap(diag_space(2), diag_space(2), np.zeros((2, 2))))
    assert b.lower == b.upper == 0.0


def test_identity_full():
    b = cb_norm(identity_map(full_space(2)), restarts=4)
    assert b.lower == pytest.approx(1, abs=1e-6) and b.upper == pytest.approx(1, abs=1e-6)


def test_transpose_on_m2():
    F = full_space(2)
    b = cb_norm(LinearMap(F, F, np.eye(4)[[0, 2, 1, 3]]), max_level=2, restarts=6)
    assert b.lower >= 2 - 1e-3
    assert b.upper == pytest.approx(2, rel=1e-6)


def test_row_to_column_identity():
    # ||id: R_n -> C_n||_cb = sqrt(n)
    b = cb_norm(LinearMap(row_space(3), column_space(3), np.eye(3)), max_level=3, restarts=4)
    assert b.lower == pytest.approx(np.sqrt(3), rel=1e-4)
    assert b.upper == pytest.approx(np.sqrt(3), rel=1e-6)


def test_oh_maps(rng):
    A = random_complex((3, 2), rng)
    b = cb_norm(LinearMap(oh_space(2), oh_space(3), A), restarts=4)
    assert b.upper == pytest.approx(operator_norm(A))
    assert b.lower <= b.upper * (1 + 1e-9)
    assert b.lower >= 0.999 * b.upper


def test_oh_to_row_formula():
    # ||id: OH_n -> R_n||_cb = n^(1/4)
    up, _ = cb_upper(LinearMap(oh_space(4), row_space(4), np.eye(4)))
    assert up == pytest.approx(4 ** 0.25)


def test_witness_replays(rng):
    u = LinearMap(diag_space(2), full_space(2), random_complex((4, 2), rng))
    b = cb_norm(u, restarts=4)
    n, X = b.lower_witness
    assert level_ratio(u, X) == pytest.approx(b.lower)
    assert b.lower <= b.upper * (1 + 1e-9)


def test_bracket_contains_norm_of_random_maps(rng):
    for _ in range(3):
        u = LinearMap(full_space(2), column_space(2), random_complex((2, 4), rng))
        b = cb_norm(u, restarts=4)
        assert b.lower <= b.upper * (1 + 1e-9)
        assert b.upper <= 1.01 * b.lower


def test_scaling_homogeneity(rng):
    u = LinearMap(diag_space(2), row_space(2), random_complex((2, 2), rng))
    b1, b2 = cb_norm(u, restarts=3), cb_norm(u.scaled(3.0), restarts=3)
    assert b2.upper == pytest.approx(3 * b1.upper, rel=1e-6)


def test_shape_validation():
    with pytest.raises(ValueError):
        LinearMap(diag_space(2), full_space(2), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        cb_norm(identity_map(diag_space(2)), max_level=0)
