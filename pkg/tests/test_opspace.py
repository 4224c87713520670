import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncsp.matrix_core import operator_norm, random_complex, schatten_norm
from ncsp.opspace import (ConcreteSpace, check_ruan, column_space, diag_space, full_space, matrix_level,
                          min_tensor_norm, mn_norm, oh_space, row_space, scalar_space, space_from_json,
                          space_from_ref, space_ref)

seeds = st.integers(0, 2**32 - 1)


def test_builtin_refs():
    for ref in ("row:3", "column:2", "oh:4", "full:2", "diag:3"):
        assert space_from_ref(ref).name == ref
    assert space_from_ref("scalar").dim == 1
    for bad in ("row:0", "foo:2", "full"):
        with pytest.raises(ValueError):
            space_from_ref(bad)


def test_json_round_trip():
    E = ConcreteSpace([np.diag([1, 2]), np.array([[0, 1], [0, 0]])], name="mine")
    F = space_from_json(E.to_json())
    assert np.allclose(F.basis, E.basis)
    assert space_ref(full_space(2)) == "full:2"
    assert isinstance(space_ref(E), dict)


def test_dependent_basis_rejected():
    with pytest.raises(ValueError):
        ConcreteSpace([np.eye(2), 2 * np.eye(2)])


@given(seeds, st.integers(1, 4))
def test_row_and_column_level_norms(seed, n):
    # R_n at level 1: the Euclidean norm; at level m: ||sum x_k x_k*||^(1/2)
    rng = np.random.default_rng(seed)
    X = random_complex((2, 2, n), rng)
    R = row_space(n).level_norm(X)
    C = column_space(n).level_norm(X)
    rows = sum(X[:, :, k] @ X[:, :, k].conj().T for k in range(n))
    cols = sum(X[:, :, k].conj().T @ X[:, :, k] for k in range(n))
    assert R == pytest.approx(np.sqrt(operator_norm(rows)), rel=1e-10)
    assert C == pytest.approx(np.sqrt(operator_norm(cols)), rel=1e-10)


@given(seeds, st.integers(1, 4))
def test_hilbertian_spaces_agree_at_level_one(seed, n):
    x = random_complex((1, 1, n), np.random.default_rng(seed))
    e = np.linalg.norm(x)
    for E in (row_space(n), column_space(n), oh_space(n)):
        assert E.level_norm(x) == pytest.approx(e, rel=1e-10)


def test_oh_level_two_between_row_and_column(rng):
    # OH = (R, C)_{1/2}: ||x||_OH <= sqrt(||x||_R ||x||_C)
    for _ in range(20):
        X = random_complex((2, 2, 3), rng)
        oh = oh_space(3).level_norm(X)
        assert oh <= np.sqrt(row_space(3).level_norm(X) * column_space(3).level_norm(X)) * (1 + 1e-12)


def test_full_space_level_is_ambient_norm(rng):
    X = random_complex((3, 3, 4), rng)
    big = X.reshape(3, 3, 2, 2).transpose(0, 2, 1, 3).reshape(6, 6)
    assert full_space(2).level_norm(X) == pytest.approx(operator_norm(big))


def test_mn_norm_identity():
    assert mn_norm(full_space(2), np.eye(4)[[0, 3]].sum(0)[None, None]) == pytest.approx(1)


@pytest.mark.parametrize("ref", ["row:3", "column:3", "oh:3", "diag:2", "full:2"])
def test_ruan_axioms(ref, rng):
    rep = check_ruan(space_from_ref(ref), 3, 30, rng)
    assert rep["ok"], rep


def test_min_tensor_scalar_and_full(rng):
    x = random_complex((2, 4), rng)
    assert min_tensor_norm(scalar_space(), full_space(2), x[:1]) == pytest.approx(
        operator_norm(x[0].reshape(2, 2)))
    # C_n (x)_min R_n = M_n
    X = random_complex((3, 3), rng)
    assert min_tensor_norm(column_space(3), row_space(3), X) == pytest.approx(operator_norm(X))


def test_matrix_level_concrete(rng):
    E = diag_space(2)
    M2 = matrix_level(E, 2)
    X = random_complex((2, 2, 2, 2, 2), rng)  # (r, s, a, b, k)
    assert M2.level_norm(X.reshape(2, 2, 8)) == pytest.approx(
        E.level_norm(X.transpose(0, 2, 1, 3, 4).reshape(4, 4, 2)))
    M2oh = matrix_level(oh_space(2), 2)
    Y = random_complex((1, 1, 8), rng)
    assert M2oh.level_norm(Y) == pytest.approx(oh_space(2).level_norm(Y.reshape(2, 2, 2)))


def test_shape_errors():
    with pytest.raises(ValueError):
        full_space(2).level_norm(np.zeros((2, 2, 3)))
