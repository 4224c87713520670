import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncsp.matrix_core import (hermitian_basis, kron, matrix_from_literal, matrix_to_literal,
                              operator_norm, partial_trace_inner, polar, psd_power, random_complex,
                              random_unitary, schatten_norm, svd)

seeds = st.integers(0, 2**32 - 1)
sizes = st.integers(1, 5)


def _eig_schatten(m, p):
    # independent route: eigenvalues of m* m
    lam = np.clip(np.linalg.eigvalsh(m.conj().T @ m), 0, None)
    s = np.sqrt(lam)
    return s.max() if np.isinf(p) else np.sum(s ** p) ** (1 / p)


@given(seeds, sizes, sizes, st.sampled_from([1, 4 / 3, 2, 3, np.inf]))
def test_schatten_matches_eigenvalue_oracle(seed, r, c, p):
    m = random_complex((r, c), np.random.default_rng(seed))
    assert schatten_norm(m, p) == pytest.approx(_eig_schatten(m, p), rel=1e-9)


@given(seeds, sizes)
def test_svd_reconstructs(seed, n):
    m = random_complex((n, n + 1), np.random.default_rng(seed))
    u, s, v = svd(m)
    assert np.allclose(u * s @ v.conj().T, m, atol=1e-12 * s[0])
    assert np.all(np.diff(s) <= 0)


def test_zero_matrix_norms_vanish():
    z = np.zeros((3, 3))
    assert schatten_norm(z, 1) == 0.0
    assert schatten_norm(z, np.inf) == 0.0


def test_schatten_rejects_small_p():
    with pytest.raises(ValueError):
        schatten_norm(np.eye(2), 0.5)


def test_identity_schatten_values():
    assert schatten_norm(np.eye(3), 1) == pytest.approx(3)
    assert schatten_norm(np.eye(3), 2) == pytest.approx(np.sqrt(3))
    assert operator_norm(np.eye(3)) == pytest.approx(1)


@given(seeds, sizes)
def test_polar(seed, n):
    m = random_complex((n, n), np.random.default_rng(seed))
    w, h = polar(m)
    assert np.allclose(w @ h, m, atol=1e-10)
    assert np.allclose(h, h.conj().T)
    assert np.min(np.linalg.eigvalsh(h)) > -1e-10


def test_kron_outer_index_first():
    a = np.array([[1, 2], [3, 4]])
    b = np.eye(2)
    k = kron(a, b)
    assert k[2, 0] == 3 and k[3, 1] == 3 and k[2, 1] == 0


@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_partial_trace(seed, o, i):
    rng = np.random.default_rng(seed)
    a, b = random_complex((o, o), rng), random_complex((i, i), rng)
    assert np.allclose(partial_trace_inner(np.kron(a, b), o, i), a * np.trace(b))


def test_hermitian_basis_orthonormal():
    B = hermitian_basis(3)
    G = np.einsum("kab,lab->kl", B.conj(), B)
    assert np.allclose(G, np.eye(9))
    assert all(np.allclose(b, b.conj().T) for b in B)


def test_psd_power_square_root(rng):
    x = random_complex((3, 3), rng)
    h = x @ x.conj().T
    r = psd_power(h, 0.5)
    assert np.allclose(r @ r, h)


def test_random_unitary(rng):
    u = random_unitary(4, rng)
    assert np.allclose(u.conj().T @ u, np.eye(4))


def test_literal_round_trip(rng):
    m = random_complex((2, 3), rng)
    assert np.array_equal(matrix_from_literal(matrix_to_literal(m)), m)
    with pytest.raises(ValueError):
        matrix_from_literal([[1, 2], [3, 4]])
