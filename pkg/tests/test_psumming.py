import numpy as np
import pytest

from ncsp.cbnorm import LinearMap, cb_norm
from ncsp.matrix_core import random_complex, schatten_norm
from ncsp.opspace import column_space, diag_space, full_space, oh_space, scalar_space
from ncsp.psumming import (cb_minorization_check, domain_norm, extension_and_projection_experiment,
                           hs_coincidence_check, identity_experiment, pi2_bracket, pi_p_lower,
                           pietsch_upper_p2)


def test_domain_norm_scalar_is_frobenius(rng):
    X = random_complex((3, 3, 1), rng)
    assert domain_norm(scalar_space(), 2, X) == pytest.approx(np.linalg.norm(X))


def test_domain_norm_infinity_is_level_norm(rng):
    X = random_complex((2, 2, 4), rng)
    assert domain_norm(full_space(2), np.inf, X) == pytest.approx(full_space(2).level_norm(X))


def test_domain_norm_oh(rng):
    # S_2^m (x)_min OH_n: operator norm of the (m^2 x n) coefficient matrix
    X = random_complex((2, 2, 3), rng)
    assert domain_norm(oh_space(3), 2, X) == pytest.approx(schatten_norm(X.reshape(4, 3), np.inf))


def test_zero_map():
    u = LinearMap(diag_space(2), diag_space(2), np.zeros((2, 2)))
    b = pi2_bracket(u, m_max=2)
    assert b.lower == 0.0 and b.upper == 0.0


@pytest.mark.parametrize("ref", ["scalar", "diag:2", "column:2"])
def test_identity_brackets(ref):
    from ncsp.opspace import space_from_ref
    r = identity_experiment(space_from_ref(ref), m_max=3)
    assert r["contains"]
    assert r["upper"] <= r["target"] * (1 + 1e-3)
    assert r["lower"] >= r["target"] * (1 - 1e-3)


def test_two_sided_multiplication_bound(rng):
    d = 2
    a0, b0 = random_complex((d, d), rng), random_complex((d, d), rng)
    action = np.array([(a0 @ e @ b0).ravel() for e in full_space(d).basis]).T
    u = LinearMap(full_space(d), oh_space(d * d), action)
    cert = pietsch_upper_p2(u)
    assert cert.bound <= schatten_norm(a0, 4) * schatten_norm(b0, 4) * (1 + 1e-3)


def test_certificate_replay(rng):
    u = LinearMap(diag_space(2), full_space(2), random_complex((4, 2), rng))
    cert = pietsch_upper_p2(u)
    for _ in range(50):
        m = int(rng.integers(1, 4))
        X = random_complex((m, m, 2), rng)
        lhs, rhs = cert.replay(u, X)
        assert lhs <= rhs * (1 + 1e-8) + 1e-12


def test_lower_monotone_in_m(rng):
    u = LinearMap(diag_space(2), column_space(2), random_complex((2, 2), rng))
    lo2, w2 = pi_p_lower(u, 2, m_max=2)
    lo3, w3 = pi_p_lower(u, 2, m_max=3)
    assert lo3 >= lo2 * (1 - 1e-12)
    assert np.all(np.diff(w3["per_level"]) >= 0)


def test_lower_below_upper(rng):
    u = LinearMap(full_space(2), diag_space(2), random_complex((2, 4), rng))
    b = pi2_bracket(u, m_max=2)
    assert b.lower <= b.upper * (1 + 1e-9)


def test_ideal_property(rng):
    E = diag_space(2)
    u = LinearMap(E, E, random_complex((2, 2), rng))
    v = LinearMap(E, E, random_complex((2, 2), rng))
    cb_v = cb_norm(v).upper
    up_u = pietsch_upper_p2(u).bound
    lo_vu, _ = pi_p_lower(v.compose(u), 2, m_max=2)
    assert lo_vu <= cb_v * up_u * (1 + 1e-6)


def test_rank_one_hs():
    A = np.zeros((2, 2))
    A[0, 0] = 1.0
    r = hs_coincidence_check(LinearMap(oh_space(2), oh_space(2), A))
    assert r["contains"] and r["rel_gap"] <= 1e-3


def test_minorization(rng):
    u = LinearMap(column_space(2), diag_space(2), random_complex((2, 2), rng))
    assert not cb_minorization_check(u, m_max=2)["violated"]


@pytest.mark.parametrize("ref", ["scalar", "diag:2", "column:2"])
def test_extension_and_projection(ref):
    from ncsp.opspace import space_from_ref
    r = extension_and_projection_experiment(space_from_ref(ref))
    assert r["within"]
    assert r["projection_error"] <= 1e-8


def test_unsupported():
    u = LinearMap(diag_space(2), diag_space(2), np.eye(2))
    with pytest.raises((ValueError, NotImplementedError)):
        pi_p_lower(u, 3)
    with pytest.raises(ValueError):
        pietsch_upper_p2(u, m_copies=0)
