import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncsp.bracket import NormBracket, overlap_gap
from ncsp.cbnorm import LinearMap, cb_norm
from ncsp.matrix_core import random_complex, schatten_norm
from ncsp.opspace import diag_space, full_space, oh_space, scalar_space
from ncsp.vector_schatten import (DualWitness, SpElement, SpMatrixElement, conjugate_exponent,
                                  fubini_reshape, nested_upper, parse_p, pq_inclusion_check,
                                  sp_matrix_norm, sp_norm, sp_norm_lower, sp_norm_upper, swap_legs)

seeds = st.integers(0, 2**32 - 1)
S = scalar_space()


def test_parse_p():
    assert np.isinf(parse_p("inf")) and parse_p(2) == 2.0
    assert conjugate_exponent(1) == np.inf and conjugate_exponent(4) == pytest.approx(4 / 3)
    with pytest.raises(ValueError):
        parse_p(0.5)


def test_diag_trace_norm():
    u = SpElement(1, S, np.eye(2)[:, :, None])
    assert sp_norm_upper(u).value == pytest.approx(2, rel=1e-6)


@given(seeds, st.integers(1, 3), st.sampled_from([1, 1.5, 2, 3, 4]))
def test_scalar_collapse(seed, m, p):
    c = random_complex((m, m, 1), np.random.default_rng(seed))
    b = sp_norm(SpElement(p, S, c))
    ref = schatten_norm(c[:, :, 0], p)
    assert b.contains(ref, 1e-9)
    assert b.upper <= ref * (1 + 1e-5)
    assert b.lower >= ref * (1 - 1e-5)


def test_zero_element():
    b = sp_norm(SpElement(2, diag_space(2), np.zeros((2, 2, 2))))
    assert b.lower == b.upper == 0.0


@given(seeds, st.sampled_from([1, 2, 4]))
def test_certificate_reconstructs_and_dominates(seed, p):
    u = SpElement(p, full_space(2), random_complex((2, 2, 4), np.random.default_rng(seed)))
    b = sp_norm(u)
    cert = b.upper_certificate
    assert cert.residual(u) <= 1e-9 * np.linalg.norm(u.coeffs)
    assert cert.recompute(p) == pytest.approx(cert.value, rel=1e-9)
    assert b.lower <= cert.value * (1 + 1e-9)
    assert b.lower_witness.evaluate(u) == pytest.approx(b.lower)


def test_weak_duality_across_elements(rng):
    E = diag_space(2)
    us = [SpElement(4 / 3, E, random_complex((2, 2, 2), rng)) for _ in range(5)]
    ws = [sp_norm(u).lower_witness for u in us]
    for u in us:
        up = sp_norm_upper(u).value
        for w in ws:
            assert w.evaluate(u) <= up * (1 + 1e-9)


def test_supplied_witness_is_used(rng):
    u = SpElement(2, S, random_complex((2, 2, 1), rng))
    # polar phase oracle: w = conj of the normalized element pairs to the Frobenius norm
    w = DualWitness(u.coeffs.transpose(1, 0, 2).conj(), np.linalg.norm(u.coeffs))
    assert sp_norm_lower(u, [w]) >= np.linalg.norm(u.coeffs) * (1 - 1e-12)


def test_infinity_collapse(rng):
    c = random_complex((3, 3, 4), rng)
    b = sp_norm(SpElement(np.inf, full_space(2), c))
    assert b.lower == b.upper == pytest.approx(full_space(2).level_norm(c))


def test_oh_s2_is_frobenius(rng):
    c = random_complex((2, 2, 2), rng)
    b = sp_norm(SpElement(2, oh_space(2), c))
    assert b.contains(np.linalg.norm(c), 1e-6)
    assert b.width <= 1e-4


def test_monotone_in_p(rng):
    c = random_complex((2, 2, 2), rng)
    vals = [sp_norm(SpElement(p, diag_space(2), c)) for p in (1, 2, 4, np.inf)]
    for a, b in zip(vals, vals[1:]):
        assert b.lower <= a.upper * (1 + 1e-9)


def test_functoriality(rng):
    E, F = diag_space(2), full_space(2)
    u = LinearMap(E, F, random_complex((4, 2), rng))
    cb = cb_norm(u, restarts=4)
    for _ in range(3):
        x = SpElement(2, E, random_complex((2, 2, 2), rng))
        y = SpElement(2, F, u.apply(x.coeffs))
        assert sp_norm(y).lower <= cb.upper * sp_norm(x).upper * (1 + 1e-9)


def test_json_round_trip(rng):
    u = SpElement(3, diag_space(2), random_complex((2, 2, 2), rng))
    v = SpElement.from_json(u.to_json())
    assert v.p == 3 and np.allclose(v.coeffs, u.coeffs)
    with pytest.raises(ValueError):
        SpElement.from_json({"p": 2})


def test_matrix_norm_level_one_and_inf(rng):
    c = random_complex((1, 1, 2, 2, 2), rng)
    b1 = sp_matrix_norm(SpMatrixElement(2, diag_space(2), c))
    b2 = sp_norm(SpElement(2, diag_space(2), c[0, 0]))
    assert overlap_gap(b1, b2) == 0
    d = random_complex((2, 2, 2, 2, 2), rng)
    x = SpMatrixElement(np.inf, diag_space(2), d)
    b = sp_matrix_norm(x)
    assert b.lower == b.upper == pytest.approx(x.infinity_norm())


def test_matrix_norm_scalar_s2_is_oh(rng):
    x = random_complex((2, 2, 2, 2, 1), rng)
    b = sp_matrix_norm(SpMatrixElement(2, S, x))
    ref = oh_space(4).level_norm(x.reshape(2, 2, 4))
    assert b.contains(ref, 1e-6)


def test_fubini_reshape_round_trip(rng):
    c = random_complex((2, 2, 3, 3, 1), rng)
    flat = fubini_reshape(c, 2, 3)
    assert flat.shape == (6, 6, 1)
    assert np.array_equal(fubini_reshape(flat, 2, 3, "nest"), c)
    assert flat[1 * 3 + 2, 0 * 3 + 1, 0] == c[1, 0, 2, 1, 0]
    with pytest.raises(ValueError):
        fubini_reshape(c, 3, 2)
    assert np.array_equal(fubini_reshape(c[:1, :1], 1, 3), c[0, 0])


def test_nested_p2_scalar_frobenius(rng):
    c = random_complex((2, 2, 2, 2, 1), rng)
    up, _ = nested_upper(S, 2, 2, c)
    assert up >= np.linalg.norm(c) * (1 - 1e-6)
    b = sp_norm(SpElement(2, oh_space(4), c.reshape(2, 2, 4)))
    assert b.contains(np.linalg.norm(c), 1e-6)


def test_pq_inclusion(rng):
    for p, q in ((1, 2), (1, np.inf), (2, 2)):
        r = pq_inclusion_check(diag_space(2), random_complex((2, 2, 2, 2, 2), rng), p, q)
        assert not r["violated"]
    with pytest.raises(ValueError):
        pq_inclusion_check(S, np.zeros((1, 1, 1, 1, 1)), 2, 1)
    z = pq_inclusion_check(S, np.zeros((2, 2, 2, 2, 1)), 1, 2)
    assert z["lower_target"] == z["upper_source"] == 0.0


def test_swap_legs_shape():
    assert swap_legs(np.zeros((2, 2, 3, 3, 1))).shape == (3, 3, 2, 2, 1)


def test_bracket_type():
    with pytest.raises(ValueError):
        NormBracket(2.0, 1.0)
    b = NormBracket(1.0, 1.0 - 1e-12)
    assert b.lower <= b.upper + 1e-11
