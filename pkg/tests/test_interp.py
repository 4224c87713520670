import numpy as np
import pytest

from ncsp.interp import (couples_theorem_check, interp_bracket, interp_family, interp_upper,
                         level_couple, schatten_couple)
from ncsp.matrix_core import random_complex, schatten_norm
from ncsp.opspace import column_space, row_space


def test_identity_at_half():
    b = interp_bracket(schatten_couple(2), 0.5, np.eye(2))
    assert b.contains(np.sqrt(2), 1e-9)
    assert b.width <= 0.05 * np.sqrt(2)


@pytest.mark.parametrize("theta, p", [(0.0, np.inf), (1.0, 1.0)])
def test_endpoints(theta, p, rng):
    x = random_complex((2, 2), rng)
    b = interp_bracket(schatten_couple(2), theta, x)
    ref = schatten_norm(x, p)
    assert b.contains(ref, 1e-9)
    assert b.width <= 1e-6 * ref


def test_monotone_in_degree(rng):
    x = random_complex((2, 2), rng)
    c = schatten_couple(2)
    vals = [interp_upper(c, 0.5, x, degree=N) for N in (0, 2, 4, 8)]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(vals, vals[1:]))


def test_family_interpolates(rng):
    x = random_complex((2, 2), rng)
    fam = interp_family(schatten_couple(2), 0.3, x, degree=4)
    # the family evaluated at theta reproduces x
    val = np.sum(fam.coeffs * np.exp(fam.lambdas * 0.3)[:, None], axis=0)
    assert np.allclose(val, x.ravel(), atol=1e-8 * np.linalg.norm(x))
    assert fam.value >= schatten_norm(x, 1 / 0.3) * (1 - 1e-9)


def test_zero_and_validation():
    c = schatten_couple(2)
    assert interp_upper(c, 0.5, np.zeros((2, 2))) == 0.0
    with pytest.raises(ValueError):
        interp_upper(c, 1.5, np.eye(2))
    with pytest.raises(ValueError):
        interp_upper(c, 0.5, np.eye(3))
    with pytest.raises(ValueError):
        level_couple(row_space(2), column_space(3), 1)


def test_scalar_couples_theorem():
    r = couples_theorem_check(samples=2, d=2, seed=1)
    assert r["ok"]


@pytest.mark.slow
def test_row_column_couples_theorem():
    r = couples_theorem_check("row", "column", p1=np.inf, samples=1, d=2, seed=1)
    assert r["ok"]
