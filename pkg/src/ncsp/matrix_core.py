"""Dense complex linear algebra used everywhere else.

Kronecker convention: ``kron(a, b)[(i, k), (j, l)] = a[i, j] * b[k, l]`` with
row-major composite indices, i.e. the first factor is the outer (slow) index.
This is numpy's convention and every embedding in the package follows it.
"""

import numpy as np


class SVDFailure(RuntimeError):
    """Raised when an SVD does not reconstruct its input."""

    def __init__(self, residual):
        super().__init__(f"SVD did not converge (residual {residual:.3e})")
        self.residual = residual


def as_matrix(m):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def svd(m, tol=1e-12):
    """Thin SVD ``m = U @ diag(sigma) @ V.conj().T``.

    Returns ``(U, sigma, V)`` with orthonormal columns in ``U`` and ``V`` and
    ``sigma`` sorted in descending order. Raises :class:`SVDFailure` if the
    reconstruction residual exceeds ``tol * ||m||``.
    """
    m = as_matrix(m)
    if m.size == 0:
        k = min(m.shape)
        return np.zeros((m.shape[0], k), complex), np.zeros(k), np.zeros((m.shape[1], k), complex)
    try:
        u, s, vh = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError:
        raise SVDFailure(np.inf) from None
    scale = s[0] if s[0] > 0 else 1.0
    resid = np.linalg.norm(u * s @ vh - m, 2)
    if resid > tol * scale:
        raise SVDFailure(resid)
    return u, s, vh.conj().T


def singular_values(m):
    m = as_matrix(m)
    if m.size == 0:
        return np.zeros(0)
    return np.linalg.svd(m, compute_uv=False)


def schatten_norm(m, p):
    """Schatten p-norm ``(sum sigma_i^p)^(1/p)``; ``p = inf`` gives sigma_1."""
    p = float(p)
    if not p >= 1:
        raise ValueError(f"Schatten index must satisfy p >= 1, got {p}")
    s = singular_values(m)
    if s.size == 0:
        return 0.0
    if np.isinf(p):
        return float(s[0])
    top = s[0]
    if top == 0:
        return 0.0
    return float(top * np.sum((s / top) ** p) ** (1.0 / p))


def operator_norm(m):
    return schatten_norm(m, np.inf)


def polar(m):
    """Polar decomposition ``m = w @ h`` with ``h = |m|`` and ``w`` a partial isometry."""
    u, s, v = svd(m)
    keep = s > s[0] * 1e-14 if s.size and s[0] > 0 else np.zeros(s.shape, bool)
    w = u[:, keep] @ v[:, keep].conj().T
    h = (v * s) @ v.conj().T
    return w, h


def kron(m1, m2):
    return np.kron(np.asarray(m1, complex), np.asarray(m2, complex))


def conj_entrywise(m):
    return np.conj(np.asarray(m, complex))


def hermitian_part(m):
    return 0.5 * (m + m.conj().T)


def psd_power(h, power, floor=0.0):
    """``h**power`` for Hermitian positive semidefinite ``h`` (eigenvalues clipped at ``floor``)."""
    lam, vec = np.linalg.eigh(hermitian_part(h))
    lam = np.clip(lam, floor, None)
    f = np.zeros_like(lam)
    pos = lam > 0
    f[pos] = lam[pos] ** power
    return (vec * f) @ vec.conj().T


def partial_trace_inner(m, outer, inner):
    """Trace out the inner (fast) tensor factor of an ``(outer*inner)``-square matrix."""
    return np.einsum("aibi->ab", m.reshape(outer, inner, outer, inner))


def hermitian_basis(n):
    """Orthonormal (Hilbert-Schmidt) basis of n x n Hermitian matrices, shape (n*n, n, n)."""
    out = []
    for i in range(n):
        e = np.zeros((n, n), complex)
        e[i, i] = 1
        out.append(e)
    r = 1 / np.sqrt(2)
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n), complex)
            e[i, j] = e[j, i] = r
            out.append(e)
            f = np.zeros((n, n), complex)
            f[i, j] = -1j * r
            f[j, i] = 1j * r
            out.append(f)
    return np.array(out)


def random_unitary(n, rng):
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_complex(shape, rng):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def matrix_from_literal(lit):
    """Parse the repo-wide literal: nested rows of ``[re, im]`` pairs."""
    arr = np.asarray(lit, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError("matrix literal must be rows of [re, im] pairs")
    return as_matrix(arr[..., 0] + 1j * arr[..., 1])


def matrix_to_literal(m):
    m = np.asarray(m, complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]
