"""Interior-point solver for the factorization norm of a concrete element.

For ``U`` in ``M_m (x) M_D`` (outer index first) the quantity

    min (||A||_p + ||B||_p) / 2   subject to   [[A (x) I_D, U], [U*, B (x) I_D]] >= 0

over Hermitian ``A, B`` in ``M_m`` equals ``inf ||a||_2p ||v||_inf ||b||_2p`` over
factorizations ``U = (a (x) I) v (b (x) I)`` (take ``A = aa*``, ``B = b*b``).  The
problem is convex, so a log-det barrier with damped Newton steps reaches it to
any requested relative gap.  The central-path point also yields a dual
certificate: for positive ``G`` partitioned like the block matrix,

    ||U|| >= -Re tr(G12* U) / sqrt(||Tr_D G11||_p' ||Tr_D G22||_p')

which is what the lower bounds are built from.
"""

from dataclasses import dataclass

import numpy as np

from .matrix_core import hermitian_basis, hermitian_part, partial_trace_inner


class BarrierFailure(RuntimeError):
    pass


@dataclass
class BarrierResult:
    A: np.ndarray
    B: np.ndarray
    G: np.ndarray  # dual point (positive semidefinite), same shape as the block matrix
    mu: float
    primal: float
    iterations: int


def _schatten_derivs(A, p, basis_rot=None, basis=None):
    """Value, gradient and Hessian of ``||A||_p`` (A positive definite) in ``basis`` coordinates."""
    lam, V = np.linalg.eigh(A)
    lam = np.clip(lam, 1e-300, None)
    g = np.sum(lam ** p)
    f = g ** (1 / p)
    Hp = np.einsum("ia,kij,jb->kab", V.conj(), basis, V)
    dg = p * np.real(np.einsum("i,kii->k", lam ** (p - 1), Hp))
    # divided differences of t -> t^(p-1)
    li, lj = lam[:, None], lam[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        gam = (li ** (p - 1) - lj ** (p - 1)) / (li - lj)
    close = np.abs(li - lj) <= 1e-10 * np.maximum(li, lj)
    diag = (p - 1) * np.maximum(li, lj) ** (p - 2) * np.ones_like(gam)
    gam = np.where(close, diag, gam)
    d2g = p * np.real(np.tensordot(Hp * gam, Hp, axes=([1, 2], [2, 1])))
    grad = g ** (1 / p - 1) / p * dg
    hess = (g ** (1 / p - 1) / p) * d2g + (1 / p) * (1 / p - 1) * g ** (1 / p - 2) * np.outer(dg, dg)
    return f, grad, hess


def _block(theta_a, theta_b, basis, U, D):
    A = np.tensordot(theta_a, basis, axes=(0, 0))
    B = np.tensordot(theta_b, basis, axes=(0, 0))
    I = np.eye(D)
    n = U.shape[0]
    Z = np.empty((2 * n, 2 * n), complex)
    Z[:n, :n] = np.kron(A, I)
    Z[:n, n:] = U
    Z[n:, :n] = U.conj().T
    Z[n:, n:] = np.kron(B, I)
    return A, B, hermitian_part(Z)


def _cross(X, Y, m, D, basis):
    """Matrix ``Re tr(X (H_k (x) I) Y (H_l (x) I))`` over the Hermitian basis."""
    X4 = X.reshape(m, D, m, D)
    Y4 = Y.reshape(m, D, m, D)
    R = np.einsum("aibj,cjei->abce", X4, Y4, optimize=True)
    T = np.tensordot(basis, R, axes=([1, 2], [1, 2]))  # (k, a, e)
    return np.real(np.tensordot(T, basis, axes=([1, 2], [2, 1])))


def _objective(theta_a, theta_b, basis, U, D, p, mu):
    A, B, Z = _block(theta_a, theta_b, basis, U, D)
    try:
        L = np.linalg.cholesky(Z)
        la = np.linalg.eigvalsh(A)
        lb = np.linalg.eigvalsh(B)
    except np.linalg.LinAlgError:
        return np.inf
    if la[0] <= 0 or lb[0] <= 0:
        return np.inf
    logdet = 2 * np.sum(np.log(np.real(np.diag(L))))
    fa = np.sum(la ** p) ** (1 / p)
    fb = np.sum(lb ** p) ** (1 / p)
    return 0.5 * (fa + fb) - mu * logdet


def solve(U, m, p, gap_rtol=1e-6, max_newton=400):
    """Minimize the factorization objective for ``U`` (an ``mD x mD`` matrix).

    ``U`` should be normalized (operator norm about 1); callers rescale.
    """
    U = np.asarray(U, complex)
    n = U.shape[0]
    if n % m:
        raise ValueError("matrix size is not a multiple of m")
    D = n // m
    N = 2 * n
    p = float(p)
    basis = hermitian_basis(m)
    K = len(basis)
    eye_coords = np.real(np.einsum("kii->k", basis))
    c0 = 2.0 * max(np.linalg.norm(U, 2), 1e-300)
    theta = np.concatenate([c0 * eye_coords, c0 * eye_coords])
    mu = c0 * m ** (1 / p) / N
    it = 0
    while True:
        for _ in range(60):
            it += 1
            if it > max_newton:
                raise BarrierFailure("Newton iteration budget exhausted")
            ta, tb = theta[:K], theta[K:]
            A, B, Z = _block(ta, tb, basis, U, D)
            S = np.linalg.inv(Z)
            S = hermitian_part(S)
            S11, S12, S22 = S[:n, :n], S[:n, n:], S[n:, n:]
            S21 = S12.conj().T
            _, ga, ha = _schatten_derivs(A, p, basis=basis)
            _, gb, hb = _schatten_derivs(B, p, basis=basis)
            Pa = partial_trace_inner(S11, m, D)
            Pb = partial_trace_inner(S22, m, D)
            grad = np.concatenate([
                0.5 * ga - mu * np.real(np.einsum("ab,kba->k", Pa, basis)),
                0.5 * gb - mu * np.real(np.einsum("ab,kba->k", Pb, basis)),
            ])
            H = np.empty((2 * K, 2 * K))
            H[:K, :K] = 0.5 * ha + mu * _cross(S11, S11, m, D, basis)
            H[K:, K:] = 0.5 * hb + mu * _cross(S22, S22, m, D, basis)
            hab = mu * _cross(S21, S12, m, D, basis)
            H[:K, K:] = hab
            H[K:, :K] = hab.T
            H = 0.5 * (H + H.T)
            try:
                step = -np.linalg.solve(H, grad)
            except np.linalg.LinAlgError:
                step = -np.linalg.lstsq(H, grad, rcond=None)[0]
            dec = -grad @ step
            if dec < 0:
                step, dec = -grad, grad @ grad
            if dec / 2 <= 1e-10 * mu * N:
                break
            f0 = _objective(ta, tb, basis, U, D, p, mu)
            t = 1.0 if dec < 0.25 else 1.0 / (1.0 + np.sqrt(dec))
            while True:
                cand = theta + t * step
                f1 = _objective(cand[:K], cand[K:], basis, U, D, p, mu)
                if f1 <= f0 - 0.25 * t * dec or t < 1e-12:
                    break
                t *= 0.5
            if t < 1e-12:
                break
            theta = cand
        A, B, Z = _block(theta[:K], theta[K:], basis, U, D)
        fa = np.sum(np.clip(np.linalg.eigvalsh(A), 0, None) ** p) ** (1 / p)
        fb = np.sum(np.clip(np.linalg.eigvalsh(B), 0, None) ** p) ** (1 / p)
        primal = 0.5 * (fa + fb)
        if mu * N <= gap_rtol * primal:
            G = mu * hermitian_part(np.linalg.inv(Z))
            return BarrierResult(A, B, G, mu, primal, it)
        mu *= 0.2 if mu * N > 100 * gap_rtol * primal else 0.5
