"""Completely p-summing norms.

``pi_p(u)`` is the norm of ``I (x) u`` from ``S_p^m (x)_min E`` to ``S_p^m[F]``,
supremum over ``m``.  Lower bounds evaluate that ratio on searched elements
(certified numerator, exact denominator).  Upper bounds at ``p = 2`` come from
finite Pietsch factorizations

    u = w o M,    M(x) = a pi(x) b  in S_2(H~),   pi(x) = x (x) I_copies,

with ``||a||_4 = ||b||_4 = 1``.  ``M`` is completely 2-summing with norm at most
one, so ``pi_2(u) <= ||w||_cb``.  The range of ``M`` is a subspace of ``S_2``,
hence an operator Hilbert space, and ``||w||_cb`` has the closed form
``||sum_kl (G^-1)_kl t_k (x) conj(t_l)||^(1/2)`` with ``G`` the Gram matrix of
``M(e_k)`` and ``t_k = u(e_k)``; no adversarial sampling is involved in the bound.
"""

import time
from dataclasses import dataclass, field

import numpy as np
import torch

from . import optim
from .bracket import NormBracket
from .cbnorm import LinearMap, cb_norm, cb_upper
from .config import DEFAULT
from .matrix_core import operator_norm, random_complex, schatten_norm
from .opspace import ConcreteSpace, OHSpace, diag_space, full_space, oh_space
from .vector_schatten import SpElement, _lower_witness, parse_p


# --------------------------------------------------------------- domain norms

def domain_norm(space, p, X):
    """Norm of ``X`` (shape ``(m, m, dim E)``) in ``S_p^m (x)_min E`` for ``p`` in {2, inf}."""
    X = np.asarray(X, complex)
    if np.isinf(p):
        return space.level_norm(X)
    if p != 2:
        raise NotImplementedError("the minimal tensor norm with S_p is implemented for p = 2 and p = inf")
    m = X.shape[0]
    coeffs = X.reshape(m * m, space.dim)
    if isinstance(space, OHSpace):
        # OH (x)_min OH: cb norm of the coefficient matrix between homogeneous spaces
        return operator_norm(coeffs)
    if isinstance(space, ConcreteSpace):
        # S_2^m is OH_{m^2}: ||sum_a x_a (x) conj(x_a)||^(1/2) over its entries a
        mats = np.tensordot(coeffs, space.basis, axes=(1, 0))
        d = space.ambient_dim
        S = np.einsum("aij,akl->ikjl", mats, mats.conj()).reshape(d * d, d * d)
        return float(np.sqrt(operator_norm(S)))
    raise NotImplementedError(f"no minimal tensor norm for {type(space).__name__}")


def _domain_norm_t(space, p, X, q):
    m = X.shape[0]
    if np.isinf(p):
        return optim.level_norm_t(space, X, q)
    coeffs = X.reshape(m * m, space.dim)
    if isinstance(space, OHSpace):
        return optim.smooth_opnorm(coeffs, q)
    B = torch.as_tensor(space.basis)
    mats = torch.tensordot(coeffs, B, dims=([1], [0]))
    d = space.ambient_dim
    S = torch.einsum("aij,akl->ikjl", mats, mats.conj()).reshape(d * d, d * d)
    return optim.smooth_opnorm(S, q) ** 0.5


def _target_lower(F, p, Y, seed, config):
    """Certified lower bound on ``||Y||_{S_p[F]}`` and the dual witness behind it."""
    if not np.any(Y):
        return 0.0, None
    val, w = _lower_witness(SpElement(p, F, Y), max(1, config.budget.sp_restarts // 4), seed, config)
    return float(val), w


# --------------------------------------------------------------- lower bounds

def _structured_start(m, k):
    """``sum_k E_(k) (x) e_k`` over distinct matrix units (restart 0)."""
    X = np.zeros((m * m, k), complex)
    for i in range(min(m * m, k)):
        X[i, i] = 1.0
    return X.reshape(m, m, k)


def _ascend_level(u, p, m, restarts, seed, rounds, config):
    E, F = u.domain, u.codomain
    k = E.dim
    A = torch.as_tensor(u.action.T)
    packer = optim.Packer({"X": (m, m, k)}, complex_keys=["X"])
    best, best_X = 0.0, None
    for r in range(restarts):
        rng = np.random.default_rng([seed, m, r])
        X = _structured_start(m, k) if r == 0 else random_complex((m, m, k), rng)
        for rd in range(rounds):
            den = domain_norm(E, p, X)
            num, w = _target_lower(F, p, u.apply(X), seed, config)
            if den > 0 and num / den > best:
                best, best_X = num / den, X.copy()
            if w is None and not np.isinf(p):
                break
            if np.isinf(p):
                # numerator is an exact level norm: ascend the ratio directly
                def fun(P):
                    Xt = P["X"]
                    return (torch.log(_domain_norm_t(E, p, Xt, 64))
                            - torch.log(optim.level_norm_t(F, Xt @ A, 64)))
            else:
                # freeze the witness: |<(I (x) u) X, w>| / ||X|| is a lower bound for every X
                Z = torch.as_tensor(w.w @ u.action).permute(1, 0, 2)

                def fun(P, Z=Z):
                    Xt = P["X"]
                    pair = torch.abs(torch.sum(Xt * Z))
                    return torch.log(_domain_norm_t(E, p, Xt, 64)) - torch.log(pair + 1e-300)

            x, _ = optim.minimize(fun, packer, packer.pack({"X": X}), maxiter=150)
            Xn = packer.unpack(x)["X"]
            if not np.all(np.isfinite(Xn)) or not np.any(Xn):
                break
            Xn = Xn / max(domain_norm(E, p, Xn), 1e-300)
            if np.allclose(Xn, X / max(domain_norm(E, p, X), 1e-300), atol=1e-9):
                X = Xn
                break
            X = Xn
        den = domain_norm(E, p, X)
        num, _ = _target_lower(F, p, u.apply(X), seed, config)
        if den > 0 and num / den > best:
            best, best_X = num / den, X.copy()
    return best, best_X


def pi_p_lower(u, p=2, m_max=None, restarts=3, seed=0, rounds=6, config=DEFAULT):
    """Certified lower bound for ``pi_p(u)`` over levels ``m <= m_max``.

    Returns
    -------
    value : float
    witness : dict
        ``{"m", "X", "per_level"}``; replaying the ratio of the certified target
        lower bound to ``domain_norm`` at ``X`` gives at least ``value``.
    """
    p = parse_p(p)
    m_max = config.budget.pi_m_max if m_max is None else int(m_max)
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    if not np.any(u.action):
        return 0.0, {"m": 1, "X": None, "per_level": [0.0] * m_max}
    scale = float(np.linalg.norm(u.action))
    unit = u.scaled(1.0 / scale)
    best, wit, per = 0.0, None, []
    for m in range(1, m_max + 1):
        val, X = _ascend_level(unit, p, m, restarts, seed, rounds, config)
        per.append(val * scale)
        if val > best:
            best, wit = val, (m, X)
    return best * scale, {"m": wit[0] if wit else 1, "X": wit[1] if wit else None,
                          "per_level": [max(per[:i + 1]) for i in range(len(per))]}


# --------------------------------------------------------------- Pietsch certificates

@dataclass
class PietschCertificate:
    """``u = w o (x -> a pi(front(x)) b)`` with ``||a||_4 = ||b||_4 = 1``.

    ``C`` bounds the cb norm of ``w`` on the range (an operator Hilbert space);
    ``front`` is the identity for concrete domains and a complete isometry onto a
    diagonal space for OH domains, with cb norm ``front_cb``.  ``bound`` is the
    resulting upper bound for ``pi_2(u)``.
    """

    a: np.ndarray
    b: np.ndarray
    m_copies: int
    C: float
    slack: float
    front: np.ndarray = None
    front_cb: float = 1.0
    inner_space: object = None
    notes: dict = field(default_factory=dict)

    @property
    def bound(self):
        return self.C * self.front_cb * (1 + self.slack)

    def factor(self, X):
        """``(a pi(front(x_ij)) b)_ij`` as OH coordinates, shape ``(n, n, D^2)``."""
        X = np.asarray(X, complex)
        if self.front is not None:
            X = X @ self.front.T
        mats = np.tensordot(X, self.inner_space.basis, axes=(2, 0))
        mats = np.kron(mats, np.eye(self.m_copies)) if self.m_copies > 1 else mats
        Y = self.a @ mats @ self.b
        n = X.shape[0]
        return Y.reshape(n, n, -1)

    def replay(self, u, X):
        """``(||(u(x_ij))||, C (1 + slack) ||(a pi(x_ij) b)||)``."""
        lhs = u.codomain.level_norm(u.apply(X))
        Y = self.factor(X)
        rhs = self.C * (1 + self.slack) * oh_space(Y.shape[2]).level_norm(Y)
        return float(lhs), float(rhs)


def _images(F, T):
    """Codomain images of the domain basis: matrices for concrete F, coordinates for OH."""
    if isinstance(F, ConcreteSpace):
        return np.tensordot(T.T, F.basis, axes=(1, 0))  # (k, f, f)
    if isinstance(F, OHSpace):
        return T.T.copy()  # (k, f)
    raise NotImplementedError(f"Pietsch certificates need a concrete or OH codomain, got {type(F).__name__}")


def _w_cb(F, images, Ginv):
    if isinstance(F, OHSpace):
        Tm = images.T
        return np.sqrt(max(operator_norm(Tm @ Ginv @ Tm.conj().T), 0.0))
    f = images.shape[1]
    S = np.einsum("kl,kab,lcd->acbd", Ginv, images, images.conj()).reshape(f * f, f * f)
    return np.sqrt(max(operator_norm(S), 0.0))


def _w_cb_t(F, images_t, Ginv, q):
    if isinstance(F, OHSpace):
        Tm = images_t.T
        return optim.smooth_opnorm(Tm @ Ginv @ Tm.conj().T, q) ** 0.5
    f = images_t.shape[1]
    S = torch.einsum("kl,kab,lcd->acbd", Ginv, images_t, images_t.conj()).reshape(f * f, f * f)
    return optim.smooth_opnorm(S, q) ** 0.5


def _range_vectors(basis, a, b, copies):
    mats = basis if copies == 1 else torch.stack([torch.kron(x, torch.eye(copies, dtype=x.dtype)) for x in basis])
    V = a @ mats @ b
    return V.reshape(V.shape[0], -1)


def _certify(E, F, T, a, b, copies):
    """Exact value ``C = ||a||_4 ||b||_4 ||w||_cb`` for given factors; ``inf`` if degenerate."""
    a, b = np.asarray(a, complex), np.asarray(b, complex)
    na, nb = schatten_norm(a, 4), schatten_norm(b, 4)
    if na == 0 or nb == 0:
        return np.inf, 0.0, a, b
    a, b = a / na, b / nb
    basis = torch.as_tensor(np.asarray(E.basis, complex))
    V = _range_vectors(basis, torch.as_tensor(a), torch.as_tensor(b), copies).numpy()
    G = V.conj() @ V.T
    ev = np.linalg.eigvalsh(G)
    if ev[0] <= 1e-10 * ev[-1]:
        return np.inf, 0.0, a, b
    Ginv = np.linalg.inv(G)
    Ginv = 0.5 * (Ginv + Ginv.conj().T)
    C = _w_cb(F, _images(F, T), Ginv)
    slack = 1e-12 * ev[-1] / ev[0] + 1e-12
    return float(C), float(slack), a, b


def _pietsch_concrete(E, F, T, copies, restarts, seed, init=None, iters=300):
    d = E.ambient_dim
    D = d * copies
    basis = torch.as_tensor(E.basis)
    images_t = torch.as_tensor(_images(F, T))
    packer = optim.Packer({"a": (D, D), "b": (D, D)}, complex_keys=["a", "b"])
    best = (np.inf, 0.0, None, None)
    for r in range(restarts):
        rng = np.random.default_rng([seed, 61, r])
        if r == 0 and init is not None:
            a0, b0 = init
        else:
            a0 = np.eye(D) + (0.3 * random_complex((D, D), rng) if r else 0)
            b0 = np.eye(D) + (0.3 * random_complex((D, D), rng) if r else 0)
        x = packer.pack({"a": a0, "b": b0})
        for q in (16, 64, 256, 1024, 4096):
            def fun(P, q=q):
                a, b = P["a"], P["b"]
                V = _range_vectors(basis, a, b, copies)
                G = V.conj() @ V.T
                Ginv = torch.linalg.inv(G)
                return (torch.log(torch.sum(torch.linalg.svdvals(a) ** 4)) / 4
                        + torch.log(torch.sum(torch.linalg.svdvals(b) ** 4)) / 4
                        + torch.log(_w_cb_t(F, images_t, Ginv, q)))

            x, _ = optim.minimize(fun, packer, x, maxiter=iters)
        P = packer.unpack(x)
        cand = _certify(E, F, T, P["a"], P["b"], copies)
        if not np.isfinite(cand[0]):
            # degenerate factors: fall back to this restart's start point
            cand = _certify(E, F, T, a0, b0, copies)
        if cand[0] < best[0]:
            best = cand
    return best


def _default_copies(E):
    d = E.ambient_dim if isinstance(E, ConcreteSpace) else E.dim
    return int(min(d * d, E.dim ** 4 + 1))


def pietsch_upper_p2(u, m_copies=None, restarts=3, seed=0):
    """Search for a finite Pietsch factorization of ``u`` at ``p = 2``.

    Parameters
    ----------
    u : LinearMap
        Domain concrete (``E`` inside ``M_d``) or ``OH_n``; codomain concrete or OH.
    m_copies : int
        Multiplicity of the diagonal amplification; default ``min(d^2, dim(E)^4 + 1)``.

    Returns
    -------
    PietschCertificate
        ``bound`` is a certified upper bound for ``pi_2(u)``.
    """
    E, F = u.domain, u.codomain
    copies = _default_copies(E) if m_copies is None else int(m_copies)
    if copies < 1:
        raise ValueError("m_copies must be >= 1")
    t0 = time.perf_counter()
    if isinstance(E, OHSpace):
        # OH_n -> diag:n completely isometrically, adapted to the singular vectors of u
        _, s, Vh = np.linalg.svd(u.action)
        V = Vh.conj().T
        front = V.conj().T  # coordinates of x in the basis V
        inner = diag_space(E.dim)
        front_cb = cb_upper(LinearMap(E, inner, front))[0]
        T = u.action @ V
        n = E.dim
        sv = np.zeros(n)
        sv[:len(s)] = s
        ab = np.kron(np.diag(np.sqrt(sv + 1e-3 * (sv.max() if sv.size else 1))), np.eye(copies))
        init = (ab, ab)
    elif isinstance(E, ConcreteSpace):
        front, inner, front_cb, T, init = None, E, 1.0, u.action, None
    else:
        raise NotImplementedError(f"Pietsch certificates need a concrete or OH domain, got {type(E).__name__}")
    D = inner.ambient_dim * copies
    if not np.any(u.action):
        Z = np.eye(D) / D ** 0.25
        return PietschCertificate(Z, Z, copies, 0.0, 0.0, front, front_cb, inner, {"kind": "zero"})
    scale = float(np.linalg.norm(T))
    C, slack, a, b = _pietsch_concrete(inner, F, T / scale, copies, restarts, seed, init)
    if not np.isfinite(C):
        raise FloatingPointError("no non-degenerate Pietsch factorization found")
    return PietschCertificate(a, b, copies, C * scale, slack, front, float(front_cb), inner,
                              {"runtime": time.perf_counter() - t0})


def pi2_bracket(u, m_max=None, restarts=3, seed=0, m_copies=None, config=DEFAULT):
    lo, wit = pi_p_lower(u, 2, m_max, restarts, seed, config=config)
    cert = pietsch_upper_p2(u, m_copies, restarts, seed)
    return NormBracket(lo, cert.bound, wit, cert)


# --------------------------------------------------------------- experiments

def _report(claim, target, lower, upper, seed, t0, **extra):
    rep = {"claim": claim, "target": target, "lower": float(lower), "upper": float(upper),
           "seed": seed, "runtime": time.perf_counter() - t0}
    rep.update(extra)
    return rep


def identity_experiment(E, m_max=None, restarts=3, seed=0, config=DEFAULT):
    """Bracket ``pi_2(I_E)`` and compare with ``sqrt(dim E)``."""
    t0 = time.perf_counter()
    u = LinearMap(E, E, np.eye(E.dim))
    lo, wit = pi_p_lower(u, 2, m_max, restarts, seed, config=config)
    cert = pietsch_upper_p2(u, None, restarts, seed)
    target = float(np.sqrt(E.dim))
    return _report("pi_2(identity) = sqrt(dim)", target, lo, cert.bound, seed, t0,
                   space=E.name, per_level=wit["per_level"], m_copies=cert.m_copies,
                   contains=bool(lo <= target * (1 + 1e-6) and target <= cert.bound * (1 + 1e-6)))


def cb_minorization_check(u, m_max=4, restarts=3, seed=0, config=DEFAULT):
    """``||u||_cb`` (lower bound) never exceeds the ``pi_2`` upper bound."""
    t0 = time.perf_counter()
    cb = cb_norm(u, seed=seed, config=config)
    cert = pietsch_upper_p2(u, None, restarts, seed)
    lo, _ = pi_p_lower(u, 2, m_max, restarts, seed, config=config)
    tol = 1e-6 * max(1.0, cert.bound)
    return _report("cb norm <= pi_2", cb.lower, lo, cert.bound, seed, t0,
                   cb_lower=cb.lower, cb_upper=cb.upper,
                   violated=bool(cb.lower > cert.bound + tol))


def hs_coincidence_check(u, m_max=None, restarts=3, seed=0, config=DEFAULT):
    """For ``u: OH_i -> OH_j`` compare the ``pi_2`` bracket with the Hilbert-Schmidt norm."""
    if not (isinstance(u.domain, OHSpace) and isinstance(u.codomain, OHSpace)):
        raise ValueError("hs_coincidence_check needs a map between OH spaces")
    t0 = time.perf_counter()
    hs = float(np.linalg.norm(u.action))
    if m_max is None:
        m_max = int(np.ceil(np.sqrt(u.domain.dim)))
    lo, _ = pi_p_lower(u, 2, m_max, restarts, seed, config=config)
    up = pietsch_upper_p2(u, 1, restarts, seed).bound if hs else 0.0
    gap = 0.0 if hs == 0 else max(abs(lo - hs), abs(up - hs)) / hs
    return _report("pi_2 = Hilbert-Schmidt norm on OH", hs, lo, up, seed, t0,
                   rel_gap=gap, contains=bool(lo <= hs * (1 + 1e-6) and hs <= up * (1 + 1e-6)))


def extension_and_projection_experiment(E, restarts=3, seed=0, config=DEFAULT):
    """Projection onto ``E`` and an OH factorization of ``I_E`` built from a Pietsch certificate.

    ``w o P_V o M`` extends ``I_E`` to ``M_d`` (``P_V`` the orthogonal projection onto
    the range ``V`` in ``S_2``), giving a projection ``P: M_d -> E``.  Through ``V``
    (an operator Hilbert space) the same certificate factors ``I_E`` as
    ``E -> OH_n -> E``.
    """
    if not isinstance(E, ConcreteSpace):
        raise ValueError("extension_and_projection_experiment needs a concrete space")
    t0 = time.perf_counter()
    n, d = E.dim, E.ambient_dim
    target = float(np.sqrt(n))
    u = LinearMap(E, E, np.eye(n))
    cert = pietsch_upper_p2(u, None, restarts, seed)
    c = cert.m_copies
    amp = lambda x: np.kron(x, np.eye(c))
    V = np.array([(cert.a @ amp(bk) @ cert.b).ravel() for bk in E.basis])  # (n, D^2)
    G = V.conj() @ V.T
    if np.linalg.cond(G) > 1e10:
        return _report("projection and OH distance bounds", target, np.nan, np.nan, seed, t0,
                       space=E.name, inconclusive=True, reason="singular range")
    # P(x) = w(P_V M(x)): coordinates of P_V M(x) in the basis V solve G c = V^* vec(M x)
    units = [np.zeros((d, d)) for _ in range(d * d)]
    for i in range(d * d):
        units[i][i // d, i % d] = 1.0
    Mx = np.array([(cert.a @ amp(e) @ cert.b).ravel() for e in units])  # (d^2, D^2)
    coords = np.linalg.solve(G, V.conj() @ Mx.T)  # (n, d^2)
    P = LinearMap(full_space(d), E, coords)
    proj_err = float(np.abs(coords @ np.array([b.ravel() for b in E.basis]).T - np.eye(n)).max())
    cbP = cb_norm(P, seed=seed, config=config)
    # E -> OH_n: orthonormal coordinates of M(x) in V; back map OH_n -> E
    L = np.linalg.cholesky(G)  # G = R^* R with R = L^*; q_i = sum_k v_k (R^-1)_ki is orthonormal
    fwd = LinearMap(E, oh_space(n), L.conj().T)
    back = LinearMap(oh_space(n), E, np.linalg.inv(L.conj().T))
    cb_fwd = cb_norm(fwd, seed=seed, config=config)
    cb_back = cb_upper(back)[0]
    dist = cb_fwd.upper * cb_back
    return _report("projection and OH distance bounds", target, cbP.lower, cbP.upper, seed, t0,
                   space=E.name, pietsch_bound=cert.bound, projection_error=proj_err,
                   oh_distance_upper=float(dist), forward_cb=[cb_fwd.lower, cb_fwd.upper],
                   backward_cb=float(cb_back),
                   within=bool(cbP.lower <= 1.1 * target and dist <= 1.1 * target))
