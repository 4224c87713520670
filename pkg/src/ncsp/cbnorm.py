"""Completely bounded norms of linear maps between matrix-norm families.

Lower bounds come from local ascent on the amplifications ``id_{M_n} (x) u``;
upper bounds from a certificate that depends on the pair of spaces:

* concrete -> concrete: a Paulsen/Wittstock factorization ``u(x) = V1* (x (x) I) V2``
  of an extension to the ambient matrix algebra, found by a small SDP and then
  repaired so that it is exactly feasible;
* OH -> OH: the operator norm (OH is homogeneous);
* OH -> concrete: ``||sum_i t_i (x) conj(t_i)||^(1/2)`` with ``t_i`` the images of
  an orthonormal basis;
* concrete -> OH: the smaller of the nuclear bound and the geometric mean of the
  cb norms into R_n and C_n.
"""

from dataclasses import dataclass

import numpy as np
import torch

from . import optim
from .bracket import NormBracket
from .config import DEFAULT
from .matrix_core import operator_norm, random_complex
from .opspace import ConcreteSpace, OHSpace, column_space, row_space


@dataclass
class LinearMap:
    """``u(e_k) = sum_l action[l, k] f_l`` for bases ``(e_k)`` of the domain, ``(f_l)`` of the codomain."""

    domain: object
    codomain: object
    action: np.ndarray

    def __post_init__(self):
        self.action = np.asarray(self.action, complex)
        if self.action.shape != (self.codomain.dim, self.domain.dim):
            raise ValueError(f"action must have shape ({self.codomain.dim}, {self.domain.dim}), "
                             f"got {self.action.shape}")

    def apply(self, X):
        """Apply ``id (x) u`` to a coefficient block of shape ``(r, s, dim E)``."""
        return np.asarray(X, complex) @ self.action.T

    def compose(self, other):
        """``self o other``."""
        return LinearMap(other.domain, self.codomain, self.action @ other.action)

    def scaled(self, factor):
        return LinearMap(self.domain, self.codomain, factor * self.action)


def identity_map(space):
    return LinearMap(space, space, np.eye(space.dim))


def level_ratio(u, X):
    """``||(id (x) u) X|| / ||X||`` at the level of ``X``."""
    den = u.domain.level_norm(X)
    return 0.0 if den == 0 else u.codomain.level_norm(u.apply(X)) / den


def _level_ascent(u, n, restarts, seed, maxiter=200):
    """Best ratio found at level ``n`` and the block achieving it."""
    A = torch.as_tensor(u.action.T)
    k = u.domain.dim
    packer = optim.Packer({"X": (n, n, k)}, complex_keys=["X"])
    best, best_X = -1.0, None
    for r in range(restarts):
        rng = np.random.default_rng([seed, n, r])
        x = packer.pack({"X": random_complex((n, n, k), rng)})
        for q in (8, 32, 128):
            def fun(P, q=q):
                X = P["X"]
                num = optim.level_norm_t(u.codomain, X @ A, q)
                den = optim.level_norm_t(u.domain, X, q)
                return torch.log(den) - torch.log(num)

            x, _ = optim.minimize(fun, packer, x, maxiter=maxiter)
        X = packer.unpack(x)["X"]
        val = level_ratio(u, X)
        if val > best:
            best, best_X = val, X
    return best, best_X


def _paulsen_upper(u):
    """Certified upper bound for a map between concrete spaces.

    An extension ``phi: M_d -> M_k`` with ``phi(e_ij) = J_ij`` has cb norm at most
    ``sqrt(||sum_i P_ii|| ||sum_i Q_ii||)`` whenever ``[[P, J], [J*, Q]] >= 0``.
    """
    import cvxpy as cp

    E, F = u.domain, u.codomain
    d, k = E.ambient_dim, F.ambient_dim
    images = np.tensordot(u.action, F.basis, axes=(0, 0))  # u(b_l) in M_k, shape (dimE, k, k)
    n = d * k
    M = cp.Variable((2 * n, 2 * n), hermitian=True)
    J = M[:n, n:]
    cons = [M >> 0]
    for l in range(E.dim):
        b = E.basis[l]
        expr = 0
        for i in range(d):
            for j in range(d):
                if b[i, j] != 0:
                    expr = expr + b[i, j] * J[i * k:(i + 1) * k, j * k:(j + 1) * k]
        cons.append(expr == images[l])
    t = cp.Variable()
    sumP = sum(M[i * k:(i + 1) * k, i * k:(i + 1) * k] for i in range(d))
    sumQ = sum(M[n + i * k:n + (i + 1) * k, n + i * k:n + (i + 1) * k] for i in range(d))
    cons += [sumP << t * np.eye(k), sumQ << t * np.eye(k)]
    prob = cp.Problem(cp.Minimize(t), cons)
    try:
        prob.solve(solver="CLARABEL")
    except cp.error.SolverError:
        return np.inf, None
    if M.value is None:
        return np.inf, None
    Mv = 0.5 * (M.value + M.value.conj().T)
    # repair: make the off-diagonal block satisfy the linear constraints exactly
    Jv = Mv[:n, n:].reshape(d, k, d, k).transpose(0, 2, 1, 3)  # J[i, j] blocks
    L = E.basis.reshape(E.dim, d * d)  # constraint: sum_ij b_l[i,j] J_ij = images[l]
    resid = images - np.einsum("lij,ijab->lab", E.basis, Jv)
    corr = np.linalg.lstsq(L, resid.reshape(E.dim, k * k), rcond=None)[0]
    Jv = Jv + corr.reshape(d, d, k, k)
    Jfix = Jv.transpose(0, 2, 1, 3).reshape(n, n)
    delta = operator_norm(Jfix - Mv[:n, n:])
    Mv[:n, n:] = Jfix
    Mv[n:, :n] = Jfix.conj().T
    lam = np.linalg.eigvalsh(Mv)[0]
    scale = max(np.abs(Mv).max(), 1e-300)
    shift = max(0.0, -lam) + 1e-12 * scale * 2 * n
    assert delta >= 0
    P = sum(Mv[i * k:(i + 1) * k, i * k:(i + 1) * k] for i in range(d))
    Q = sum(Mv[n + i * k:n + (i + 1) * k, n + i * k:n + (i + 1) * k] for i in range(d))
    up = np.sqrt((operator_norm(P) + d * shift) * (operator_norm(Q) + d * shift))
    return float(up), {"kind": "paulsen-factorization", "shift": float(shift),
                       "repair": float(delta), "solver_value": float(prob.value)}


def _oh_to_concrete(u):
    t = np.tensordot(u.action.T, u.codomain.basis, axes=(1, 0))  # images of e_i, (n, k, k)
    S = np.einsum("iab,icd->acbd", t, t.conj()).reshape(t.shape[1] ** 2, t.shape[2] ** 2)
    return float(np.sqrt(operator_norm(S)))


def _functional_norm_upper(E, phi):
    """Upper bound for the norm of ``x -> sum_k phi[k] x_k`` on concrete E (trace norm of a representer)."""
    G = np.einsum("kab,lab->kl", E.basis.conj(), E.basis)
    # representer rho in span(b_k^*) ... find rho with tr(rho b_k) = phi[k]
    c = np.linalg.solve(G.T, phi)
    rho = np.tensordot(c, E.basis.conj(), axes=(0, 0)).T
    return float(np.sum(np.linalg.svd(rho, compute_uv=False)))


def cb_upper(u):
    """Best available certified upper bound and a short certificate."""
    E, F = u.domain, u.codomain
    if not np.any(u.action):
        return 0.0, {"kind": "zero"}
    if isinstance(E, OHSpace) and isinstance(F, OHSpace):
        return operator_norm(u.action), {"kind": "oh-homogeneous"}
    if isinstance(E, OHSpace) and isinstance(F, ConcreteSpace):
        return _oh_to_concrete(u), {"kind": "oh-domain-formula"}
    if isinstance(E, ConcreteSpace) and isinstance(F, ConcreteSpace):
        return _paulsen_upper(u)
    if isinstance(E, ConcreteSpace) and isinstance(F, OHSpace):
        nuclear = sum(_functional_norm_upper(E, u.action[l]) for l in range(F.dim))
        n = F.dim
        ur, _ = _paulsen_upper(LinearMap(E, row_space(n), u.action))
        uc, _ = _paulsen_upper(LinearMap(E, column_space(n), u.action))
        interp = np.sqrt(ur * uc)
        if interp <= nuclear:
            return float(interp), {"kind": "row-column-interpolation"}
        return float(nuclear), {"kind": "nuclear"}
    return np.inf, {"kind": "none"}


def cb_norm(u, max_level=None, restarts=None, seed=0, config=DEFAULT):
    """Bracket on ``||u||_cb``.

    Parameters
    ----------
    u : LinearMap
    max_level : int
        Largest amplification level searched for the lower bound.
    restarts : int
        Random restarts per level (default from the config budget).
    seed : int

    Returns
    -------
    NormBracket
        ``lower_witness`` is ``(n, X)``; replaying ``level_ratio(u, X)`` gives ``lower``.
    """
    if max_level is None:
        max_level = 2
    if max_level < 1:
        raise ValueError("max_level must be >= 1")
    restarts = config.budget.cb_restarts if restarts is None else int(restarts)
    scale = float(np.linalg.norm(u.action))
    if scale == 0:
        return NormBracket(0.0, 0.0, None, {"kind": "zero"})
    unit = u.scaled(1.0 / scale)
    lower, witness, per_level = 0.0, None, []
    for n in range(1, max_level + 1):
        val, X = _level_ascent(unit, n, restarts, seed)
        per_level.append(val * scale)
        if val > lower:
            lower, witness = val, (n, X)
    upper, cert = cb_upper(unit)
    lower, upper = lower * scale, upper * scale
    if upper < lower:
        # certificates carry solver slack; never report an inverted bracket
        upper = lower
        cert = dict(cert, clipped=True)
    return NormBracket(lower, upper, witness, cert, {"levels": per_level, "max_level": max_level})
