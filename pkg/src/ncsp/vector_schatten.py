"""Vector-valued Schatten classes ``S_p^m[E]``.

The norm of ``u`` in ``S_p^m[E]`` is the infimum of ``||a||_2p ||v||_{M_m(E)} ||b||_2p``
over factorizations ``u = (a (x) I) v (b (x) I)``.  For concrete E this is a
convex problem (see ``_barrier``) whose dual point certifies a lower bound; for
OH it is searched locally and the lower bound comes from the self-pairing of
OH.

Pairing convention: ``<u, w> = sum_{i,j,k} u[i, j, k] w[j, i, k]``, i.e. the trace
pairing on the Schatten leg and the coordinate pairing on E.  A witness ``w``
is stored together with an upper bound for its dual norm.

Coefficient layout: ``coeffs[i, j, k]`` is the k-th coordinate of the (i, j)
entry.  Elements of ``M_n(S_p^m[E])`` are arrays ``x[alpha, beta, i, j, k]`` and
composite indices always put the ``S_p^m`` index (i) outside the level index
(alpha).
"""

from dataclasses import dataclass, field

import numpy as np
import torch

from . import _barrier, optim
from .bracket import NormBracket
from .config import DEFAULT
from .matrix_core import matrix_from_literal, operator_norm, partial_trace_inner, psd_power, schatten_norm
from .opspace import ConcreteSpace, OHSpace, matrix_level, space_from_ref, space_ref


def parse_p(p):
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "infinity", "∞"):
            return np.inf
        p = float(p)
    p = float(p)
    if not p >= 1:
        raise ValueError(f"p must lie in [1, inf], got {p}")
    return p


def conjugate_exponent(p):
    if p == 1:
        return np.inf
    if np.isinf(p):
        return 1.0
    return p / (p - 1)


@dataclass
class SpElement:
    """An element of ``S_p^m[E]``."""

    p: float
    space: object
    coeffs: np.ndarray

    def __post_init__(self):
        self.p = parse_p(self.p)
        self.coeffs = np.asarray(self.coeffs, complex)
        c = self.coeffs
        if c.ndim != 3 or c.shape[0] != c.shape[1] or c.shape[2] != self.space.dim:
            raise ValueError(f"coefficients of shape {c.shape} do not fit S_p^m[{self.space.name}]")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")

    @property
    def m(self):
        return self.coeffs.shape[0]

    def ambient(self):
        """``sum_{ij} e_ij (x) u_ij`` as an ``(m d) x (m d)`` matrix (concrete E only)."""
        return self.space.level_matrix(self.coeffs)

    def with_p(self, p):
        return SpElement(p, self.space, self.coeffs)

    def to_json(self):
        return {"p": "inf" if np.isinf(self.p) else self.p, "m": self.m,
                "space": space_ref(self.space),
                "coeffs": [[[[float(z.real), float(z.imag)] for z in vec] for vec in row]
                           for row in self.coeffs]}

    @classmethod
    def from_json(cls, obj):
        try:
            space = space_from_ref(obj["space"])
            arr = np.asarray(obj["coeffs"], float)
            m = int(obj["m"])
            p = obj["p"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed element: {exc}") from None
        if arr.ndim != 4 or arr.shape[-1] != 2 or arr.shape[:2] != (m, m):
            raise ValueError("coeffs must be an m x m array of [re, im] coordinate vectors")
        return cls(p, space, arr[..., 0] + 1j * arr[..., 1])


def random_element(space, m, p, rng):
    c = rng.standard_normal((m, m, space.dim)) + 1j * rng.standard_normal((m, m, space.dim))
    return SpElement(p, space, c)


def compress(a, c, b):
    """``(a (x) I) c (b (x) I)`` on coefficient arrays."""
    return np.einsum("ij,jlk,lr->irk", a, c, b)


@dataclass
class FactorizationCert:
    """``u = (a (x) I) v (b (x) I)`` and the bound ``||a||_2p ||v||_inf ||b||_2p``."""

    a: np.ndarray
    b: np.ndarray
    v: SpElement
    value: float
    flags: dict = field(default_factory=dict)

    def reconstruct(self):
        return compress(self.a, self.v.coeffs, self.b)

    def residual(self, u):
        scale = np.linalg.norm(u.coeffs)
        diff = np.linalg.norm(self.reconstruct() - u.coeffs)
        return diff / scale if scale else diff

    def recompute(self, p):
        """Re-evaluate the bound from the factors."""
        return schatten_norm(self.a, 2 * p) * self.v.space.level_norm(self.v.coeffs) * schatten_norm(self.b, 2 * p)


@dataclass
class DualWitness:
    """A functional ``w`` with ``||w||_{S_p'[E*]} <= norm_bound``."""

    w: np.ndarray
    norm_bound: float
    kind: str = "pairing"

    def pair(self, coeffs):
        return complex(np.einsum("ijk,jik->", coeffs, self.w))

    def evaluate(self, u):
        coeffs = u.coeffs if isinstance(u, SpElement) else np.asarray(u, complex)
        if self.norm_bound == 0 or coeffs.shape != self.w.shape:
            return 0.0
        return abs(self.pair(coeffs)) / self.norm_bound

    def functional(self):
        """``phi`` with ``<u, w> / norm_bound = sum(phi * u)``."""
        return self.w.transpose(1, 0, 2) / self.norm_bound


def _zero_cert(u):
    m = u.m
    return FactorizationCert(np.zeros((m, m)), np.zeros((m, m)), u.with_p(np.inf), 0.0, {"zero": True})


def _trivial_cert(u):
    I = np.eye(u.m)
    return FactorizationCert(I, I, u.with_p(np.inf), u.space.level_norm(u.coeffs), {"exact": True})


# --------------------------------------------------------------- concrete path

def _concrete_solve(u, config):
    """Primal certificate and dual witness from one barrier solve."""
    U = u.ambient()
    s = operator_norm(U)
    if s == 0:
        return _zero_cert(u), DualWitness(np.zeros_like(u.coeffs), 1.0, "zero")
    m, p = u.m, u.p
    res = _barrier.solve(U / s, m, p, gap_rtol=config.tol.barrier_gap)
    A, B = res.A * s, res.B * s
    a, b = psd_power(A, 0.5), psd_power(B, 0.5)
    ainv, binv = np.linalg.inv(a), np.linalg.inv(b)
    v = SpElement(np.inf, u.space, compress(ainv, u.coeffs, binv))
    flags = {"newton_iterations": res.iterations, "barrier_mu": res.mu}
    for name, X in (("a", A), ("b", B)):
        lam = np.linalg.eigvalsh(X)
        if lam[0] < config.tol.eigen_floor * lam[-1]:
            flags[f"near_singular_{name}"] = float(lam[0] / lam[-1])
    cert = FactorizationCert(a, b, v, 0.0, flags)
    cert.value = cert.recompute(p)
    return cert, _witness_from_dual(res.G, u.space, m, p)


def _witness_from_dual(G, space, m, p):
    n = G.shape[0] // 2
    D = n // m
    lam = np.linalg.eigvalsh(G)[0]
    shift = max(0.0, -lam) + 1e-14 * np.abs(G).max() * len(G)
    pq = conjugate_exponent(p)
    P1 = partial_trace_inner(G[:n, :n], m, D) + shift * D * np.eye(m)
    P2 = partial_trace_inner(G[n:, n:], m, D) + shift * D * np.eye(m)
    norm = np.sqrt(schatten_norm(P1, pq) * schatten_norm(P2, pq))
    G12 = G[:n, n:].reshape(m, D, m, D)
    # -Re tr(G12* U) = Re sum_ijk phi[i, j, k] u[i, j, k]
    phi = -np.einsum("iajb,kab->ijk", G12.conj(), space.basis)
    return DualWitness(phi.transpose(1, 0, 2), float(norm), "barrier-dual")


# --------------------------------------------------------------- search path

def _initial_factors(c):
    left = psd_power(np.einsum("ijk,ljk->il", c, c.conj()), 0.25)
    right = psd_power(np.einsum("jik,jlk->il", c.conj(), c), 0.25)
    eps = 1e-3 * max(operator_norm(left), 1e-300)
    I = np.eye(len(c))
    return left + eps * I, right + eps * I


def _search_upper(u, restarts, seed):
    m, p, space = u.m, u.p, u.space
    C = torch.as_tensor(u.coeffs).permute(2, 0, 1)
    packer = optim.Packer({"a": (m, m), "b": (m, m)}, complex_keys=["a", "b"])
    a0, b0 = _initial_factors(u.coeffs)
    best = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        if r == 0:
            a_init, b_init = a0, b0
        else:
            a_init = a0 @ (np.eye(m) + 0.3 * (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))))
            b_init = (np.eye(m) + 0.3 * (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))) @ b0
        x = packer.pack({"a": a_init, "b": b_init})
        for q in (16, 64, 256):
            def fun(P, q=q):
                a, b = P["a"], P["b"]
                v = torch.linalg.solve(a, C)
                v = torch.linalg.solve(b.mT, v.mT).mT
                na = torch.sum(torch.linalg.svdvals(a) ** (2 * p)) ** (1 / (2 * p))
                nb = torch.sum(torch.linalg.svdvals(b) ** (2 * p)) ** (1 / (2 * p))
                nv = optim.level_norm_t(space, v.permute(1, 2, 0), q)
                return torch.log(na) + torch.log(nb) + torch.log(nv)

            x, _ = optim.minimize(fun, packer, x)
        P = packer.unpack(x)
        a, b = P["a"], P["b"]
        try:
            v = compress(np.linalg.inv(a), u.coeffs, np.linalg.inv(b))
        except np.linalg.LinAlgError:
            continue
        cert = FactorizationCert(a, b, SpElement(np.inf, space, v), 0.0, {"restart": r})
        cert.value = cert.recompute(p)
        if best is None or cert.value < best.value:
            best = cert
    if best is None:
        raise _barrier.BarrierFailure("every restart produced a singular factor")
    return best


def _schatten_t(a, s):
    sv = torch.linalg.svdvals(a)
    if np.isinf(s):
        return sv.max()
    return torch.sum(sv ** s) ** (1 / s)


def _witness_search(u, restarts, seed):
    """Dual witness ``w = (a (x) I) v (b (x) I)`` maximizing ``|<u, w>| / (||a|| ||v|| ||b||)``.

    Any factorization bounds the dual norm of ``w`` from above, so the ratio is
    a certified lower bound whatever the optimizer returns.  Uses the
    self-duality of OH: the dual of ``S_p[OH]`` is ``S_p'[OH]`` in this pairing.
    """
    m, space = u.m, u.space
    s = 2 * conjugate_exponent(u.p)
    U = torch.as_tensor(u.coeffs)
    w0 = u.coeffs.conj().transpose(1, 0, 2)
    a0, b0 = _initial_factors(w0)
    v0 = compress(np.linalg.inv(a0), w0, np.linalg.inv(b0))
    packer = optim.Packer({"a": (m, m), "v": (m, m, space.dim), "b": (m, m)}, complex_keys=["a", "v", "b"])
    best = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, 101, r])
        if r == 0:
            start = {"a": a0, "v": v0, "b": b0}
        else:
            pert = lambda: np.eye(m) + 0.3 * (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))
            start = {"a": a0 @ pert(), "v": v0, "b": pert() @ b0}
        x = packer.pack(start)
        for q in (16, 64, 256):
            def fun(P, q=q):
                a, v, b = P["a"], P["v"], P["b"]
                w = torch.einsum("ij,jlk,lr->irk", a, v, b)
                pair = torch.abs(torch.einsum("ijk,jik->", U, w))
                nv = optim.level_norm_t(space, v, q)
                return torch.log(_schatten_t(a, s)) + torch.log(_schatten_t(b, s)) + torch.log(nv) - torch.log(pair)

            x, _ = optim.minimize(fun, packer, x)
        P = packer.unpack(x)
        bound = schatten_norm(P["a"], s) * space.level_norm(P["v"]) * schatten_norm(P["b"], s)
        wit = DualWitness(compress(P["a"], P["v"], P["b"]), float(bound), "factorized-pairing")
        if best is None or wit.evaluate(u) > best.evaluate(u):
            best = wit
    return best


def _oh_witness(u, restarts, seed):
    return _witness_search(u, max(1, restarts), seed)


# --------------------------------------------------------------- public API

def sp_norm_upper(u, restarts=None, seed=0, method="auto", config=DEFAULT):
    """Factorization certificate for ``||u||_{S_p^m[E]}``.

    ``method="auto"`` uses the convex solver for concrete E and local search
    otherwise; ``method="search"`` forces local search (used as a cross-check).
    """
    restarts = config.budget.sp_restarts if restarts is None else int(restarts)
    if not np.any(u.coeffs):
        return _zero_cert(u)
    if np.isinf(u.p):
        return _trivial_cert(u)
    if method == "auto" and isinstance(u.space, ConcreteSpace):
        return _concrete_solve(u, config)[0]
    if method not in ("auto", "search"):
        raise ValueError(f"unknown method {method!r}")
    return _search_upper(u, max(1, restarts), seed)


def _lower_witness(u, restarts, seed, config):
    if not np.any(u.coeffs):
        return 0.0, DualWitness(np.zeros_like(u.coeffs), 1.0, "zero")
    if np.isinf(u.p):
        val = u.space.level_norm(u.coeffs)
        return val, None
    if isinstance(u.space, ConcreteSpace):
        w = _concrete_solve(u, config)[1]
    elif isinstance(u.space, OHSpace):
        w = _oh_witness(u, restarts, seed)
    else:
        return 0.0, None
    return w.evaluate(u), w


def sp_norm_lower(u, dual_witnesses=(), restarts=None, seed=0, config=DEFAULT):
    """Largest certified lower bound from the searched witness and any supplied ones."""
    restarts = config.budget.sp_restarts if restarts is None else int(restarts)
    val, _ = _lower_witness(u, max(1, restarts // 4), seed, config)
    for w in dual_witnesses or ():
        val = max(val, w.evaluate(u))
    return float(val)


def sp_norm(u, restarts=None, seed=0, config=DEFAULT):
    """Bracket on ``||u||_{S_p^m[E]}``."""
    restarts = config.budget.sp_restarts if restarts is None else int(restarts)
    if not np.any(u.coeffs):
        return NormBracket(0.0, 0.0, None, _zero_cert(u))
    if np.isinf(u.p):
        val = u.space.level_norm(u.coeffs)
        return NormBracket(val, val, None, _trivial_cert(u), {"exact": True})
    if isinstance(u.space, ConcreteSpace):
        cert, w = _concrete_solve(u, config)
        lower = w.evaluate(u)
    else:
        cert = _search_upper(u, max(1, restarts), seed)
        lower, w = _lower_witness(u, max(1, restarts // 4), seed, config)
    return NormBracket(lower, cert.value, w, cert)


# --------------------------------------------------------------- matrix levels

@dataclass
class SpMatrixElement:
    """An element of ``M_n(S_p^m[E])``: ``coeffs[alpha, beta]`` lies in ``S_p^m[E]``."""

    p: float
    space: object
    coeffs: np.ndarray

    def __post_init__(self):
        self.p = parse_p(self.p)
        self.coeffs = np.asarray(self.coeffs, complex)
        c = self.coeffs
        if c.ndim != 5 or c.shape[0] != c.shape[1] or c.shape[2] != c.shape[3] or c.shape[4] != self.space.dim:
            raise ValueError(f"coefficients of shape {c.shape} do not fit M_n(S_p^m[{self.space.name}])")

    @property
    def n(self):
        return self.coeffs.shape[0]

    @property
    def m(self):
        return self.coeffs.shape[2]

    def compressed(self, a, b):
        """``M(a, b) x`` in ``S_p^{mn}[E]`` (index (i, alpha), i outside)."""
        n, m, k = self.n, self.m, self.space.dim
        c = np.einsum("xyijk,ax,yb->iajbk", self.coeffs, a, b)
        return SpElement(self.p, self.space, c.reshape(m * n, m * n, k))

    def as_level_element(self):
        """The same data in ``S_p^m[M_n(E)]`` (coordinates ordered (alpha, beta, k))."""
        n, m, k = self.n, self.m, self.space.dim
        c = self.coeffs.transpose(2, 3, 0, 1, 4).reshape(m, m, n * n * k)
        return SpElement(self.p, matrix_level(self.space, n), c)

    def infinity_norm(self):
        """Norm in ``M_n(S_inf^m[E]) = M_{nm}(E)``."""
        n, m, k = self.n, self.m, self.space.dim
        c = self.coeffs.transpose(0, 2, 1, 3, 4).reshape(n * m, n * m, k)
        return self.space.level_norm(c)


def _norming(M, s):
    """``a`` with ``||a||_s <= 1`` maximizing ``Re tr(a M)``."""
    U, sig, Vh = np.linalg.svd(M)
    if sig[0] == 0:
        return np.eye(len(M)) / len(M) ** (1 / s)
    r = s / (s - 1)
    f = sig ** (r - 1)
    f = f / np.sum(sig ** r) ** ((r - 1) / r)
    return (Vh.conj().T * f) @ U.conj().T


def _unit_ball_sample(n, s, rng):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return g / schatten_norm(g, s)


def _hs_upper(x):
    """For scalar E and p = 2: Cauchy-Schwarz bound on the compression supremum."""
    X = x.coeffs[..., 0]  # (n, n, m, m)
    n = x.n
    M = np.einsum("xyij,zwij->xzyw", X, X.conj()).reshape(n * n, n * n)
    return float(np.sqrt(operator_norm(M)))


def sp_matrix_norm(x, samples=None, ascents=None, seed=0, config=DEFAULT):
    """Bracket on the norm of ``x`` in ``M_n(S_p^m[E])``.

    Lower: supremum of certified lower bounds for ``M(a, b) x`` over ``a, b`` in
    the unit ball of ``S_2p^n`` (random samples, then alternating ascent where
    each step maximizes the current dual witness in closed form).  Upper: the
    factorization bound in ``S_p^m[M_n(E)]``, plus the Hilbert-Schmidt bound for
    scalar E at p = 2.
    """
    samples = config.budget.eq2_samples if samples is None else int(samples)
    ascents = config.budget.eq2_ascents if ascents is None else int(ascents)
    if not np.any(x.coeffs):
        return NormBracket(0.0, 0.0)
    if np.isinf(x.p):
        val = x.infinity_norm()
        return NormBracket(val, val, None, {"kind": "exact-level-norm"})
    n, p = x.n, x.p
    if n == 1:
        return sp_norm(SpElement(p, x.space, x.coeffs[0, 0]), seed=seed, config=config)

    up_cert = sp_norm_upper(x.as_level_element(), seed=seed, config=config)
    upper, kind = up_cert.value, "factorization-matrix-level"
    if x.space.dim == 1 and isinstance(x.space, ConcreteSpace) and x.space.ambient_dim == 1 and p == 2:
        hs = _hs_upper(x) * abs(x.space.basis[0, 0, 0])
        if hs < upper:
            upper, kind = hs, "hilbert-schmidt"

    s = 2 * p
    rng = np.random.default_rng([seed, 7])
    I = np.eye(n) / n ** (1 / s)
    base_val, base_w = _lower_witness(x.compressed(I, I), 2, seed, config)
    cands = [(I, I)]
    for _ in range(samples):
        cands.append((_unit_ball_sample(n, s, rng), _unit_ball_sample(n, s, rng)))
    if base_w is not None:
        scores = [base_w.evaluate(x.compressed(a, b)) for a, b in cands]
        order = np.argsort(scores)[::-1]
        cands = [cands[0]] + [cands[i] for i in order if i != 0][:max(ascents - 1, 0)]
    else:
        cands = cands[:ascents]

    best, best_ab = base_val, (I, I)
    m, k = x.m, x.space.dim
    for a, b in cands:
        prev = -1.0
        for _ in range(8):
            val, w = _lower_witness(x.compressed(a, b), 2, seed, config)
            if val > best:
                best, best_ab = val, (a, b)
            if w is None or val <= prev * (1 + 1e-9):
                break
            prev = val
            phi = w.functional().reshape(m, n, m, n, k)
            phase = np.exp(-1j * np.angle(np.sum(phi.reshape(m * n, m * n, k) * x.compressed(a, b).coeffs)))
            phi = phi * phase
            Ga = np.einsum("iajbk,xyijk,yb->ax", phi, x.coeffs, b)
            a = _norming(Ga.T, s)
            Gb = np.einsum("iajbk,xyijk,ax->yb", phi, x.coeffs, a)
            b = _norming(Gb.T, s)
    upper = max(upper, best)
    return NormBracket(best, upper, best_ab, {"kind": kind},
                       {"upper_factorization": up_cert.value})


# --------------------------------------------------------------- Fubini and inclusions

def fubini_reshape(coeffs, m1, m2, direction="flatten"):
    """Move between nested ``(m1, m1, m2, m2, k)`` and flat ``(m1 m2, m1 m2, k)`` layouts.

    The composite index is ``(i1, i2)`` in lexicographic order.
    """
    c = np.asarray(coeffs, complex)
    if direction == "flatten":
        if c.ndim != 5 or c.shape[:4] != (m1, m1, m2, m2):
            raise ValueError(f"nested coefficients must have shape ({m1}, {m1}, {m2}, {m2}, k)")
        return c.transpose(0, 2, 1, 3, 4).reshape(m1 * m2, m1 * m2, c.shape[4])
    if direction == "nest":
        if c.ndim != 3 or c.shape[:2] != (m1 * m2, m1 * m2):
            raise ValueError(f"flat coefficients must have shape ({m1 * m2}, {m1 * m2}, k)")
        return c.reshape(m1, m2, m1, m2, c.shape[2]).transpose(0, 2, 1, 3, 4)
    raise ValueError("direction must be 'flatten' or 'nest'")


def swap_legs(coeffs):
    """``(m1, m1, m2, m2, k) -> (m2, m2, m1, m1, k)``."""
    return np.asarray(coeffs).transpose(2, 3, 0, 1, 4)


def nested_upper(space, p_outer, p_inner, coeffs, seed=0, config=DEFAULT):
    """Upper bound for the norm in ``S_{p_outer}^{m1}[S_{p_inner}^{m2}[E]]``.

    Uses ``x = (a (x) I) v (b (x) I)`` on the outer leg with ``v`` measured in
    ``M_{m1}(S_{p_inner}^{m2}[E])`` and bounded through ``S_{p_inner}^{m2}[M_{m1}(E)]``.
    Factors are taken from the identity and from the flat optimal factorization.
    """
    c = np.asarray(coeffs, complex)
    m1, m2, k = c.shape[0], c.shape[2], c.shape[4]
    if not np.any(c):
        return 0.0, None
    po = parse_p(p_outer)

    def inner(cc):
        return sp_norm_upper(SpMatrixElement(p_inner, space, cc).as_level_element(),
                             seed=seed, config=config).value

    if np.isinf(po):
        return inner(c), (np.eye(m1), np.eye(m1))
    candidates = [(np.eye(m1), np.eye(m1))]
    flat = SpElement(po, space, fubini_reshape(c, m1, m2))
    if isinstance(space, ConcreteSpace):
        cert = sp_norm_upper(flat, seed=seed, config=config)
        A = partial_trace_inner(cert.a @ cert.a.conj().T, m1, m2) / m2
        B = partial_trace_inner(cert.b.conj().T @ cert.b, m1, m2) / m2
        candidates.append((psd_power(A, 0.5), psd_power(B, 0.5)))
    best, best_ab = np.inf, None
    for a, b in candidates:
        try:
            ai, bi = np.linalg.inv(a), np.linalg.inv(b)
        except np.linalg.LinAlgError:
            continue
        v = np.einsum("ij,jlxyk,lr->irxyk", ai, c, bi)
        val = schatten_norm(a, 2 * po) * inner(v) * schatten_norm(b, 2 * po)
        if val < best:
            best, best_ab = val, (a, b)
    return float(best), best_ab


def nested_lower(space, p_inner, coeffs, seed=0, config=DEFAULT, probes=8):
    """Lower bound for a nested norm: compressions to a single outer entry are contractive."""
    c = np.asarray(coeffs, complex)
    m1 = c.shape[0]
    rng = np.random.default_rng([seed, 11])
    best = 0.0
    probes_list = [(np.eye(m1)[i], np.eye(m1)[j]) for i in range(m1) for j in range(m1)]
    for _ in range(probes):
        xi = rng.standard_normal(m1) + 1j * rng.standard_normal(m1)
        eta = rng.standard_normal(m1) + 1j * rng.standard_normal(m1)
        probes_list.append((xi / np.linalg.norm(xi), eta / np.linalg.norm(eta)))
    for xi, eta in probes_list:
        y = np.einsum("i,ijxyk,j->xyk", xi.conj(), c, eta)
        best = max(best, sp_norm_lower(SpElement(p_inner, space, y), seed=seed, config=config))
    return best


def pq_inclusion_check(space, coeffs, p, q, seed=0, tol=1e-6, config=DEFAULT):
    """Check that ``S_p^{m1}[S_q^{m2}[E]] -> S_q^{m2}[S_p^{m1}[E]]`` does not expand.

    ``coeffs`` has the nested shape ``(m1, m1, m2, m2, k)``.  The target norm is
    bounded below through the contractive inclusion into ``M_{m2}(S_p^{m1}[E])``
    and compared with an upper bound for the source norm.
    """
    p, q = parse_p(p), parse_p(q)
    if p > q:
        raise ValueError(f"the inclusion needs p <= q (got p={p}, q={q})")
    c = np.asarray(coeffs, complex)
    if c.ndim != 5:
        raise ValueError("coefficients must have the nested shape (m1, m1, m2, m2, k)")
    if not np.any(c):
        return {"lower_target": 0.0, "upper_source": 0.0, "violated": False, "p": p, "q": q}
    upper_source, _ = nested_upper(space, p, q, c, seed=seed, config=config)
    target = SpMatrixElement(p, space, swap_legs(c))
    lower_target = sp_matrix_norm(target, samples=8, ascents=2, seed=seed, config=config).lower
    violated = lower_target > upper_source * (1 + tol)
    return {"lower_target": float(lower_target), "upper_source": float(upper_source),
            "violated": bool(violated), "p": p, "q": q}
