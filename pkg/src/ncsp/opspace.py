"""Operator spaces as families of matrix norms.

A space is anything with a ``dim`` and a ``level_matrix`` map: the norm of a
coefficient block ``X`` (shape ``(r, s, dim)``, meaning ``sum_k X[:, :, k] (x) e_k``
in ``M_{r,s}(E)``) is ``||level_matrix(X)||_op ** power``.  Concrete spaces embed
into ``M_d`` (power 1); ``OH_n`` uses ``||sum_k X_k (x) conj(X_k)||^(1/2)``.
"""

from dataclasses import dataclass

import numpy as np

from .matrix_core import as_matrix, matrix_from_literal, matrix_to_literal, operator_norm


class UnsupportedCombination(ValueError):
    pass


def _torch():
    import torch

    return torch


class _Space:
    power = 1.0
    concrete = False

    def level_norm(self, X):
        X = self._check(X)
        if X.size == 0:
            return 0.0
        return operator_norm(self.level_matrix(X)) ** self.power

    def _check(self, X):
        X = np.asarray(X, dtype=complex)
        if X.ndim != 3 or X.shape[2] != self.dim:
            raise ValueError(f"{self.name}: coefficient block must have shape (r, s, {self.dim}), got {X.shape}")
        return X

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class ConcreteSpace(_Space):
    """A subspace of ``M_d`` spanned by linearly independent matrices."""

    concrete = True

    def __init__(self, basis, name="custom", gram_tol=1e-10):
        basis = np.array([as_matrix(b) for b in basis])
        if basis.ndim != 3 or basis.shape[1] != basis.shape[2] or len(basis) == 0:
            raise ValueError("basis must be a non-empty list of square matrices of one size")
        k = len(basis)
        flat = basis.reshape(k, -1)
        gram = flat.conj() @ flat.T
        scale = np.max(np.abs(np.diag(gram)))
        if scale == 0 or abs(np.linalg.det(gram / scale)) < gram_tol:
            raise ValueError(f"basis of {name!r} is not linearly independent (Gram test {gram_tol})")
        self.basis = basis
        self.name = name
        self._gram = gram

    @property
    def dim(self):
        return len(self.basis)

    @property
    def ambient_dim(self):
        return self.basis.shape[1]

    def level_matrix(self, X):
        r, s, k = X.shape
        d = self.ambient_dim
        # sum_k X[:, :, k] (x) b_k with the outer index from X
        return np.einsum("rsk,kab->rasb", X, self.basis).reshape(r * d, s * d)

    def level_matrix_t(self, X):
        torch = _torch()
        r, s, k = X.shape
        d = self.ambient_dim
        B = torch.as_tensor(self.basis)
        return torch.einsum("rsk,kab->rasb", X, B).reshape(r * d, s * d)

    def element(self, coords):
        """The ambient matrix ``sum_k coords[k] b_k``."""
        return np.tensordot(np.asarray(coords, complex), self.basis, axes=(0, 0))

    def coordinates(self, m):
        """Coefficients of ``m`` in the basis (Hilbert-Schmidt projection onto the span)."""
        m = np.asarray(m, complex)
        rhs = np.einsum("kab,...ab->...k", self.basis.conj(), m)
        return np.linalg.solve(self._gram, rhs[..., None])[..., 0]

    def to_json(self):
        return {"name": self.name, "ambient_dim": self.ambient_dim,
                "basis": [matrix_to_literal(b) for b in self.basis]}


class OHSpace(_Space):
    """The operator Hilbert space ``OH_n`` (no finite concrete embedding)."""

    power = 0.5

    def __init__(self, n):
        if n < 1:
            raise ValueError("OH_n needs n >= 1")
        self.n = int(n)
        self.name = f"oh:{self.n}"

    @property
    def dim(self):
        return self.n

    def level_matrix(self, X):
        r, s, k = X.shape
        return np.einsum("abk,cdk->acbd", X, X.conj()).reshape(r * r, s * s)

    def level_matrix_t(self, X):
        torch = _torch()
        r, s, k = X.shape
        return torch.einsum("abk,cdk->acbd", X, X.conj()).reshape(r * r, s * s)


class MatrixLevelSpace(_Space):
    """``M_n(E)`` viewed as an operator space: ``M_r(M_n(E)) = M_{rn}(E)``.

    Coefficient index ``(a, b, k)`` flattened row-major.
    """

    def __init__(self, base, n):
        self.base = base
        self.n = int(n)
        self.name = f"M{self.n}({base.name})"
        self.power = base.power
        self.concrete = base.concrete

    @property
    def dim(self):
        return self.n * self.n * self.base.dim

    def _lift(self, X, lib=np):
        r, s, _ = X.shape
        n, k = self.n, self.base.dim
        Y = X.reshape(r, s, n, n, k)
        Y = Y.permute(0, 2, 1, 3, 4) if lib is not np else Y.transpose(0, 2, 1, 3, 4)
        return Y.reshape(r * n, s * n, k)

    def level_matrix(self, X):
        return self.base.level_matrix(self._lift(X))

    def level_matrix_t(self, X):
        return self.base.level_matrix_t(self._lift(X, lib=_torch()))


def matrix_level(space, n):
    """``M_n(E)`` as an operator space; concrete (with basis ``e_ab (x) b_k``) when E is."""
    if isinstance(space, ConcreteSpace):
        basis = np.array([np.kron(_unit(n, a, b), bk) for a in range(n) for b in range(n)
                          for bk in space.basis])
        return ConcreteSpace(basis, name=f"M{n}({space.name})", gram_tol=0.0)
    return MatrixLevelSpace(space, n)


def _unit(n, i, j):
    e = np.zeros((n, n), complex)
    e[i, j] = 1
    return e


def row_space(n):
    """``R_n``: span of ``e_{1i}`` in ``M_n``."""
    return ConcreteSpace([_unit(n, 0, i) for i in range(n)], name=f"row:{n}")


def column_space(n):
    """``C_n``: span of ``e_{i1}`` in ``M_n``."""
    return ConcreteSpace([_unit(n, i, 0) for i in range(n)], name=f"column:{n}")


def full_space(d):
    return ConcreteSpace([_unit(d, i, j) for i in range(d) for j in range(d)], name=f"full:{d}")


def diag_space(d):
    return ConcreteSpace([_unit(d, i, i) for i in range(d)], name=f"diag:{d}")


def scalar_space():
    return ConcreteSpace([np.ones((1, 1))], name="scalar")


def oh_space(n):
    return OHSpace(n)


_BUILTIN = {"row": row_space, "column": column_space, "oh": oh_space,
            "full": full_space, "diag": diag_space}


def space_from_ref(ref):
    """Resolve ``"row:n"``, ``"column:n"``, ``"oh:n"``, ``"full:d"``, ``"diag:d"``, ``"scalar"``,
    or a JSON space definition (dict)."""
    if isinstance(ref, dict):
        return space_from_json(ref)
    if isinstance(ref, (ConcreteSpace, OHSpace, MatrixLevelSpace)):
        return ref
    if ref == "scalar":
        return scalar_space()
    kind, _, size = str(ref).partition(":")
    if kind not in _BUILTIN or not size.isdigit() or int(size) < 1:
        raise ValueError(f"unknown space reference {ref!r}")
    return _BUILTIN[kind](int(size))


def space_from_json(obj):
    try:
        basis = [matrix_from_literal(b) for b in obj["basis"]]
        d = int(obj["ambient_dim"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed space definition: {exc}") from None
    if any(b.shape != (d, d) for b in basis):
        raise ValueError("basis matrices must be ambient_dim x ambient_dim")
    return ConcreteSpace(basis, name=obj.get("name", "custom"))


def space_ref(space):
    """JSON-able reference to a space (builtin name or full definition)."""
    if isinstance(space, ConcreteSpace):
        try:
            builtin = space_from_ref(space.name)
        except ValueError:
            return space.to_json()
        if builtin.basis.shape == space.basis.shape and np.array_equal(builtin.basis, space.basis):
            return space.name
        return space.to_json()
    return space.name


@dataclass
class MnElement:
    """An element of ``M_n(E)``: ``coeffs[i, j]`` is the coefficient vector of entry (i, j)."""

    space: object
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, complex)
        c = self.coeffs
        if c.ndim != 3 or c.shape[0] != c.shape[1] or c.shape[2] != self.space.dim:
            raise ValueError(f"coefficients of shape {c.shape} do not fit M_n({self.space.name})")

    @property
    def level(self):
        return self.coeffs.shape[0]


def mn_norm(space, x):
    """Norm of ``x`` in ``M_n(E)``; exact for every shipped family."""
    if isinstance(x, MnElement):
        if x.space is not space and x.space.dim != space.dim:
            raise ValueError("element belongs to a different space")
        x = x.coeffs
    return space.level_norm(x)


def min_tensor_norm(E, F, x):
    """Minimal (spatial) tensor norm of ``x`` in ``M_n(E (x)_min F)``.

    ``x`` has shape ``(dimE, dimF)`` (level 1) or ``(n, n, dimE, dimF)``.
    """
    if not (getattr(E, "concrete", False) and getattr(F, "concrete", False)):
        raise UnsupportedCombination("min_tensor_norm needs two concrete spaces")
    x = np.asarray(x, complex)
    if x.ndim == 2:
        x = x[None, None]
    if x.shape[2:] != (E.dim, F.dim):
        raise ValueError("coefficient shape does not match the spaces")
    n = x.shape[0]
    M = np.einsum("ijkl,kab,lcd->iacjbd", x, E.basis, F.basis)
    D = E.ambient_dim * F.ambient_dim
    return operator_norm(M.reshape(n * D, n * D))


def dual_level_norm(E, n, W, max_level=None, restarts=None, seed=0):
    """Norm of ``W`` in ``M_n(E*)``, i.e. the cb norm of ``W: E -> M_n``.

    ``W`` has shape ``(dimE, n, n)``: the images of the basis of E.
    """
    from .cbnorm import LinearMap, cb_norm

    W = np.asarray(W, complex)
    if W.shape != (E.dim, n, n):
        raise ValueError(f"W must have shape ({E.dim}, {n}, {n})")
    action = W.reshape(E.dim, n * n).T
    u = LinearMap(E, full_space(n), action)
    return cb_norm(u, max_level=max_level or n, restarts=restarts, seed=seed)


def check_ruan(space, n, samples, rng, tol=1e-8):
    """Sampled check of Ruan's axioms M and D at level ``n``; returns worst relative violations."""
    from .matrix_core import random_complex

    worst_m = worst_d = 0.0
    k = space.dim
    for _ in range(samples):
        m = int(rng.integers(1, n + 1))
        X = random_complex((n, n, k), rng)
        alpha = random_complex((m, n), rng)
        beta = random_complex((n, m), rng)
        aXb = np.einsum("ij,jlk,lm->imk", alpha, X, beta)
        lhs = space.level_norm(aXb)
        rhs = operator_norm(alpha) * space.level_norm(X) * operator_norm(beta)
        worst_m = max(worst_m, (lhs - rhs) / rhs)
        Y = random_complex((m, m, k), rng)
        S = np.zeros((n + m, n + m, k), complex)
        S[:n, :n] = X
        S[n:, n:] = Y
        direct = space.level_norm(S)
        expect = max(space.level_norm(X), space.level_norm(Y))
        worst_d = max(worst_d, abs(direct - expect) / expect)
    return {"axiom_M": worst_m, "axiom_D": worst_d, "ok": worst_m <= tol and worst_d <= tol}
