"""Gradient-based local search shared by the nonconvex routines.

Objectives are written in torch (complex128) and differentiated by autograd;
the outer loop is scipy's L-BFGS-B on a flat real parameter vector.  Every
number the package *reports* is re-evaluated in numpy afterwards, so these
helpers only ever steer a search.
"""

import numpy as np
import torch
from scipy.optimize import minimize as _sp_minimize

torch.set_default_dtype(torch.float64)


class Packer:
    """Maps a dict of complex/real array shapes to one real vector and back."""

    def __init__(self, shapes, complex_keys=()):
        self.shapes = dict(shapes)
        self.complex_keys = set(complex_keys)
        self.sizes = {}
        for k, s in self.shapes.items():
            n = int(np.prod(s))
            self.sizes[k] = 2 * n if k in self.complex_keys else n
        self.total = sum(self.sizes.values())

    def pack(self, values):
        out = []
        for k, s in self.shapes.items():
            v = np.asarray(values[k])
            if k in self.complex_keys:
                v = v.astype(complex).ravel()
                out += [v.real, v.imag]
            else:
                out.append(np.asarray(v, float).ravel())
        return np.concatenate(out) if out else np.zeros(0)

    def unpack_t(self, vec):
        res, i = {}, 0
        for k, s in self.shapes.items():
            n = self.sizes[k]
            chunk = vec[i:i + n]
            i += n
            if k in self.complex_keys:
                h = n // 2
                res[k] = torch.complex(chunk[:h], chunk[h:]).reshape(s)
            else:
                res[k] = chunk.reshape(s)
        return res

    def unpack(self, vec):
        t = self.unpack_t(torch.as_tensor(np.asarray(vec, float)))
        return {k: v.detach().numpy() for k, v in t.items()}


def minimize(fun, packer, x0, maxiter=300, gtol=1e-10):
    """Minimize ``fun(params_dict) -> torch scalar`` from the packed start ``x0``."""

    def f(x):
        xt = torch.tensor(x, requires_grad=True)
        val = fun(packer.unpack_t(xt))
        if not torch.isfinite(val):
            return 1e300, np.zeros_like(x)
        val.backward()
        g = xt.grad.numpy()
        if not np.all(np.isfinite(g)):
            g = np.nan_to_num(g)
        return float(val.detach()), g

    res = _sp_minimize(f, x0, jac=True, method="L-BFGS-B",
                       options={"maxiter": maxiter, "gtol": gtol, "ftol": 1e-14, "maxcor": 30})
    return res.x, float(res.fun)


def smooth_opnorm(M, q):
    """Schatten-q norm of ``M``; an upper surrogate for the operator norm."""
    s = torch.linalg.svdvals(M)
    top = s.max().detach()
    if top == 0:
        return s.sum() * 0
    return top * torch.sum((s / top) ** q) ** (1.0 / q)


def level_norm_t(space, X, q):
    return smooth_opnorm(space.level_matrix_t(X), q) ** space.power


def t(a):
    return torch.as_tensor(np.asarray(a))
