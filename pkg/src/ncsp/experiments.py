"""Named check suites with deterministic, JSON-ready reports.

Each check returns ``{"check", "passed", "summary", "rows"}``.  Floats are
rounded to ten significant digits and wall-clock times are left out unless
requested, so that the same seed reproduces the same bytes.
"""

import json
import math
import time

import numpy as np

from . import __version__
from .bracket import NormBracket, merge, overlap_gap
from .cbnorm import LinearMap, cb_norm
from .config import DEFAULT
from .haagerup import haagerup_norm, s2_oh_isometry_check, theorem1_s2_norm
from .interp import couples_theorem_check, interp_bracket, schatten_couple
from .matrix_core import random_complex, schatten_norm
from .opspace import (column_space, diag_space, full_space, oh_space, row_space, scalar_space,
                      space_from_ref)
from .psumming import (cb_minorization_check, hs_coincidence_check, pi_p_lower, pietsch_upper_p2)
from .vector_schatten import (SpElement, _concrete_solve, fubini_reshape, nested_lower, nested_upper,
                              pq_inclusion_check, sp_norm, sp_norm_upper)


def clean(obj, digits=10):
    """Round floats and turn numpy scalars/arrays into plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): clean(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v, digits) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist(), digits)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return 0.0 if x == 0 else float(f"{x:.{digits}g}")
    if isinstance(obj, complex):
        return [clean(obj.real, digits), clean(obj.imag, digits)]
    return obj


def _result(name, passed, rows, **summary):
    return {"check": name, "passed": bool(passed), "summary": summary, "rows": rows}


def _p_label(p):
    return "inf" if np.isinf(p) else p


# --------------------------------------------------------------- vector-valued Schatten norms

def scalar_collapse(samples=40, m_max=4, ps=(1, 4 / 3, 2, 3, 4), seed=0, config=DEFAULT):
    """``S_p[C]`` brackets contain the Schatten norm and are tight to 1e-3."""
    rng = np.random.default_rng([seed, 101])
    S = scalar_space()
    rows, ok = [], True
    for t in range(samples):
        p = ps[t % len(ps)]
        m = int(rng.integers(1, m_max + 1))
        c = random_complex((m, m, 1), rng)
        b = sp_norm(SpElement(p, S, c), seed=seed, config=config)
        ref = schatten_norm(c[:, :, 0], p)
        ratio = b.upper / b.lower if b.lower > 0 else math.inf
        good = b.contains(ref, 1e-9) and ratio <= 1.001
        ok &= good
        rows.append({"p": p, "m": m, "lower": b.lower, "upper": b.upper, "schatten": ref,
                     "ratio": ratio, "ok": good})
    return _result("scalar-collapse", ok, rows, worst_ratio=max(r["ratio"] for r in rows))


def _ambient_norm(space, c):
    """Operator norm of ``sum_ij e_ij (x) x_ij`` assembled entry by entry."""
    m, d = c.shape[0], space.ambient_dim
    M = np.zeros((m * d, m * d), complex)
    for i in range(m):
        for j in range(m):
            M[i * d:(i + 1) * d, j * d:(j + 1) * d] = space.element(c[i, j])
    return float(np.linalg.norm(M, 2))


def endpoints(samples=100, spaces=("diag:2", "full:2", "column:3", "row:3"), m_max=4, seed=0,
              config=DEFAULT):
    """At ``p = inf`` the vector norm is the ambient operator norm."""
    rng = np.random.default_rng([seed, 103])
    rows, ok = [], True
    for t in range(samples):
        E = space_from_ref(spaces[t % len(spaces)])
        m = int(rng.integers(1, m_max + 1))
        c = random_complex((m, m, E.dim), rng)
        b = sp_norm(SpElement(np.inf, E, c), seed=seed, config=config)
        ref = _ambient_norm(E, c)
        err = max(abs(b.lower - ref), abs(b.upper - ref))
        good = err <= 1e-10 * max(1.0, ref)
        ok &= good
        rows.append({"space": E.name, "m": m, "value": b.upper, "ambient": ref, "error": err, "ok": good})
    return _result("endpoints", ok, rows, worst_error=max(r["error"] for r in rows))


def duality(samples=20, ps=(1, 2, 4), fuzz=1000, m=2, seed=0, tightness=0.95, config=DEFAULT):
    """Dual witnesses reach the factorization bound; weak duality on fuzzed pairs."""
    E = diag_space(2)
    rng = np.random.default_rng([seed, 107])
    rows, ok = [], True
    pool = {p: [] for p in ps}
    for p in ps:
        for t in range(samples):
            u = SpElement(p, E, random_complex((m, m, E.dim), rng))
            cert, w = _concrete_solve(u, config)
            lo = w.evaluate(u)
            good = lo >= tightness * cert.value
            ok &= good
            pool[p].append((u, w))
            rows.append({"kind": "tightness", "p": p, "lower": lo, "upper": cert.value,
                         "ratio": lo / cert.value, "ok": good})
    violations, worst = 0, 0.0
    for t in range(fuzz):
        p = ps[t % len(ps)]
        u0, w = pool[p][int(rng.integers(len(pool[p])))]
        eps = [0.0, 1e-3, 0.1, 1.0][t % 4]
        c = u0.coeffs + eps * random_complex(u0.coeffs.shape, rng) * np.linalg.norm(u0.coeffs)
        u = SpElement(p, E, c)
        up = sp_norm_upper(u, seed=seed, config=config).value
        val = w.evaluate(u)
        worst = max(worst, val / up - 1)
        if val > up * (1 + 1e-9):
            violations += 1
    ok &= violations == 0
    rows.append({"kind": "weak-duality", "cases": fuzz, "violations": violations, "worst_excess": worst})
    return _result("duality", ok, rows, min_ratio=min(r["ratio"] for r in rows if r["kind"] == "tightness"),
                   violations=violations)


def fubini(samples=30, ps=(1, 2), fuzz=200, seed=0, tol=2e-2, config=DEFAULT):
    """Nested and flattened norms agree; ``S_p[S_q] -> S_q[S_p]`` never expands for ``p <= q``."""
    rng = np.random.default_rng([seed, 109])
    spaces = [scalar_space(), diag_space(2)]
    rows, ok = [], True
    for t in range(samples):
        p = ps[t % len(ps)]
        E = spaces[(t // len(ps)) % len(spaces)]
        m1, m2 = 2, 2
        c = random_complex((m1, m1, m2, m2, E.dim), rng)
        flat = sp_norm(SpElement(p, E, fubini_reshape(c, m1, m2)), seed=seed, config=config)
        up, _ = nested_upper(E, p, p, c, seed=seed, config=config)
        lo = nested_lower(E, p, c, seed=seed, config=config)
        nested = NormBracket(min(lo, up), up)
        if p == 2 and E.dim == 1 and E.name == "scalar":
            # inner leg S_2^{m2} computed as OH_{m2^2}: an exact presentation of the nested norm
            oh = sp_norm(SpElement(2, oh_space(m2 * m2), c.reshape(m1, m1, m2 * m2)), seed=seed, config=config)
            nested = merge(nested, oh)
        gap = overlap_gap(flat, nested)
        good = gap <= tol
        ok &= good
        both = merge(flat, nested) if gap == 0 else None
        rows.append({"kind": "reshape", "p": p, "space": E.name, "flat": [flat.lower, flat.upper],
                     "nested": [nested.lower, nested.upper], "gap": gap,
                     "merged_width": both.width if both else None, "ok": good})
    pairs = [(1, 2), (1, np.inf), (2, np.inf), (4 / 3, 4), (2, 2)]
    violations = 0
    for t in range(fuzz):
        p, q = pairs[t % len(pairs)]
        E = spaces[t % len(spaces)]
        m1, m2 = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        c = random_complex((m1, m1, m2, m2, E.dim), rng)
        r = pq_inclusion_check(E, c, p, q, seed=seed, config=config)
        violations += r["violated"]
    ok &= violations == 0
    rows.append({"kind": "inclusion", "cases": fuzz, "violations": violations})
    return _result("fubini", ok, rows, worst_gap=max(r["gap"] for r in rows if r["kind"] == "reshape"),
                   violations=violations)


def theorem1(samples=20, spaces=("diag:2", "full:2"), m=2, seed=0, tol=1e-3, config=DEFAULT):
    """``S_2[E]`` against the three-fold Haagerup factorization through OH."""
    rng = np.random.default_rng([seed, 113])
    rows, ok = [], True
    for t in range(samples):
        E = space_from_ref(spaces[t % len(spaces)])
        u = SpElement(2, E, random_complex((m, m, E.dim), rng))
        b1 = sp_norm(u, seed=seed, config=config)
        bh = theorem1_s2_norm(u, seed=seed)
        gap = max(overlap_gap(b1, bh), abs(bh.upper / b1.lower - 1))
        good = gap <= tol
        ok &= good
        rows.append({"space": E.name, "schatten_route": [b1.lower, b1.upper],
                     "haagerup_route": [bh.lower, bh.upper], "gap": gap, "ok": good})
    return _result("theorem1", ok, rows, worst_gap=max(r["gap"] for r in rows))


def s2_oh(samples=30, seed=0, tol_level=5e-3, tol_vector=1e-2, config=DEFAULT):
    """``S_2^2`` at level 2 against ``OH_4``; ``S_2^2[OH_2]`` against ``OH_8``."""
    rows = s2_oh_isometry_check(2, level=2, samples=samples, seed=seed, config=config)
    ok = True
    for r in rows:
        r["ok"] = r["rel_gap"] <= (tol_level if r["kind"] == "S2-level" else tol_vector)
        ok &= r["ok"]
    return _result("s2-oh", ok, rows, worst_gap=max(r["rel_gap"] for r in rows))


# --------------------------------------------------------------- Haagerup

def haagerup_endpoints(samples=40, n_max=4, seed=0, tol=1e-2, config=DEFAULT):
    """``C_n (x)_h R_n`` is ``M_n``; ``R_n (x)_h C_n`` is ``S_1^n``."""
    rng = np.random.default_rng([seed, 127])
    rows, ok = [], True
    for t in range(samples):
        n = 1 + t % n_max
        X = random_complex((n, n), rng)
        for kind, E, F, ref in (("C(x)R", column_space(n), row_space(n), schatten_norm(X, np.inf)),
                                ("R(x)C", row_space(n), column_space(n), schatten_norm(X, 1))):
            b = haagerup_norm(E, F, X, seed=seed)
            gap = max(abs(b.lower - ref), abs(b.upper - ref)) / ref
            good = b.contains(ref, 1e-9) and gap <= tol
            ok &= good
            rows.append({"kind": kind, "n": n, "lower": b.lower, "upper": b.upper, "reference": ref,
                         "gap": gap, "ok": good})
    return _result("haagerup-endpoints", ok, rows, worst_gap=max(r["gap"] for r in rows))


# --------------------------------------------------------------- interpolation

def interpolation(samples=20, d_max=3, seed=0, tol=0.05, couples_samples=5, couples_tol=0.08,
                  config=DEFAULT):
    """``(S_inf^d, S_1^d)_{1/2}`` brackets against the Hilbert-Schmidt norm."""
    rng = np.random.default_rng([seed, 131])
    rows, ok = [], True
    for t in range(samples):
        d = 1 + t % d_max
        x = random_complex((d, d), rng)
        b = interp_bracket(schatten_couple(d), 0.5, x, config=config)
        ref = schatten_norm(x, 2)
        gap = max(abs(b.lower - ref), abs(b.upper - ref)) / ref
        good = b.contains(ref, 1e-9) and gap <= tol
        ok &= good
        rows.append({"kind": "S2-midpoint", "d": d, "lower": b.lower, "upper": b.upper,
                     "schatten": ref, "gap": gap, "ok": good})
    if couples_samples:
        rep = couples_theorem_check(samples=couples_samples, seed=seed, tol=couples_tol, config=config)
        ok &= rep["ok"]
        rows.append({"kind": "couples", "configuration": rep["configuration"], "ok": rep["ok"],
                     "worst_gap": max(r["rel_gap"] for r in rep["rows"])})
    return _result("interp", ok, rows,
                   worst_gap=max(r["gap"] for r in rows if r["kind"] == "S2-midpoint"))


# --------------------------------------------------------------- completely 2-summing norms

IDENTITY_TARGETS = {
    "diag:2": (0.9 * math.sqrt(2), 1.15 * math.sqrt(2)),
    "column:2": (0.9 * math.sqrt(2), 1.15 * math.sqrt(2)),
    "row:2": (0.9 * math.sqrt(2), 1.15 * math.sqrt(2)),
    "oh:2": (0.9 * math.sqrt(2), 1.15 * math.sqrt(2)),
    "full:2": (1.8, 2.3),
}


def pi2_identity(spaces=tuple(IDENTITY_TARGETS), m_max=None, restarts=3, seed=0, config=DEFAULT):
    """``pi_2(I_E)`` bracketed between the level search and a Pietsch certificate."""
    rows, ok = [], True
    for ref in spaces:
        E = space_from_ref(ref)
        u = LinearMap(E, E, np.eye(E.dim))
        t0 = time.perf_counter()
        lo, wit = pi_p_lower(u, 2, m_max, restarts, seed, config=config)
        cert = pietsch_upper_p2(u, None, restarts, seed)
        lo_req, up_req = IDENTITY_TARGETS.get(ref, (0.9 * math.sqrt(E.dim), 1.15 * math.sqrt(E.dim)))
        good = lo >= lo_req and cert.bound <= up_req and lo <= cert.bound * (1 + 1e-9)
        ok &= good
        rows.append({"space": ref, "lower": lo, "upper": cert.bound, "target": math.sqrt(E.dim),
                     "required": [lo_req, up_req], "per_level": wit["per_level"],
                     "m_copies": cert.m_copies, "runtime": time.perf_counter() - t0, "ok": good})
    return _result("pi2-identity", ok, rows)


def hs_oh(samples=20, dims=(2, 3), seed=0, tol=0.1, restarts=2, config=DEFAULT):
    """``pi_2`` of maps ``OH_i -> OH_j`` against their Hilbert-Schmidt norm."""
    rng = np.random.default_rng([seed, 137])
    i, j = dims
    rows, ok = [], True
    for t in range(samples):
        u = LinearMap(oh_space(i), oh_space(j), random_complex((j, i), rng))
        r = hs_coincidence_check(u, restarts=restarts, seed=seed, config=config)
        good = r["contains"] and r["rel_gap"] <= tol
        ok &= good
        rows.append({"hs": r["target"], "lower": r["lower"], "upper": r["upper"],
                     "gap": r["rel_gap"], "ok": good})
    return _result("hs-oh", ok, rows, worst_gap=max(r["gap"] for r in rows))


def map_corpus(seed=0):
    """Maps used by the minorization check: identities, transposes, compressions, random maps."""
    rng = np.random.default_rng([seed, 139])
    maps = []
    for ref in ("diag:2", "column:2", "row:2", "full:2", "scalar"):
        E = space_from_ref(ref)
        maps.append((f"identity {ref}", LinearMap(E, E, np.eye(E.dim))))
    F = full_space(2)
    maps.append(("transpose full:2", LinearMap(F, F, np.eye(4)[[0, 2, 1, 3]])))
    maps.append(("row:2 -> column:2", LinearMap(row_space(2), column_space(2), np.eye(2))))
    maps.append(("zero diag:2", LinearMap(diag_space(2), diag_space(2), np.zeros((2, 2)))))
    a0, b0 = random_complex((2, 2), rng), random_complex((2, 2), rng)
    act = np.array([(a0 @ bk @ b0).ravel() for bk in F.basis]).T
    maps.append(("x -> a x b", LinearMap(F, F, act)))
    for k in range(3):
        E, G = (diag_space(2), full_space(2)) if k < 2 else (full_space(2), column_space(2))
        maps.append((f"random {E.name} -> {G.name} #{k}",
                     LinearMap(E, G, random_complex((G.dim, E.dim), rng))))
    maps.append(("random oh:2 -> oh:2", LinearMap(oh_space(2), oh_space(2), random_complex((2, 2), rng))))
    return maps


def minorization(seed=0, restarts=2, config=DEFAULT):
    """``cb`` lower bound never exceeds the ``pi_2`` upper bound."""
    rows, violations = [], 0
    for name, u in map_corpus(seed):
        r = cb_minorization_check(u, m_max=2, restarts=restarts, seed=seed, config=config)
        violations += r["violated"]
        rows.append({"map": name, "cb": [r["cb_lower"], r["cb_upper"]], "pi2": [r["lower"], r["upper"]],
                     "violated": r["violated"]})
    return _result("minorization", violations == 0, rows, violations=violations)


# --------------------------------------------------------------- registry

SUITES = {
    "scalar-collapse": scalar_collapse,
    "endpoints": endpoints,
    "haagerup-endpoints": haagerup_endpoints,
    "theorem1": theorem1,
    "duality": duality,
    "fubini": fubini,
    "s2-oh": s2_oh,
    "pi2-identity": pi2_identity,
    "hs-oh": hs_oh,
    "minorization": minorization,
    "interp": interpolation,
}


def run_suite(name, seed=0, config=DEFAULT, timing=False, **kwargs):
    """Run a named suite and return its cleaned report."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    t0 = time.perf_counter()
    res = SUITES[name](seed=seed, config=config, **kwargs)
    if not timing:
        _strip_runtime(res)
    report = {"tool": "ncsp", "version": __version__, "suite": name, "seed": seed,
              "config": config.to_dict(), **res}
    if timing:
        report["runtime"] = time.perf_counter() - t0
    return clean(report)


def _strip_runtime(obj):
    if isinstance(obj, dict):
        obj.pop("runtime", None)
        for v in obj.values():
            _strip_runtime(v)
    elif isinstance(obj, list):
        for v in obj:
            _strip_runtime(v)


def dumps(report):
    return json.dumps(report, sort_keys=True, indent=2)
