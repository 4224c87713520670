"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 bad input, 3 numerical failure.
"""

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__
from ._barrier import BarrierFailure
from .cbnorm import LinearMap
from .config import DEFAULT, Budgets, Tolerances
from .experiments import SUITES, clean, dumps, run_suite
from .haagerup import haagerup_norm
from .interp import interp_bracket, level_couple, schatten_couple
from .matrix_core import matrix_from_literal
from .opspace import column_space, row_space, space_from_ref
from .psumming import pi_p_lower, pietsch_upper_p2
from .vector_schatten import SpElement, SpMatrixElement, parse_p, sp_matrix_norm, sp_norm

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class InputError(ValueError):
    pass


def _load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _complex_array(obj, what):
    arr = np.asarray(obj, float)
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise InputError(f"{what} must be nested lists ending in [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _space(ref):
    try:
        return space_from_ref(ref)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _level_coeffs(obj, space):
    """Level coefficients ``(n, n, dim)`` from an element file, or from an ambient matrix literal."""
    if isinstance(obj, dict) and "coeffs" in obj:
        c = _complex_array(obj["coeffs"], "coeffs")
        if c.ndim != 3 or c.shape[0] != c.shape[1] or c.shape[2] != space.dim:
            raise InputError(f"coeffs must have shape (n, n, {space.dim}), got {c.shape}")
        return c
    if isinstance(obj, list):
        if not getattr(space, "concrete", False):
            raise InputError("a matrix literal needs a concrete space")
        try:
            M = matrix_from_literal(obj)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        if M.shape != (space.ambient_dim, space.ambient_dim):
            raise InputError(f"matrix must be {space.ambient_dim} x {space.ambient_dim}")
        coords = space.coordinates(M)
        if np.linalg.norm(space.element(coords) - M) > 1e-9 * max(1.0, np.linalg.norm(M)):
            raise InputError(f"matrix does not lie in {space.name}")
        return coords[None, None]
    raise InputError("element must be a matrix literal or an object with 'coeffs'")


def _config(args):
    cfg = DEFAULT
    over = {}
    if args.restarts is not None:
        over.update(cb_restarts=args.restarts, sp_restarts=args.restarts)
    if args.config:
        data = _load(args.config)
        if not isinstance(data, dict):
            raise InputError("config file must hold a JSON object")
        known = set(Tolerances.__dataclass_fields__) | set(Budgets.__dataclass_fields__)
        for k, v in data.items():
            if k in known:
                over[k] = v
            elif k.replace("-", "_") in ("seed", "p", "tol", "max_level", "m_max", "restarts", "samples"):
                setattr(args, k.replace("-", "_"), v)
            else:
                raise InputError(f"unknown config key {k!r}")
    return cfg.with_overrides(**over) if over else cfg


def _envelope(args, cfg, command, body):
    rep = {"tool": "ncsp", "version": __version__, "command": command, "seed": args.seed,
           "tol": args.tol, "config": cfg.to_dict()}
    rep.update(body)
    return clean(rep)


def _bracket_body(b, tol):
    body = {"lower": b.lower, "upper": b.upper, "width": b.width}
    passed = tol is None or b.width <= tol
    return body, passed


# --------------------------------------------------------------- commands

def cmd_norm(args, cfg):
    E = _space(args.space)
    c = _level_coeffs(_load(args.element), E)
    if args.level is not None and args.level != c.shape[0]:
        raise InputError(f"element is at level {c.shape[0]}, not {args.level}")
    val = E.level_norm(c)
    return {"space": E.name, "level": c.shape[0], "value": val, "lower": val, "upper": val,
            "passed": True}


def cmd_vsnorm(args, cfg):
    obj = _load(args.element)
    if not isinstance(obj, dict) or "coeffs" not in obj or "space" not in obj:
        raise InputError("element file needs 'space' and 'coeffs'")
    E = _space(obj["space"])
    c = _complex_array(obj["coeffs"], "coeffs")
    p = args.p if args.p is not None else obj.get("p")
    if p is None:
        raise InputError("no exponent given (use --p or a 'p' field)")
    try:
        p = parse_p(p)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if c.ndim == 3:
        if c.shape[0] != c.shape[1] or c.shape[2] != E.dim:
            raise InputError(f"coeffs must have shape (m, m, {E.dim})")
        b = sp_norm(SpElement(p, E, c), seed=args.seed, config=cfg)
        kind = "S_p[E]"
    elif c.ndim == 5:
        b = sp_matrix_norm(SpMatrixElement(p, E, c), seed=args.seed, config=cfg)
        kind = "M_n(S_p[E])"
    else:
        raise InputError("coeffs must be (m, m, dim) or (n, n, m, m, dim)")
    body, passed = _bracket_body(b, args.tol)
    if b.exact:
        body["value"] = b.upper
    return {"space": E.name, "p": "inf" if np.isinf(p) else p, "kind": kind, **body, "passed": passed}


def cmd_haagerup(args, cfg):
    E, F = _space(args.E), _space(args.F)
    obj = _load(args.element)
    c = _complex_array(obj["coeffs"] if isinstance(obj, dict) else obj, "coeffs")
    try:
        b = haagerup_norm(E, F, c, restarts=args.restarts or 4, seed=args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    body, passed = _bracket_body(b, args.tol)
    return {"E": E.name, "F": F.name, **body, "passed": passed}


def _couple(ref):
    kind, *rest = ref.split(":")
    try:
        if kind == "schatten":
            d = int(rest[0])
            p0 = parse_p(rest[1]) if len(rest) > 1 else np.inf
            p1 = parse_p(rest[2]) if len(rest) > 2 else 1.0
            return schatten_couple(d, p0, p1)
        if kind == "row-column":
            n = int(rest[0])
            m = int(rest[1]) if len(rest) > 1 else 1
            return level_couple(row_space(n), column_space(n), m)
    except (IndexError, ValueError):
        pass
    raise InputError(f"unknown couple {ref!r}; use schatten:d[:p0:p1] or row-column:n[:level]")


def cmd_interp(args, cfg):
    couple = _couple(args.couple)
    obj = _load(args.element)
    x = _complex_array(obj["coeffs"] if isinstance(obj, dict) else obj, "element").ravel()
    if x.size != couple.dim:
        raise InputError(f"element needs {couple.dim} coordinates, got {x.size}")
    if not 0 <= args.theta <= 1:
        raise InputError("theta must lie in [0, 1]")
    b = interp_bracket(couple, args.theta, x, config=cfg)
    body, passed = _bracket_body(b, args.tol)
    return {"couple": couple.name, "theta": args.theta, **body, "passed": passed}


def cmd_pisum(args, cfg):
    obj = _load(args.map)
    try:
        E, F = _space(obj["domain"]), _space(obj["codomain"])
        action = matrix_from_literal(obj["action"]) if np.ndim(obj["action"]) == 3 else None
    except (KeyError, TypeError) as exc:
        raise InputError(f"map file needs 'domain', 'codomain' and 'action': {exc}") from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if action is None or action.shape != (F.dim, E.dim):
        raise InputError(f"action must be a {F.dim} x {E.dim} matrix literal")
    u = LinearMap(E, F, action)
    p = parse_p(args.p if args.p is not None else 2)
    restarts = args.restarts or 3
    lo, wit = pi_p_lower(u, p, args.m_max, restarts, args.seed, config=cfg)
    body = {"domain": E.name, "codomain": F.name, "p": "inf" if np.isinf(p) else p, "lower": lo,
            "per_level": wit["per_level"]}
    if p == 2:
        cert = pietsch_upper_p2(u, None, restarts, args.seed)
        body.update(upper=cert.bound, m_copies=cert.m_copies, slack=cert.slack)
        body["width"] = cert.bound / lo - 1 if lo > 0 else (0.0 if cert.bound == 0 else float("inf"))
        passed = lo <= cert.bound * (1 + 1e-9) and (args.tol is None or body["width"] <= args.tol)
    else:
        body["upper"] = None
        passed = True
    return {**body, "passed": passed}


def cmd_suite(args, cfg):
    kw = {}
    if args.samples is not None:
        kw["samples"] = args.samples
    rep = run_suite(args.name, seed=args.seed, config=cfg, timing=args.timing, **kw)
    return rep


# --------------------------------------------------------------- plumbing

def _to_csv(report):
    rows = report.get("rows")
    if not rows:
        rows = [{k: v for k, v in report.items() if not isinstance(v, (dict, list))}]
    keys = []
    for r in rows:
        for k in r:
            if k not in keys:
                keys.append(k)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in r.items()})
    return buf.getvalue()


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", default=None, help="Schatten exponent (number or 'inf')")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--restarts", type=int, default=None)
    common.add_argument("--tol", type=float, default=None, help="fail (exit 1) when the bracket is wider")
    common.add_argument("--max-level", type=int, default=None)
    common.add_argument("--m-max", type=int, default=None)
    common.add_argument("--out", choices=("json", "csv"), default="json")
    common.add_argument("--config", default=None, help="JSON file; its values override flags")
    common.add_argument("--timing", action="store_true", help="include wall-clock times (not reproducible)")

    ap = argparse.ArgumentParser(prog="ncsp", description="Certified norm brackets for operator-space computations.")
    ap.add_argument("--version", action="version", version=f"ncsp {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("norm", parents=[common], help="level norm in M_n(E)")
    s.add_argument("space")
    s.add_argument("element")
    s.add_argument("level", nargs="?", type=int)
    s.set_defaults(func=cmd_norm)

    s = sub.add_parser("vsnorm", parents=[common], help="S_p[E] and M_n(S_p[E]) brackets")
    s.add_argument("element")
    s.set_defaults(func=cmd_vsnorm)

    s = sub.add_parser("haagerup", parents=[common], help="Haagerup tensor norm bracket")
    s.add_argument("E")
    s.add_argument("F")
    s.add_argument("element")
    s.set_defaults(func=cmd_haagerup)

    s = sub.add_parser("interp", parents=[common], help="complex interpolation norm bracket")
    s.add_argument("couple")
    s.add_argument("theta", type=float)
    s.add_argument("element")
    s.set_defaults(func=cmd_interp)

    s = sub.add_parser("pisum", parents=[common], help="completely p-summing norm bracket")
    s.add_argument("map")
    s.set_defaults(func=cmd_pisum)

    s = sub.add_parser("suite", parents=[common], help="run a named check suite")
    s.add_argument("name", choices=sorted(SUITES))
    s.add_argument("--samples", type=int, default=None)
    s.set_defaults(func=cmd_suite)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    if not hasattr(args, "samples"):
        args.samples = None
    try:
        cfg = _config(args)
        body = args.func(args, cfg)
        report = body if args.command == "suite" else _envelope(args, cfg, args.command, body)
    except (InputError, KeyError) as exc:
        print(f"ncsp: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"ncsp: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (BarrierFailure, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"ncsp: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    sys.stdout.write(_to_csv(report) if args.out == "csv" else dumps(report) + "\n")
    return EXIT_OK if report.get("passed", True) else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
