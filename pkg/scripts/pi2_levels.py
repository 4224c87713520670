"""Completely 2-summing norm of identity maps: lower bound per matrix level against the certificate.

Prints, for each space, the running maximum of the level search for m = 1..m_max
and the Pietsch factorization bound, to show where the lower bound stabilizes.
"""

import argparse
import math
from dataclasses import dataclass

import numpy as np

from ncsp.cbnorm import LinearMap
from ncsp.opspace import space_from_ref
from ncsp.psumming import pi_p_lower, pietsch_upper_p2


@dataclass
class LevelsConfig:
    spaces: tuple = ("scalar", "diag:2", "column:2", "row:2", "full:2", "diag:3")
    m_max: int = 4
    restarts: int = 3
    seed: int = 0


def main(cfg):
    for ref in cfg.spaces:
        E = space_from_ref(ref)
        u = LinearMap(E, E, np.eye(E.dim))
        lo, wit = pi_p_lower(u, 2, cfg.m_max, cfg.restarts, cfg.seed)
        up = pietsch_upper_p2(u, None, cfg.restarts, cfg.seed).bound
        levels = " ".join(f"{v:.6f}" for v in wit["per_level"])
        print(f"{ref:10s} sqrt(dim)={math.sqrt(E.dim):.6f}  levels: {levels}  upper: {up:.6f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m-max", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("spaces", nargs="*")
    a = ap.parse_args()
    cfg = LevelsConfig(m_max=a.m_max, seed=a.seed)
    if a.spaces:
        cfg.spaces = tuple(a.spaces)
    main(cfg)
