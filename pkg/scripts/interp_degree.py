"""Interpolation upper bound as a function of the family degree.

For random d x d matrices, prints the certified bound on the midpoint norm of
(S_inf^d, S_1^d) at each degree next to the Hilbert-Schmidt norm it should approach.
"""

import argparse
from dataclasses import dataclass

import numpy as np

from ncsp.interp import interp_lower, interp_upper, schatten_couple
from ncsp.matrix_core import random_complex


@dataclass
class DegreeConfig:
    d: int = 2
    samples: int = 3
    degrees: tuple = (0, 2, 4, 8, 12, 16)
    theta: float = 0.5
    seed: int = 0


def main(cfg):
    rng = np.random.default_rng(cfg.seed)
    couple = schatten_couple(cfg.d)
    p = 1 / cfg.theta if cfg.theta > 0 else np.inf
    for s in range(cfg.samples):
        x = random_complex((cfg.d, cfg.d), rng)
        ref = np.sum(np.linalg.svd(x, compute_uv=False) ** p) ** (1 / p)
        ups = [interp_upper(couple, cfg.theta, x, degree=N) for N in cfg.degrees]
        lo = interp_lower(couple, cfg.theta, x)
        row = " ".join(f"N={N}:{u / ref - 1:+.2e}" for N, u in zip(cfg.degrees, ups))
        print(f"sample {s}: target {ref:.6f}  lower {lo / ref - 1:+.2e}  upper rel. excess {row}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--samples", type=int, default=3)
    ap.add_argument("--theta", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    main(DegreeConfig(d=a.d, samples=a.samples, theta=a.theta, seed=a.seed))
