"""Run named check suites and write one JSON report (and a CSV row table) per suite.

    python3 scripts/run_checks.py --out results --seed 0
    python3 scripts/run_checks.py endpoints duality --out results
"""

import argparse
import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from ncsp.experiments import SUITES, dumps, run_suite


@dataclass
class RunConfig:
    suites: list = field(default_factory=lambda: list(SUITES))
    seed: int = 0
    out: Path = Path("results")
    timing: bool = False


def write_csv(path, rows):
    keys = []
    for r in rows:
        keys += [k for k in r if k not in keys]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=keys)
        w.writeheader()
        for r in rows:
            w.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in r.items()})


def main(cfg):
    cfg.out.mkdir(parents=True, exist_ok=True)
    status = {}
    for name in cfg.suites:
        rep = run_suite(name, seed=cfg.seed, timing=cfg.timing)
        (cfg.out / f"{name}.json").write_text(dumps(rep) + "\n")
        write_csv(cfg.out / f"{name}.csv", rep["rows"])
        status[name] = rep["passed"]
        print(f"{name:20s} {'pass' if rep['passed'] else 'FAIL'}  {json.dumps(rep['summary'])}")
    return 0 if all(status.values()) else 1


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("suites", nargs="*", help=f"any of: {', '.join(SUITES)} (default: all)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--timing", action="store_true")
    a = ap.parse_args()
    unknown = set(a.suites) - set(SUITES)
    if unknown:
        ap.error(f"unknown suites: {', '.join(sorted(unknown))}")
    raise SystemExit(main(RunConfig(a.suites or list(SUITES), a.seed, a.out, a.timing)))
