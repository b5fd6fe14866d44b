"""Run the named regime sweeps and write one CSV per sweep.

usage: python3 scripts/run_sweeps.py OUTDIR [--seeds 0,1,2] [--only NAME ...]
"""

import argparse
import time
from pathlib import Path

from scipy.stats import spearmanr

from gwfradar.sweeps import SWEEPS


def main():
    p = argparse.ArgumentParser()
    p.add_argument("out", type=Path)
    p.add_argument("--seeds", default="0,1,2")
    p.add_argument("--only", nargs="*", choices=sorted(SWEEPS))
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    seeds = [int(s) for s in args.seeds.split(",")]
    for name in args.only or SWEEPS:
        t0 = time.time()
        res = SWEEPS[name].run(seeds, out=args.out / f"{name}.csv", workers=args.workers)
        x, m = res.mean_by_value()
        failed = sum(r["status"] != "ok" for r in res.rows)
        rho = spearmanr(x, m, nan_policy="omit").statistic
        print(f"{name}: spearman={rho:+.3f} failed={failed} ({time.time() - t0:.0f} s)", flush=True)
        for xv, mv in zip(x, m):
            print(f"    {xv:12.4g}  {mv:.3e}", flush=True)


if __name__ == "__main__":
    main()
