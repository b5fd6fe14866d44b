"""Sampled rank-1 RIC of the lifted operator on a 5 x 5 scene versus receivers and carrier.

usage: python3 scripts/ric_trend.py [--trials 200] [--seeds 5]
"""

import argparse

import numpy as np

from gwfradar.bounds import empirical_ric
from gwfradar.forward import SpectralGrid, build_measurement_vectors
from gwfradar.geometry import build_arc_geometry, build_scene_grid
from gwfradar.lifted import LiftedOperator


def sampled_ric(N, fc_hz, trials, seeds, bw_hz=50e6, M=64):
    grid = build_scene_grid(12.0, 5)
    op = LiftedOperator(build_measurement_vectors(grid, build_arc_geometry(N), SpectralGrid.from_hz(fc_hz, bw_hz, M)))
    return float(np.mean([empirical_ric(op, trials, seed=s) for s in range(seeds)]))


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seeds", type=int, default=5)
    args = p.parse_args()
    print("receivers (fc = 10 GHz)")
    for N in (6, 12, 24, 48):
        print(f"  N={N:3d}  {sampled_ric(N, 10e9, args.trials, args.seeds):.3f}")
    print("carrier (N = 24)")
    for fc in (1e9, 2.5e9, 5e9, 10e9, 20e9):
        print(f"  fc={fc / 1e9:5.1f} GHz  {sampled_ric(24, fc, args.trials, args.seeds):.3f}")


if __name__ == "__main__":
    main()
