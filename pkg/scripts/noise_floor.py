"""Lower bound on relative MSE at a given receiver SNR.

Even with the linear per-receiver data (before correlation, which only loses
information) and a known noise level, any unbiased estimator of a real scene
has covariance at least inv(Re(A^H S^-1 A)), with A the stacked conjugated
measurement vectors and S the per-receiver noise covariance.  The trace of
that matrix over K, divided by the mean square of the truth, bounds the
relative MSE that an unbiased reconstruction can reach.

usage: python3 scripts/noise_floor.py [preset ...] [--snr DB] [--receivers N]
"""

import argparse

import numpy as np

from gwfradar.forward import build_measurement_vectors, simulate_receiver_data
from gwfradar.harness import load_config, make_phantom


def relative_crb(cfg, snr_db):
    grid = cfg.grid
    truth = make_phantom(cfg.scene, grid)
    vectors = build_measurement_vectors(grid, cfg.geometry, cfg.spectral, cfg.amplitude_mode)
    d = simulate_receiver_data(truth, vectors).values
    sigma2 = np.mean(np.abs(d) ** 2, axis=1) / 10 ** (snr_db / 10)
    A = np.conj(vectors.values)  # (N, M, K)
    # complex noise of variance sigma2 -> real Fisher information 2 Re(A^H A) / sigma2
    fisher = sum(2 * np.real(A[i].conj().T @ A[i]) / sigma2[i] for i in range(A.shape[0]))
    cov = np.linalg.pinv(fisher, hermitian=True)
    return float(np.trace(cov) / grid.K / np.mean(truth**2))


def main():
    p = argparse.ArgumentParser()
    p.add_argument("presets", nargs="*", default=["active", "passive"])
    p.add_argument("--snr", type=float, default=0.0)
    p.add_argument("--receivers", type=int, default=30)
    args = p.parse_args()
    for name in args.presets:
        cfg = load_config(name).replace(receivers=args.receivers)
        print(f"{name}: N={cfg.receivers} SNR={args.snr:g} dB  relative MSE floor {relative_crb(cfg, args.snr):.3f}")


if __name__ == "__main__":
    main()
