"""Self-checks of the matrix-free engine against the dense oracle on small random instances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import kernel, kernel_cos_sinc
from .forward import SpectralGrid, build_measurement_vectors
from .geometry import build_arc_geometry, build_scene_grid
from .lifted import LiftedOperator
from .oracle import build_dense, dense_backprojection, dense_spectral
from .solver import gradient, objective, power_iteration


@dataclass
class Check:
    name: str
    error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.error) and self.error <= self.tolerance)


def random_operator(rng, K: int, N: int, M: int, amplitude_mode="compensated") -> LiftedOperator:
    """Arc geometry with random aperture and band; scene side scales with pixel count."""
    n = int(round(np.sqrt(K)))
    if n * n != K:
        raise ValueError("K must be a perfect square")
    grid = build_scene_grid(2.4 * n, n)
    geom = build_arc_geometry(N, aperture=rng.uniform(0.5, 2 * np.pi))
    fc = rng.uniform(1e9, 10e9)
    spectral = SpectralGrid.from_hz(fc, rng.uniform(10e6, 100e6), M)
    return LiftedOperator(build_measurement_vectors(grid, geom, spectral, amplitude_mode))


def _rel(a, b) -> float:
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), np.finfo(float).tiny))


def forward_check(op: LiftedOperator, rng) -> float:
    dense = build_dense(op)
    rho = rng.standard_normal(op.K)
    return _rel(op.forward_rank1(rho).values, dense.apply(np.outer(rho, rho)))


def adjoint_check(op: LiftedOperator, rng) -> float:
    """Relative gap in <F(X), e> = <X, F^H e> for real symmetric X, computed matrix-free."""
    A = rng.standard_normal((op.K, op.K))
    X = A + A.T
    e = rng.standard_normal(op.data_length) + 1j * rng.standard_normal(op.data_length)
    lhs = np.vdot(e, op.forward(X)).real
    # <X, P_S Re F^H e> through matvecs against the columns of X
    G = np.column_stack([op.adjoint_apply(e, col) for col in np.eye(op.K)])
    rhs = float(np.sum(X * G))
    return abs(lhs - rhs) / max(abs(lhs), np.finfo(float).tiny)


def backprojection_check(op: LiftedOperator, rng) -> float:
    dense = build_dense(op)
    e = rng.standard_normal(op.data_length) + 1j * rng.standard_normal(op.data_length)
    v = rng.standard_normal(op.K)
    return _rel(op.backprojection_matvec(e, v), dense_backprojection(dense, e) @ v)


def gradient_check(op: LiftedOperator, rng, h_step: float = 1e-6) -> float:
    rho = rng.standard_normal(op.K)
    d = op.forward_rank1(rng.standard_normal(op.K))
    h = rng.standard_normal(op.K)
    fd = (objective(rho + h_step * h, d, op) - objective(rho - h_step * h, d, op)) / (2 * h_step)
    an = float(gradient(rho, d, op) @ h)
    return abs(fd - an) / max(abs(an), np.finfo(float).tiny)


def spectral_check(op: LiftedOperator, rng) -> float:
    d = op.forward_rank1(np.abs(rng.standard_normal(op.K)))
    w, _ = dense_spectral(dense_backprojection(build_dense(op), d))
    lam, _, _ = power_iteration(lambda x: op.backprojection_matvec(d, x), op.K, 5000, 1e-12, 0)
    return abs(lam - w[0]) / abs(w[0])


def kernel_check(spectral: SpectralGrid, points: int = 10_000) -> float:
    phi = np.linspace(-50.0, 50.0, points)
    return float(np.max(np.abs(kernel(phi, spectral) - kernel_cos_sinc(phi, spectral))))


def run_validation(instances: int = 5, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    checks = []
    for t in range(instances):
        K = int(rng.choice([4, 9, 16]))
        op = random_operator(rng, K, int(rng.choice([3, 4, 5])), int(rng.choice([4, 8])))
        tag = f"[{t}] K={op.K} N={op.N} M={op.M}"
        checks += [
            Check(f"forward vs dense {tag}", forward_check(op, rng), 1e-12),
            Check(f"adjoint identity {tag}", adjoint_check(op, rng), 1e-10),
            Check(f"backprojection vs dense {tag}", backprojection_check(op, rng), 1e-10),
            Check(f"gradient vs finite difference {tag}", gradient_check(op, rng), 1e-5),
            Check(f"power iteration vs eigh {tag}", spectral_check(op, rng), 1e-6),
        ]
    checks.append(Check("kernel closed form", kernel_check(SpectralGrid.from_hz(10e9, 50e6, 64)), 1e-12))
    return checks
