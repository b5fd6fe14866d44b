"""Closed-form analysis objects: far-field phase, band kernel, RIC and resolution bounds.

All frequencies are angular (rad/s).  The band kernel is

    K(P) = [sin((wc' + B/2) P / c0) - sin((wc' - B/2) P / c0)] / (B P / c0)
         = cos(wc' P / c0) * sinc(B P / (2 c0)),      sinc(u) = sin(u) / u,

the frequency-averaged weight that multiplies each fourth-order scene product
in the data norm.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .forward import C0, SpectralGrid
from .geometry import Geometry, SceneGrid

# RIC threshold below which exact recovery is guaranteed
RIC_THRESHOLD = 0.214
# M >= SINC_MARGIN * L / range_resolution keeps the sinc approximation error below 1%
SINC_MARGIN = 5.8


def _sinc(u):
    """Unnormalized sinc sin(u)/u."""
    return np.sinc(np.asarray(u, dtype=float) / np.pi)


def farfield_phase(i, j, k, kp, l, lp, geometry: Geometry, grid: SceneGrid):
    """Linearized phase difference for receivers ``(i, j)`` and pixels ``(k, k', l, l')``.

    Indices may be arrays; standard numpy broadcasting applies.
    """
    x = grid.positions
    ar = geometry.receiver_look
    at = geometry.transmitter_look
    dk = x[k] - x[kp]
    dl = x[l] - x[lp]
    return (
        np.einsum("...c,...c->...", ar[i], dk)
        - np.einsum("...c,...c->...", ar[j], dl)
        + np.einsum("...c,...c->...", np.broadcast_to(at, np.broadcast(dk, dl).shape), dk - dl)
    )


def kernel(phase, spectral: SpectralGrid):
    """Band kernel K evaluated at path differences ``phase`` (meters)."""
    p = np.asarray(phase, dtype=float)
    wc = spectral.shifted_center
    B = spectral.bandwidth
    out = np.ones_like(p)
    nz = p != 0
    pn = p[nz]
    out[nz] = (np.sin((wc + B / 2) * pn / C0) - np.sin((wc - B / 2) * pn / C0)) / (B * pn / C0)
    return out if out.ndim else float(out)


def kernel_cos_sinc(phase, spectral: SpectralGrid):
    p = np.asarray(phase, dtype=float)
    return np.cos(spectral.shifted_center * p / C0) * _sinc(spectral.bandwidth * p / (2 * C0))


@dataclass(frozen=True)
class GeometricSum:
    exact: complex
    dirichlet: complex
    sinc: complex

    @property
    def approximation_error(self) -> float:
        """|Dirichlet - sinc form|, both are at most 1 in modulus."""
        return abs(self.dirichlet - self.sinc)


def geometric_sum(phase: float, spectral: SpectralGrid) -> GeometricSum:
    """Frequency average ``(1/M) sum_m exp(-1j w_m P / c0)`` in three forms."""
    M = spectral.M
    w = spectral.samples
    exact = complex(np.mean(np.exp(-1j * w * phase / C0)))
    u = spectral.bandwidth * phase / (2 * C0)
    carrier = np.exp(-1j * spectral.shifted_center * phase / C0)
    if phase == 0:
        return GeometricSum(exact, 1.0 + 0j, 1.0 + 0j)
    denom = M * np.sin(u / M)
    dirichlet = carrier * (np.sin(u) / denom if denom != 0 else 1.0)
    return GeometricSum(exact, complex(dirichlet), complex(carrier * _sinc(u)))


def kernel_expansion_norm(
    rho,
    geometry: Geometry,
    grid: SceneGrid,
    spectral: SpectralGrid,
    budget: float = 5e7,
    complete: bool = True,
) -> float:
    """Kernel expansion of ``||F(rho rho^T)||^2`` for unit-amplitude measurement vectors.

    Returns ``||rho||^4`` plus the pair-averaged kernel-weighted sum of fourth-order
    products.  With ``complete=False`` only terms with ``k != k'`` *and* ``l != l'``
    are kept; ``complete=True`` also keeps the terms where exactly one of the two
    index pairs is diagonal, which the expansion needs to be an identity.
    Direct O(K^4 N^2) evaluation; small problems only.
    """
    rho = np.asarray(rho, dtype=float)
    K = grid.K
    N = geometry.N
    if K**4 * N**2 > budget:
        raise ValueError(f"K^4 N^2 = {K**4 * N**2:.3g} exceeds budget {budget:.3g}")
    x = grid.positions
    vi = geometry.receiver_look + geometry.transmitter_look  # (N, 3)
    # proj[i, k, k'] = (a_i + a_t) . (x_k - x_k')
    diff = x[:, None, :] - x[None, :, :]
    proj = np.einsum("nc,abc->nab", vi, diff)
    rr = np.outer(rho, rho)
    offdiag = ~np.eye(K, dtype=bool)
    total = 0.0
    for i in range(N):
        for j in range(i + 1, N):
            # Phi = proj_i[k, k'] - proj_j[l, l']; weight rho_k rho_k' rho_l' rho_l
            phi = proj[i][:, :, None, None] - proj[j][None, None, :, :]
            w = kernel(phi, spectral) * rr[:, :, None, None] * rr[None, None, :, :]
            if complete:
                mask = ~(~offdiag[:, :, None, None] & ~offdiag[None, None, :, :])
            else:
                mask = offdiag[:, :, None, None] & offdiag[None, None, :, :]
            total += float(np.sum(w[np.broadcast_to(mask, w.shape)]))
    return float(rho @ rho) ** 2 + total / comb(N, 2)


@dataclass(frozen=True)
class BoundInputs:
    wavelength: float  # at the shifted center frequency
    range_resolution: float
    side_length: float
    pixel_spacing: float
    K: int
    N: int
    aperture: float
    elevation: float

    @classmethod
    def from_setup(cls, spectral: SpectralGrid, grid: SceneGrid, geometry: Geometry) -> "BoundInputs":
        if not geometry.is_arc:
            raise ValueError("bounds are only defined for arc geometries")
        return cls(
            wavelength=2 * np.pi * C0 / spectral.shifted_center,
            range_resolution=range_resolution(spectral.bandwidth),
            side_length=grid.side_length,
            pixel_spacing=grid.pixel_spacing,
            K=grid.K,
            N=geometry.N,
            aperture=geometry.aperture,
            elevation=geometry.elevation,
        )


def range_resolution(bandwidth: float) -> float:
    """Fourier range resolution ``2 pi c0 / (2 B)`` for angular bandwidth ``B``."""
    return 2 * np.pi * C0 / (2 * bandwidth)


def _frequency_term(inputs: BoundInputs) -> float:
    # 2 lambda sqrt(L dres) / cos(phi)^(3/2), scaled by 2 pi / A
    c = np.cos(inputs.elevation)
    return (
        (2 * np.pi / inputs.aperture)
        * 2
        * inputs.wavelength
        * np.sqrt(inputs.side_length * inputs.range_resolution)
        / (c * np.sqrt(c))
    )


@dataclass(frozen=True)
class RicBound:
    frequency_term: float
    receiver_term: float

    @property
    def total(self) -> float:
        return self.frequency_term + self.receiver_term


def ric_bound(inputs: BoundInputs, order_constant: float = 1.0) -> RicBound:
    """Upper bound on the rank-1 RIC; the receiver term carries an unknown constant."""
    first = _frequency_term(inputs) / inputs.pixel_spacing**2
    second = order_constant * inputs.K * inputs.aperture**2 / inputs.N**2 * inputs.wavelength ** (-1.5)
    return RicBound(float(first), float(second))


def resolution_bound(inputs: BoundInputs) -> float:
    """Smallest pixel spacing for which the frequency term stays below the RIC threshold."""
    return float(np.sqrt(_frequency_term(inputs) / RIC_THRESHOLD))


@dataclass(frozen=True)
class SampleComplexityReport:
    K: int
    M: int
    N: int
    samples: int  # M N^2
    samples_required: float  # K^(5/4)
    receivers_sq: int
    receivers_sq_required: float  # K^(3/4)
    frequency_required: float | None  # 5.8 L / dres

    @property
    def samples_ok(self) -> bool:
        return self.samples >= self.samples_required

    @property
    def receivers_ok(self) -> bool:
        return self.receivers_sq >= self.receivers_sq_required

    @property
    def frequency_ok(self) -> bool:
        return self.frequency_required is None or self.M >= self.frequency_required

    def flags(self) -> dict[str, str]:
        return {
            "M*N^2 >= K^(5/4)": "pass" if self.samples_ok else "warn",
            "N^2 >= K^(3/4)": "pass" if self.receivers_ok else "warn",
            "M >= 5.8 L/dres": "pass" if self.frequency_ok else "warn",
        }


def sample_complexity_check(K: int, M: int, N: int, side_length=None, range_res=None) -> SampleComplexityReport:
    freq = None
    if side_length is not None and range_res is not None and K > 1:
        freq = SINC_MARGIN * side_length / range_res
    return SampleComplexityReport(
        K=K,
        M=M,
        N=N,
        samples=M * N**2,
        samples_required=K**1.25,
        receivers_sq=N**2,
        receivers_sq_required=K**0.75,
        frequency_required=freq,
    )


def empirical_ric(operator, trials: int = 100, seed=0, return_trace: bool = False):
    """Largest observed ``| ||F(rho rho^T)||^2 / ||rho||^4 - 1 |`` over random unit ``rho``.

    A sampled lower bound on the true rank-1 RIC.  With ``return_trace`` the
    running maximum after each trial is returned too.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    trace = np.empty(trials)
    best = 0.0
    for t in range(trials):
        rho = rng.standard_normal(operator.K)
        rho /= np.linalg.norm(rho)
        f = operator.forward_rank1(rho).values
        best = max(best, abs(float(np.vdot(f, f).real) - 1.0))
        trace[t] = best
    return (best, trace) if return_trace else best
