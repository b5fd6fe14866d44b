"""Received-signal synthesis, interferometric cross-correlation and measurement vectors.

Conventions
-----------
* Inner product ``<a, b> = sum(conj(a) * b)`` (conjugate-linear in ``a``).
* Measurement vector entries ``L[i, m, k] = exp(-1j * w_m * phi_i(x_k) / c0) * A_i(x_k)``.
* Receiver data ``d_i(w_m) = <L[i, m], rho>``.
* Interferometric entry for pair ``i < j`` at sample ``m`` is ``s * d_i * conj(d_j)``
  with ``s = 1 / sqrt(M * C(N, 2))``; pairs in lexicographic order, frequencies
  contiguous per pair.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .geometry import Geometry, SceneGrid

C0 = 299_792_458.0

AMPLITUDE_MODES = ("compensated", "physical")
PHASE_MODES = ("exact", "farfield")


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform fast-time frequency samples (rad/s) over ``[wc - B/2, wc + B/2)``."""

    center: float
    bandwidth: float
    M: int

    def __post_init__(self):
        if self.M < 1:
            raise ValueError(f"M must be positive, got {self.M}")
        if not (self.center > self.bandwidth / 2 > 0):
            raise ValueError("need center > bandwidth/2 > 0 so all sample frequencies are positive")

    @classmethod
    def from_hz(cls, center_hz: float, bandwidth_hz: float, M: int) -> "SpectralGrid":
        return cls(2 * np.pi * center_hz, 2 * np.pi * bandwidth_hz, M)

    @property
    def samples(self) -> np.ndarray:
        m = np.arange(self.M)
        return self.center - self.bandwidth / 2 + (m / self.M) * self.bandwidth

    @property
    def shifted_center(self) -> float:
        return self.center - self.bandwidth / (2 * self.M)


def pair_indices(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Lexicographic receiver pairs (i < j)."""
    i, j = np.triu_indices(N, k=1)
    return i, j


def correlation_scale(N: int, M: int) -> float:
    return 1.0 / np.sqrt(M * comb(N, 2))


def _distance(a, b) -> np.ndarray:
    # shared by the scalar and vectorized paths so both round identically
    d = a - b
    return np.sqrt(d[..., 0] ** 2 + d[..., 1] ** 2 + d[..., 2] ** 2)


def bistatic_phase(x, geometry: Geometry, i: int) -> float:
    """Transmitter -> x -> receiver ``i`` path length in meters."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] == 2:
        x = np.append(x, 0.0)
    return float(_distance(x, geometry.receiver_positions[i]) + _distance(x, geometry.transmitter_position))


def bistatic_phases(grid: SceneGrid, geometry: Geometry, phase_mode: str = "exact") -> np.ndarray:
    """(N, K) array of path lengths.

    ``farfield`` uses ``|a_i| + |a_t| - <a_i_hat + a_t_hat, x>``.
    """
    x = grid.positions
    if phase_mode == "exact":
        rx = _distance(x[None, :, :], geometry.receiver_positions[:, None, :])
        tx = _distance(x, geometry.transmitter_position)
        return rx + tx[None, :]
    if phase_mode == "farfield":
        ranges = np.linalg.norm(geometry.receiver_positions, axis=1) + np.linalg.norm(geometry.transmitter_position)
        look = geometry.receiver_look + geometry.transmitter_look[None, :]
        return ranges[:, None] - look @ x.T
    raise ValueError(f"unknown phase_mode {phase_mode!r}, expected one of {PHASE_MODES}")


def amplitudes(grid: SceneGrid, geometry: Geometry) -> np.ndarray:
    """(N, K) geometric spreading ``1 / (|x - a_i| |x - a_t|)`` with unit beampattern."""
    x = grid.positions
    rx = np.linalg.norm(x[None, :, :] - geometry.receiver_positions[:, None, :], axis=-1)
    tx = np.linalg.norm(x - geometry.transmitter_position, axis=-1)[None, :]
    denom = rx * tx
    if np.any(denom == 0):
        raise ValueError("scene point coincides with an antenna position")
    return 1.0 / denom


@dataclass(frozen=True)
class MeasurementVectors:
    """Stack of measurement vectors ``L[i, m, :]`` of shape (N, M, K)."""

    values: np.ndarray = field(repr=False)
    amplitude_mode: str = "compensated"
    phase_mode: str = "exact"

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @property
    def M(self) -> int:
        return self.values.shape[1]

    @property
    def K(self) -> int:
        return self.values.shape[2]


def build_measurement_vectors(
    grid: SceneGrid,
    geometry: Geometry,
    spectral: SpectralGrid,
    amplitude_mode: str = "compensated",
    phase_mode: str = "exact",
) -> MeasurementVectors:
    if amplitude_mode not in AMPLITUDE_MODES:
        raise ValueError(f"unknown amplitude_mode {amplitude_mode!r}, expected one of {AMPLITUDE_MODES}")
    phi = bistatic_phases(grid, geometry, phase_mode)
    w = spectral.samples
    phase = w[None, :, None] * phi[:, None, :] / C0  # real first; complex division rounds differently
    L = np.exp(-1j * phase)
    if amplitude_mode == "physical":
        L = L * amplitudes(grid, geometry)[:, None, :]
    return MeasurementVectors(L, amplitude_mode, phase_mode)


@dataclass
class ReceiverData:
    """Per-receiver frequency samples, shape (N, M)."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("receiver data must be finite")


def simulate_receiver_data(rho, vectors: MeasurementVectors) -> ReceiverData:
    rho = np.asarray(rho, dtype=float)
    if not np.all(np.isfinite(rho)):
        raise ValueError("reflectivity must be finite")
    # <L, rho> = sum_k conj(L_k) rho_k
    return ReceiverData(np.conj(vectors.values) @ rho)


def add_receiver_noise(data: ReceiverData, snr_db: float | None, seed=None) -> ReceiverData:
    """Circular complex white Gaussian noise at a per-receiver SNR.

    ``snr_db`` of ``None`` or ``+inf`` leaves the data unchanged.
    """
    if snr_db is None or np.isposinf(snr_db):
        return ReceiverData(data.values.copy())
    values = data.values
    power = np.mean(np.abs(values) ** 2, axis=1)
    if np.any(power == 0):
        raise ValueError("SNR undefined for a receiver with all-zero data")
    sigma2 = power / 10 ** (snr_db / 10)
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(values.shape) + 1j * rng.standard_normal(values.shape)
    noise *= np.sqrt(sigma2 / 2)[:, None]
    return ReceiverData(values + noise)


@dataclass
class InterferometricData:
    """Scaled cross-correlations, flat vector of length ``M * C(N, 2)``."""

    values: np.ndarray
    N: int
    M: int

    @property
    def scale(self) -> float:
        return correlation_scale(self.N, self.M)

    def as_pairs(self) -> np.ndarray:
        """View as (C(N, 2), M)."""
        return self.values.reshape(-1, self.M)

    def rows(self):
        """Yield ``(i, j, m, re, im)`` with zero-based indices."""
        pi, pj = pair_indices(self.N)
        block = self.as_pairs()
        for p in range(block.shape[0]):
            for m in range(self.M):
                v = block[p, m]
                yield int(pi[p]), int(pj[p]), m, float(v.real), float(v.imag)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["i", "j", "m", "re", "im"])
            for i, j, m, re, im in self.rows():
                writer.writerow([i, j, m, repr(re), repr(im)])

    @classmethod
    def from_csv(cls, path) -> "InterferometricData":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        if not rows:
            raise ValueError(f"{path}: no data rows")
        N = max(int(r["j"]) for r in rows) + 1
        M = max(int(r["m"]) for r in rows) + 1
        pi, pj = pair_indices(N)
        pair_pos = {(int(a), int(b)): p for p, (a, b) in enumerate(zip(pi, pj))}
        values = np.zeros(len(pi) * M, dtype=complex)
        for r in rows:
            p = pair_pos[(int(r["i"]), int(r["j"]))]
            values[p * M + int(r["m"])] = complex(float(r["re"]), float(r["im"]))
        return cls(values, N, M)


def cross_correlate(data: ReceiverData) -> InterferometricData:
    d = data.values
    N, M = d.shape
    if N < 2:
        raise ValueError("cross-correlation needs at least two receivers")
    pi, pj = pair_indices(N)
    corr = d[pi] * np.conj(d[pj]) * correlation_scale(N, M)
    return InterferometricData(corr.ravel(), N, M)
