"""Matrix-free lifted forward map on K x K scenes and its symmetrized adjoint.

For a K x K matrix ``X`` the map is ``F(X)[(i,j), m] = s * L_i^H X L_j`` where
``L_i = L[i, m, :]``; with ``X = rho rho^T`` this reproduces the scaled
cross-correlations.  The adjoint is ``F^H(e) = s * sum e[(i,j), m] L_i L_j^H``.
Nothing here ever forms a K x K matrix.
"""

from __future__ import annotations

import numpy as np

from .forward import InterferometricData, MeasurementVectors, correlation_scale, pair_indices


class LiftedOperator:
    def __init__(self, vectors: MeasurementVectors):
        self.vectors = vectors
        self.N, self.M, self.K = vectors.shape
        self.scale = correlation_scale(self.N, self.M)
        self.pair_i, self.pair_j = pair_indices(self.N)
        self._L = vectors.values.reshape(self.N * self.M, self.K)
        self._Lc = np.conj(self._L)
        self.multiplications = 0  # complex multiplies issued by the matrix-free paths

    @property
    def data_length(self) -> int:
        return len(self.pair_i) * self.M

    def linear_terms(self, rho) -> np.ndarray:
        """``<L_i^m, rho>`` as an (N, M) array."""
        self.multiplications += self._L.size
        return (self._Lc @ np.asarray(rho, dtype=float)).reshape(self.N, self.M)

    def correlate_terms(self, z: np.ndarray) -> np.ndarray:
        self.multiplications += 2 * len(self.pair_i) * self.M
        return (self.scale * z[self.pair_i] * np.conj(z[self.pair_j])).ravel()

    def forward_rank1(self, rho) -> InterferometricData:
        return InterferometricData(self.correlate_terms(self.linear_terms(rho)), self.N, self.M)

    def _check_data(self, e) -> np.ndarray:
        e = np.asarray(getattr(e, "values", e), dtype=complex)
        if e.shape != (self.data_length,):
            raise ValueError(f"expected interferometric vector of length {self.data_length}, got {e.shape}")
        return e

    def _apply(self, e: np.ndarray, v: np.ndarray, z: np.ndarray | None = None) -> np.ndarray:
        """``P_S(Re F^H(e)) v`` for real ``v``; ``z`` are cached linear terms of ``v``."""
        if z is None:
            z = self.linear_terms(v)
        e = e.reshape(-1, self.M)
        # G v = s sum e L_i (L_j^H v) = s sum e z_j L_i
        # G^T v = s sum e conj(L_j) conj(z_i)
        coef = np.zeros((self.N, self.M), dtype=complex)
        np.add.at(coef, self.pair_i, e * z[self.pair_j])
        np.add.at(coef, self.pair_j, np.conj(e) * z[self.pair_i])
        self.multiplications += 4 * len(self.pair_i) * self.M + self._L.size
        out = coef.ravel() @ self._L
        return 0.5 * self.scale * out.real

    def adjoint_apply(self, e, rho, z: np.ndarray | None = None) -> np.ndarray:
        """``P_S(Re{F^H(e)}) rho`` for an interferometric-domain vector ``e``."""
        rho = np.asarray(rho, dtype=float)
        if rho.shape != (self.K,):
            raise ValueError(f"expected a length-{self.K} real vector, got {rho.shape}")
        return self._apply(self._check_data(e), rho, z)

    def backprojection_matvec(self, d, v) -> np.ndarray:
        """Apply the backprojected lifted estimate ``P_S(Re{F^H(d)})`` to ``v``."""
        return self.adjoint_apply(d, v)

    def forward(self, X) -> np.ndarray:
        """General (not rank-1) lifted map; costs O(N M K^2), small problems only."""
        X = np.asarray(X)
        if X.shape != (self.K, self.K):
            raise ValueError(f"expected a {self.K}x{self.K} matrix, got {X.shape}")
        LX = np.einsum("nk,kl->nl", self._Lc, X).reshape(self.N, self.M, self.K)
        Lr = self.vectors.values
        vals = np.einsum("pmk,pmk->pm", LX[self.pair_i], Lr[self.pair_j])
        return self.scale * vals.ravel()
