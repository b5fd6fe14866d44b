"""Dense reference implementations used to certify the matrix-free engine.

Only for small problems: every entry point enforces a size budget.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lifted import LiftedOperator

DENSE_BUDGET = 10_000_000
MAX_SPECTRAL_K = 64


@dataclass(frozen=True)
class DenseLiftedMatrix:
    """Materialized lifted map.

    Rows follow the interferometric ordering (pairs lexicographic, frequencies
    contiguous).  Columns index the column-wise vectorization of a K x K matrix,
    i.e. entry ``(k, k')`` sits at column ``k + K * k'``; row ``(i, j, m)`` holds
    ``s * conj(L_i[k]) * L_j[k']``.
    """

    matrix: np.ndarray
    K: int

    def apply(self, X) -> np.ndarray:
        return self.matrix @ np.asarray(X).ravel(order="F")


def vec(X) -> np.ndarray:
    return np.asarray(X).ravel(order="F")


def build_dense(operator: LiftedOperator, budget: int = DENSE_BUDGET) -> DenseLiftedMatrix:
    K = operator.K
    rows = operator.data_length
    if rows * K * K > budget:
        raise ValueError(f"dense lifted matrix would have {rows * K * K} entries (budget {budget})")
    L = operator.vectors.values
    Li = L[operator.pair_i]  # (P, M, K)
    Lj = L[operator.pair_j]
    # outer[p, m, k, k'] = conj(Li[k]) Lj[k']; column index k + K k' -> order F over (k, k')
    outer = np.conj(Li)[..., :, None] * Lj[..., None, :]
    mat = operator.scale * outer.reshape(rows, K, K).transpose(0, 2, 1).reshape(rows, K * K)
    return DenseLiftedMatrix(mat, K)


def dense_adjoint(dense: DenseLiftedMatrix, e) -> np.ndarray:
    e = np.asarray(getattr(e, "values", e), dtype=complex)
    if e.shape != (dense.matrix.shape[0],):
        raise ValueError(f"expected length {dense.matrix.shape[0]}, got {e.shape}")
    return (np.conj(dense.matrix).T @ e).reshape(dense.K, dense.K, order="F")


def dense_backprojection(dense: DenseLiftedMatrix, d) -> np.ndarray:
    """``P_S(Re F^H d)`` as an explicit symmetric matrix."""
    X = dense_adjoint(dense, d).real
    return 0.5 * (X + X.T)


def dense_spectral(X) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a real symmetric matrix, eigenvalues descending."""
    X = np.asarray(X, dtype=float)
    if X.shape[0] > MAX_SPECTRAL_K:
        raise ValueError(f"dense eigensolver limited to K <= {MAX_SPECTRAL_K}")
    w, V = np.linalg.eigh(X)
    return w[::-1], V[:, ::-1]
