"""Covariances and canonical correlations between two rank matrices."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import RankMatrix
from .errors import DataError

# relative eigenvalue cut-off for the pseudo-inverse square root
RANK_TOL = 1e-10


@dataclass(frozen=True)
class CovariancePair:
    cxx: np.ndarray
    cyy: np.ndarray
    cxy: np.ndarray

    @property
    def cyx(self) -> np.ndarray:
        return self.cxy.T

    @property
    def m(self) -> int:
        return self.cxx.shape[0]


@dataclass(frozen=True)
class CanonicalSpectrum:
    """Canonical correlations in non-increasing order, plus basis vectors.

    ``basis_x[:, i]`` and ``basis_y[:, i]`` are the weight vectors whose
    projections attain ``rhos[i]``; columns past ``effective_rank`` are zero.
    """

    rhos: np.ndarray
    basis_x: np.ndarray
    basis_y: np.ndarray
    effective_rank: int


def covariance_pair(rx: RankMatrix, ry: RankMatrix) -> CovariancePair:
    """Sample covariances (divisor n - 1) of two row-paired matrices."""
    a = _as_matrix(rx)
    b = _as_matrix(ry)
    if a.shape != b.shape:
        raise DataError(f"shape mismatch: {a.shape} vs {b.shape}")
    n = a.shape[0]
    if n < 2:
        raise DataError("covariance needs at least two records")
    a = a - a.mean(axis=0)
    b = b - b.mean(axis=0)
    cxx = a.T @ a / (n - 1)
    cyy = b.T @ b / (n - 1)
    cxy = a.T @ b / (n - 1)
    # exact symmetry; matmul does not guarantee it
    cxx = (cxx + cxx.T) / 2
    cyy = (cyy + cyy.T) / 2
    return CovariancePair(cxx, cyy, cxy)


def _as_matrix(r) -> np.ndarray:
    if isinstance(r, RankMatrix):
        return np.asarray(r.ranks, dtype=np.float64)
    arr = np.asarray(r, dtype=np.float64)
    return arr[:, None] if arr.ndim == 1 else arr


def inv_sqrt_psd(c: np.ndarray, tol: float = RANK_TOL) -> tuple[np.ndarray, int]:
    """Symmetric pseudo-inverse square root of a PSD matrix and its numerical rank.

    Eigen-directions with eigenvalue at or below ``tol * max_eigenvalue`` are dropped.
    """
    w, v = np.linalg.eigh(c)
    top = w.max() if w.size else 0.0
    if top <= 0:
        return np.zeros_like(c), 0
    keep = w > tol * top
    v = v[:, keep]
    return (v / np.sqrt(w[keep])) @ v.T, int(keep.sum())


def canonical_correlations(cp: CovariancePair) -> CanonicalSpectrum:
    """Solve the CCA eigenproblem through the whitened cross-covariance.

    The singular values of Wx Cxy Wy (W the pseudo-inverse square roots) are
    the canonical correlations; this is the symmetric equivalent of the pair of
    generalized eigenproblems and stays stable for rank-deficient covariances.
    """
    m = cp.m
    wx, rank_x = inv_sqrt_psd(cp.cxx)
    wy, rank_y = inv_sqrt_psd(cp.cyy)
    eff = min(rank_x, rank_y)
    rhos = np.zeros(m)
    basis_x = np.zeros((m, m))
    basis_y = np.zeros((m, m))
    if eff > 0:
        u, s, vt = np.linalg.svd(wx @ cp.cxy @ wy)
        rhos[:eff] = np.clip(s[:eff], 0.0, 1.0)
        basis_x[:, :eff] = wx @ u[:, :eff]
        basis_y[:, :eff] = wy @ vt.T[:, :eff]
    return CanonicalSpectrum(rhos, basis_x, basis_y, eff)


def cca(rx: RankMatrix, ry: RankMatrix) -> CanonicalSpectrum:
    """Shorthand for ``canonical_correlations(covariance_pair(rx, ry))``."""
    return canonical_correlations(covariance_pair(rx, ry))
