"""Bounded confidentiality (CM1, CM2, CM3) and utility (UM) metrics.

All metrics work on ranks: datasets are converted with ``rank_matrix`` before
any covariance is taken.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .cca import CanonicalSpectrum, CovariancePair, canonical_correlations, covariance_pair
from .data import Dataset, RankMatrix, align_sizes, rank_matrix
from .errors import ConfigError, DataError

# first case of UM: both spectra uniform within this tolerance
UNIFORM_TOL = 1e-9
# divergences at or below this are treated as zero
ZERO_DIVERGENCE = 1e-12

MAPPINGS = ("paired", "absent")


def cm1(spectrum: CanonicalSpectrum) -> float:
    """One minus the squared largest canonical correlation."""
    rho1 = float(spectrum.rhos[0]) if len(spectrum.rhos) else 0.0
    return 1.0 - rho1 * rho1


def cm2(spectrum: CanonicalSpectrum) -> tuple[float, float]:
    """Product of (1 - rho_i^2) over all canonical correlations, and -ln of it.

    The second value is the mutual information between the two datasets when
    they are jointly elliptically distributed; it is +inf when the product is 0.
    """
    rhos = np.asarray(spectrum.rhos, dtype=np.float64)
    value = 1.0
    for r in rhos:
        value *= 1.0 - float(r) * float(r)
    mi = math.inf if value <= 0.0 else -math.log(value)
    return value, (0.0 if mi == 0.0 else mi)


def _cm2_of_ranks(rx: np.ndarray, ry: np.ndarray) -> float:
    return cm2(canonical_correlations(covariance_pair(rx, ry)))[0]


def cm3(x, y) -> float:
    """Mapping-free confidentiality: the least CM2 over all sort-by-one-attribute mappings.

    For each attribute j both sets are sorted by j, attribute j is dropped and
    CM2 is computed on the remaining attributes pairing rows by sorted
    position. Ties on j are broken by the remaining attributes (left to right),
    then by row index, identically on both sides.

    Accepts Datasets or RankMatrix objects with equal shapes.
    """
    rx = _ranks(x)
    ry = _ranks(y)
    if rx.shape != ry.shape:
        raise DataError(f"cm3 needs equal shapes, got {rx.shape} and {ry.shape}; align sizes first")
    m = rx.shape[1]
    if m < 2:
        raise DataError("cm3 needs at least two attributes")
    best = 1.0
    for j in range(m):
        rest = [c for c in range(m) if c != j]
        xs = rx[_sort_order(rx, j, rest)][:, rest]
        ys = ry[_sort_order(ry, j, rest)][:, rest]
        best = min(best, _cm2_of_ranks(xs, ys))
    return best


def _sort_order(r: np.ndarray, j: int, rest: list[int]) -> np.ndarray:
    # np.lexsort: last key is primary and the sort is stable (row index last resort)
    keys = [r[:, c] for c in reversed(rest)] + [r[:, j]]
    return np.lexsort(keys)


def _ranks(d) -> np.ndarray:
    if isinstance(d, RankMatrix):
        return np.asarray(d.ranks)
    if isinstance(d, Dataset):
        return np.asarray(rank_matrix(d).ranks)
    raise TypeError(f"expected Dataset or RankMatrix, got {type(d).__name__}")


def spectrum_divergence(lambda_x_scaled, lambda_yx_scaled) -> float:
    """Sum of squared differences between the two scaled spectra; at most 2."""
    a = np.asarray(lambda_x_scaled, dtype=np.float64)
    b = np.asarray(lambda_yx_scaled, dtype=np.float64)
    if a.shape != b.shape:
        raise DataError(f"spectra lengths differ: {a.shape} vs {b.shape}")
    return float(np.sum((a - b) ** 2))


def null_divergence(lambda_x_scaled) -> float:
    """Divergence of a scaled spectrum from the uniform one; at most (m - 1)/m."""
    a = np.asarray(lambda_x_scaled, dtype=np.float64)
    return float(np.sum((a - 1.0 / a.size) ** 2))


def scaled_spectra(cp: CovariancePair) -> tuple[np.ndarray, np.ndarray]:
    """Scaled eigenvalues of Cxx and the Y variance explained by each Cxx eigenvector.

    Both families are normalised to sum to one. A family with zero total
    variance carries no covariance structure and is reported as uniform.
    """
    w, v = np.linalg.eigh(cp.cxx)
    order = np.argsort(-w, kind="stable")
    v = v[:, order]
    # quadratic forms on both sides so that identical inputs give identical values
    lx = np.einsum("ij,ik,kj->j", v, cp.cxx, v)
    lyx = np.einsum("ij,ik,kj->j", v, cp.cyy, v)
    return _unit_sum(lx), _unit_sum(lyx)


def _unit_sum(lam: np.ndarray) -> np.ndarray:
    lam = np.clip(lam, 0.0, None)
    total = lam.sum()
    if total <= 0.0:
        return np.full(lam.size, 1.0 / lam.size)
    return lam / total


def um_from_spectra(lambda_x_scaled, lambda_yx_scaled) -> float:
    a = np.asarray(lambda_x_scaled, dtype=np.float64)
    b = np.asarray(lambda_yx_scaled, dtype=np.float64)
    u = 1.0 / a.size
    if np.max(np.abs(a - u)) <= UNIFORM_TOL and np.max(np.abs(b - u)) <= UNIFORM_TOL:
        return 1.0
    num = spectrum_divergence(a, b)
    den = null_divergence(a)
    if den <= ZERO_DIVERGENCE:
        # spherical original: any departure of Y is spurious structure
        return 1.0 if num <= ZERO_DIVERGENCE else 0.0
    return 1.0 - min(1.0, num / den)


def um(x_ranks, y_ranks) -> float:
    """Covariance-spectrum utility of ``y`` relative to ``x`` (1 = fully preserved)."""
    return um_from_spectra(*scaled_spectra(covariance_pair(x_ranks, y_ranks)))


@dataclass(frozen=True)
class MetricReport:
    cm1: float
    cm2: float
    cm3: float | None
    um: float
    mutual_information: float
    spectrum: CanonicalSpectrum = field(repr=False)
    lambda_x_scaled: np.ndarray = field(repr=False)
    lambda_yx_scaled: np.ndarray = field(repr=False)
    mapping: str = "paired"

    @property
    def advisory(self) -> bool:
        """True when CM1/CM2 were computed without a true record mapping."""
        return self.mapping == "absent"

    def to_dict(self) -> dict:
        return {
            "cm1": self.cm1,
            "cm2": self.cm2,
            "cm3": self.cm3,
            "um": self.um,
            "mutual_information": _json_number(self.mutual_information),
            "lambda_x_scaled": [float(v) for v in self.lambda_x_scaled],
            "lambda_yx_scaled": [float(v) for v in self.lambda_yx_scaled],
            "rhos": [float(v) for v in self.spectrum.rhos],
            "mapping": self.mapping,
            "cm1_cm2_advisory": self.advisory,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _json_number(v: float):
    # strict JSON has no infinity literal
    return "inf" if math.isinf(v) else v


def evaluate(x: Dataset, y: Dataset, *, compute_cm3: bool | None = None,
             mapping: str = "paired", seed: int = 0) -> MetricReport:
    """All metrics for one (original, anonymized) pair.

    ``mapping="absent"`` declares that rows of ``y`` do not correspond to rows
    of ``x`` (synthetic data): CM1/CM2 are still computed on the row order but
    flagged advisory, and CM3 is computed unless ``compute_cm3=False``.
    Differing record counts are reconciled by seeded subsampling.
    """
    if mapping not in MAPPINGS:
        raise ConfigError(f"mapping must be one of {MAPPINGS}, got {mapping!r}")
    if compute_cm3 is None:
        compute_cm3 = mapping == "absent"
    if x.m != y.m:
        raise DataError(f"attribute count mismatch: {x.m} vs {y.m}")
    x, y = align_sizes(x, y, seed)
    rx = rank_matrix(x).ranks
    ry = rank_matrix(y).ranks
    cp = covariance_pair(rx, ry)
    spectrum = canonical_correlations(cp)
    c1 = cm1(spectrum)
    c2, mi = cm2(spectrum)
    lx, lyx = scaled_spectra(cp)
    c3 = cm3(RankMatrix(rx, x.names), RankMatrix(ry, y.names)) if compute_cm3 and x.m >= 2 else None
    return MetricReport(
        cm1=c1,
        cm2=c2,
        cm3=c3,
        um=um_from_spectra(lx, lyx),
        mutual_information=mi,
        spectrum=spectrum,
        lambda_x_scaled=lx,
        lambda_yx_scaled=lyx,
        mapping=mapping,
    )
