"""Anonymization methods: microaggregation, Laplace DP, noise, IPSO synthesis.

Every method maps an original Dataset to an anonymized one of the same shape
(IPSO may change the record count) and is reproducible given its seed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import mdav_labels
from .data import Dataset
from .errors import ConfigError, NumericError


@dataclass(frozen=True)
class DomainBounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=np.float64).ravel()
        upper = np.asarray(self.upper, dtype=np.float64).ravel()
        if lower.shape != upper.shape:
            raise ConfigError("lower and upper bounds differ in length")
        if not (np.isfinite(lower).all() and np.isfinite(upper).all()):
            raise ConfigError("domain bounds must be finite")
        if np.any(upper <= lower):
            j = int(np.flatnonzero(upper <= lower)[0])
            raise ConfigError(f"domain upper bound must exceed lower bound (attribute {j})")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def default_for(cls, d: Dataset) -> "DomainBounds":
        """[0, 1.5 * column maximum] per attribute, as for non-negative amounts."""
        return cls(np.zeros(d.m), 1.5 * d.values.max(axis=0))

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower


NOISE_KINDS = ("additive", "multiplicative", "laplace")


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    parameter: float
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ConfigError(f"noise kind must be one of {NOISE_KINDS}, got {self.kind!r}")
        _check_noise_parameter(self.kind, self.parameter)

    def apply(self, d: Dataset, bounds: DomainBounds | None = None) -> Dataset:
        if self.kind == "additive":
            return additive_noise(d, self.parameter, self.seed)
        if self.kind == "multiplicative":
            return multiplicative_noise(d, self.parameter, self.seed)
        return laplace_dp(d, self.parameter, bounds, self.seed)


def _check_noise_parameter(kind: str, p: float) -> None:
    if kind == "additive" and not p > 0:
        raise ConfigError(f"additive noise needs alpha > 0, got {p}")
    if kind == "multiplicative" and not 0 <= p < 1:
        raise ConfigError(f"multiplicative noise needs 0 <= beta < 1, got {p}")
    if kind == "laplace" and not p > 0:
        raise ConfigError(f"laplace noise needs epsilon > 0, got {p}")


def standardize(values: np.ndarray) -> np.ndarray:
    """Zero-mean, unit-variance columns; constant columns are only centred."""
    values = np.asarray(values, dtype=np.float64)
    sd = values.std(axis=0)
    sd[sd == 0] = 1.0
    return (values - values.mean(axis=0)) / sd


def mdav_clusters(d: Dataset, k: int) -> np.ndarray:
    """MDAV cluster label of each record (Euclidean distance on standardized attributes)."""
    k = int(k)
    if k < 1:
        raise ConfigError(f"k must be at least 1, got {k}")
    if k > d.n:
        raise ConfigError(f"k = {k} exceeds the number of records n = {d.n}")
    return mdav_labels(standardize(d.values), k)


def mdav(d: Dataset, k: int) -> Dataset:
    """k-anonymous microaggregation: each record replaced by its MDAV cluster centroid."""
    labels = mdav_clusters(d, k)
    ncl = int(labels.max()) + 1
    sums = np.zeros((ncl, d.m))
    np.add.at(sums, labels, d.values)
    counts = np.bincount(labels, minlength=ncl)
    return d.with_values((sums / counts[:, None])[labels])


def laplace_dp(d: Dataset, epsilon: float, bounds: DomainBounds | None = None,
               seed: int = 0) -> Dataset:
    """Per-cell Laplace noise; the budget is split evenly over attributes.

    Attribute j gets budget epsilon/m and sensitivity equal to its domain
    width, so the noise scale is width_j * m / epsilon. No clamping.
    """
    _check_noise_parameter("laplace", epsilon)
    if bounds is None:
        bounds = DomainBounds.default_for(d)
    if bounds.width.size != d.m:
        raise ConfigError(f"bounds given for {bounds.width.size} attributes, data has {d.m}")
    scale = bounds.width / (epsilon / d.m)
    rng = np.random.default_rng(seed)
    return d.with_values(d.values + rng.laplace(0.0, 1.0, size=d.shape) * scale)


def additive_noise(d: Dataset, alpha: float, seed: int = 0) -> Dataset:
    """Gaussian noise with standard deviation alpha times each column's sample SD."""
    _check_noise_parameter("additive", alpha)
    sd = d.values.std(axis=0, ddof=1)
    rng = np.random.default_rng(seed)
    return d.with_values(d.values + rng.standard_normal(d.shape) * (alpha * sd))


def multiplicative_noise(d: Dataset, beta: float, seed: int = 0) -> Dataset:
    """Multiply every cell by an independent Uniform(1 - beta, 1 + beta) factor."""
    _check_noise_parameter("multiplicative", beta)
    rng = np.random.default_rng(seed)
    return d.with_values(d.values * rng.uniform(1.0 - beta, 1.0 + beta, size=d.shape))


def ipso_synthesize(d: Dataset, n_out: int | None = None, seed: int = 0) -> Dataset:
    """Synthetic records with exactly the sample means and covariances of ``d``.

    A standard Gaussian draw is centred, whitened with the inverse Cholesky
    factor of its own sample covariance, coloured with the Cholesky factor of
    the original covariance and shifted by the original means.
    """
    n_out = d.n if n_out is None else int(n_out)
    if n_out < d.m + 2:
        raise ConfigError(f"IPSO needs n_out >= m + 2 = {d.m + 2}, got {n_out}")
    target = np.cov(d.values, rowvar=False).reshape(d.m, d.m)
    try:
        l_target = np.linalg.cholesky(target)
    except np.linalg.LinAlgError:
        raise NumericError("original covariance is not positive definite; IPSO needs full rank") from None
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n_out, d.m))
    z -= z.mean(axis=0)
    l_draw = np.linalg.cholesky(np.cov(z, rowvar=False).reshape(d.m, d.m))
    # rows of z @ inv(L_draw).T have identity sample covariance
    white = np.linalg.solve(l_draw, z.T).T
    return d.with_values(white @ l_target.T + d.values.mean(axis=0))


def trivial_record_swap(d: Dataset, seed: int = 0) -> Dataset:
    """Permute whole records; ranks per attribute move together."""
    rng = np.random.default_rng(seed)
    return d.take(rng.permutation(d.n))


def column_shuffle(d: Dataset, seed: int = 0) -> Dataset:
    """Independent random permutation of every column."""
    rng = np.random.default_rng(seed)
    out = np.empty_like(d.values)
    for j in range(d.m):
        out[:, j] = d.values[rng.permutation(d.n), j]
    return d.with_values(out)


# method name -> parameter name (None: takes no parameter)
METHODS = {
    "mdav": "k",
    "laplace": "epsilon",
    "additive": "alpha",
    "multiplicative": "beta",
    "ipso": "n_out",
    "swap": None,
    "shuffle": None,
}

SYNTHETIC_METHODS = frozenset({"ipso"})


def anonymize(d: Dataset, method: str, param: float | None = None, seed: int = 0,
              bounds: DomainBounds | None = None) -> Dataset:
    """Dispatch to an anonymization method by name.

    For ``ipso`` the parameter is the output record count (0 or None keeps n).
    """
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if METHODS[method] is not None and param is None and method != "ipso":
        raise ConfigError(f"method {method!r} needs a parameter ({METHODS[method]})")
    if method == "mdav":
        if float(param) != int(param):
            raise ConfigError(f"k must be an integer, got {param}")
        return mdav(d, int(param))
    if method == "laplace":
        return laplace_dp(d, float(param), bounds, seed)
    if method == "additive":
        return additive_noise(d, float(param), seed)
    if method == "multiplicative":
        return multiplicative_noise(d, float(param), seed)
    if method == "ipso":
        return ipso_synthesize(d, int(param) if param else None, seed)
    if method == "swap":
        return trivial_record_swap(d, seed)
    return column_shuffle(d, seed)
