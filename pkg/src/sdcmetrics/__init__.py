"""Permutation-model confidentiality (CM1, CM2, CM3) and utility (UM) metrics
for anonymized microdata, with the anonymization methods used to compare them."""
from ._kernels import BACKEND
from .cca import CanonicalSpectrum, CovariancePair, canonical_correlations, covariance_pair
from .data import Dataset, RankMatrix, align_sizes, load_csv, rank_matrix, reverse_map, save_csv
from .errors import ConfigError, DataError, NumericError, SDCError
from .harness import SweepConfig, SweepResult, emit_report, run_sweep, simulate_correlated
from .metrics import (
    MetricReport,
    cm1,
    cm2,
    cm3,
    evaluate,
    null_divergence,
    spectrum_divergence,
    um,
)
from .sdc import (
    DomainBounds,
    NoiseSpec,
    additive_noise,
    anonymize,
    column_shuffle,
    ipso_synthesize,
    laplace_dp,
    mdav,
    multiplicative_noise,
    trivial_record_swap,
)

__version__ = "0.1.0"
