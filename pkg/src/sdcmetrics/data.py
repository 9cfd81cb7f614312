"""Datasets, rank views, reverse mapping and record-count alignment."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._kernels import average_ranks
from .errors import DataError


@dataclass(frozen=True, eq=False)
class Dataset:
    """An n x m table of finite reals with attribute names.

    The value matrix is copied and made read-only on construction.
    """

    names: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise DataError(f"values must be a 2-D matrix, got {values.ndim} dimensions")
        names = tuple(str(x) for x in self.names)
        if values.shape[1] < 1:
            raise DataError("a dataset needs at least one attribute (m >= 1)")
        if len(names) != values.shape[1]:
            raise DataError(f"{len(names)} attribute names for {values.shape[1]} columns")
        if values.shape[0] < 2:
            raise DataError(f"a dataset needs at least two records (n >= 2), got n = {values.shape[0]}")
        if not np.isfinite(values).all():
            i, j = np.argwhere(~np.isfinite(values))[0]
            raise DataError(f"non-finite value at row {i + 1}, column {names[j]!r}")
        values.setflags(write=False)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_array(cls, values, names=None) -> "Dataset":
        values = np.asarray(values, dtype=np.float64)
        if values.ndim == 1:
            values = values[:, None]
        if names is None:
            names = [f"x{j + 1}" for j in range(values.shape[1])]
        return cls(tuple(names), values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def columns(self, selection) -> "Dataset":
        """Subset of attributes, selected by name or 0-based index."""
        idx = []
        for item in selection:
            if isinstance(item, (int, np.integer)):
                if not 0 <= item < self.m:
                    raise DataError(f"column index {item} out of range for m = {self.m}")
                idx.append(int(item))
            elif item in self.names:
                idx.append(self.names.index(item))
            else:
                raise DataError(f"unknown attribute {item!r}")
        return Dataset(tuple(self.names[j] for j in idx), self.values[:, idx])

    def take(self, rows) -> "Dataset":
        return Dataset(self.names, self.values[np.asarray(rows)])

    def with_values(self, values) -> "Dataset":
        return Dataset(self.names, values)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.names == other.names and np.array_equal(self.values, other.values)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class RankMatrix:
    """Per-attribute fractional ranks of a dataset, values in [1, n]."""

    ranks: np.ndarray
    names: tuple[str, ...]

    @property
    def n(self) -> int:
        return self.ranks.shape[0]

    @property
    def m(self) -> int:
        return self.ranks.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.ranks.shape

    def take(self, rows=None, cols=None) -> "RankMatrix":
        """Reorder rows and/or keep a subset of columns; ranks are not recomputed."""
        r = self.ranks
        names = self.names
        if rows is not None:
            r = r[np.asarray(rows)]
        if cols is not None:
            cols = list(cols)
            r = r[:, cols]
            names = tuple(names[j] for j in cols)
        r = np.array(r, copy=True)
        r.setflags(write=False)
        return RankMatrix(r, names)


def load_csv(path) -> Dataset:
    """Read a headed, comma-separated file of reals."""
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"no such file: {path}") from None
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, expected a header row") from None
        header = [h.strip() for h in header]
        if not header or header == [""]:
            raise DataError(f"{path}: empty header row")
        rows = []
        for lineno, row in enumerate(reader, start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                raise DataError(
                    f"{path}: row {lineno} has {len(row)} fields, header has {len(header)}"
                )
            parsed = []
            for name, cell in zip(header, row):
                try:
                    v = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}: non-numeric value {cell.strip()!r} at row {lineno}, column {name!r}"
                    ) from None
                if not math.isfinite(v):
                    raise DataError(f"{path}: non-finite value at row {lineno}, column {name!r}")
                parsed.append(v)
            rows.append(parsed)
    if len(rows) < 2:
        raise DataError(f"{path}: need at least two data rows (n < 2), found {len(rows)}")
    return Dataset(tuple(header), np.array(rows, dtype=np.float64))


def format_csv(d: Dataset) -> str:
    """CSV text in the format ``load_csv`` reads; floats use ``repr`` so they round-trip."""
    lines = [",".join(d.names)]
    lines.extend(",".join(repr(float(v)) for v in row) for row in d.values)
    return "\n".join(lines) + "\n"


def save_csv(d: Dataset, path) -> None:
    try:
        Path(path).write_text(format_csv(d), encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from None


def rank_matrix(d: Dataset) -> RankMatrix:
    """Fractional ranks of each column; ties get the average of the ranks they span."""
    ranks = average_ranks(d.values)
    ranks.setflags(write=False)
    return RankMatrix(ranks, d.names)


def reverse_map(original: Dataset, anonymized: Dataset) -> Dataset:
    """Permutation of ``original`` whose per-column ranks match ``anonymized``.

    For each attribute, record i receives the original value whose rank equals
    the rank of the anonymized value of record i. Fractional (tied) anonymized
    ranks are rounded half-up to an integer position.
    """
    if original.shape != anonymized.shape:
        raise DataError(f"shape mismatch: original {original.shape} vs anonymized {anonymized.shape}")
    n = original.n
    sorted_orig = np.sort(original.values, axis=0)
    yr = average_ranks(anonymized.values)
    pos = np.clip(np.floor(yr + 0.5).astype(np.int64) - 1, 0, n - 1)
    z = np.take_along_axis(sorted_orig, pos, axis=0)
    return Dataset(original.names, z)


def align_sizes(a: Dataset, b: Dataset, seed: int = 0) -> tuple[Dataset, Dataset]:
    """Subsample the larger dataset (without replacement) to the smaller record count.

    Sampled rows keep their original relative order.
    """
    if a.m != b.m:
        raise DataError(f"attribute count mismatch: {a.m} vs {b.m}")
    if a.n == b.n:
        return a, b
    rng = np.random.default_rng(seed)
    target = min(a.n, b.n)
    if a.n > b.n:
        rows = np.sort(rng.choice(a.n, size=target, replace=False))
        return a.take(rows), b
    rows = np.sort(rng.choice(b.n, size=target, replace=False))
    return a, b.take(rows)
