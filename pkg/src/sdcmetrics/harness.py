"""Simulated data, replicated parameter sweeps and plot-ready reports.

Child seeds
-----------
Replicate ``r`` of grid point ``g`` under base seed ``s`` uses the integer
seed ``child_seed(s, g, r)``: the first 64-bit word of
``numpy.random.SeedSequence(s, spawn_key=(g, r))``. The same integer seeds the
anonymization method and, when record counts differ, the size alignment, so
any single replicate can be re-run on its own (``sdcmetrics anonymize --seed``).
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .data import Dataset, load_csv
from .errors import ConfigError, DataError, NumericError, SDCError
from .metrics import MAPPINGS, evaluate
from .sdc import METHODS, SYNTHETIC_METHODS, anonymize

METRIC_KEYS = ("cm1", "cm2", "cm3", "um", "mutual_information")


def simulate_correlated(n: int, m: int, rho: float, seed: int = 0) -> Dataset:
    """Gaussian sample with zero means, unit variances and constant pairwise correlation."""
    n, m = int(n), int(m)
    if m < 1:
        raise ConfigError(f"m must be at least 1, got {m}")
    if n <= m or n < 2:
        raise ConfigError(f"need n > m (and n >= 2), got n={n}, m={m}")
    if not -1 < rho < 1:
        raise ConfigError(f"|rho| must be below 1, got {rho}")
    corr = np.full((m, m), float(rho))
    np.fill_diagonal(corr, 1.0)
    try:
        chol = np.linalg.cholesky(corr)
    except np.linalg.LinAlgError:
        raise ConfigError(f"rho={rho} gives a non-positive-definite correlation for m={m}") from None
    z = np.random.default_rng(seed).standard_normal((n, m))
    return Dataset.from_array(z @ chol.T)


def child_seed(seed: int, grid_index: int, replicate: int) -> int:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(grid_index), int(replicate)))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class SweepConfig:
    """One method swept over a parameter grid.

    ``dataset`` is a CSV path or ``"simulated"`` (then ``sim_n``, ``sim_m``,
    ``sim_rho`` describe the generator, seeded with ``seed``). ``columns``
    restricts the attributes, e.g. to compare 4 vs 3 vs 2 attributes.
    ``mapping``/``compute_cm3`` left as None follow the method: synthetic
    methods get mapping "absent" and CM3.
    """

    method: str
    grid: tuple[float, ...]
    replicates: int = 1
    seed: int = 0
    dataset: str = "simulated"
    compute_cm3: bool | None = None
    mapping: str | None = None
    columns: tuple | None = None
    sim_n: int = 1080
    sim_m: int = 4
    sim_rho: float = 0.99
    jobs: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise ConfigError("grid must contain at least one parameter value")
        if not all(math.isfinite(v) for v in grid):
            raise ConfigError("grid values must be finite")
        object.__setattr__(self, "grid", grid)
        if int(self.replicates) < 1:
            raise ConfigError(f"replicates must be at least 1, got {self.replicates}")
        if self.mapping is not None and self.mapping not in MAPPINGS:
            raise ConfigError(f"mapping must be one of {MAPPINGS}, got {self.mapping!r}")
        if int(self.jobs) < 1:
            raise ConfigError("jobs must be at least 1")
        if self.columns is not None:
            object.__setattr__(self, "columns", tuple(self.columns))

    @property
    def effective_mapping(self) -> str:
        if self.mapping is not None:
            return self.mapping
        return "absent" if self.method in SYNTHETIC_METHODS else "paired"

    @property
    def effective_cm3(self) -> bool:
        if self.compute_cm3 is not None:
            return bool(self.compute_cm3)
        return self.effective_mapping == "absent"

    def load_dataset(self) -> Dataset:
        if self.dataset == "simulated":
            d = simulate_correlated(self.sim_n, self.sim_m, self.sim_rho, self.seed)
        else:
            d = load_csv(self.dataset)
        if self.columns is not None:
            d = d.columns(self.columns)
        return d


_INT_KEYS = {"replicates", "seed", "sim_n", "sim_m", "jobs"}
_FLOAT_KEYS = {"sim_rho"}
_BOOL_WORDS = {"true": True, "yes": True, "1": True, "on": True,
               "false": False, "no": False, "0": False, "off": False}


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines (``#`` starts a comment) into SweepConfig keywords."""
    known = {f.name for f in fields(SweepConfig)}
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        out[key] = _convert(key, value, lineno)
    return out


def _convert(key: str, value: str, lineno: int):
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
        if key == "grid":
            return tuple(float(v) for v in value.replace(",", " ").split())
        if key == "columns":
            items = [v for v in value.replace(",", " ").split()]
            return tuple(int(v) if v.isdigit() else v for v in items)
        if key == "compute_cm3":
            if value.lower() in ("auto", ""):
                return None
            return _BOOL_WORDS[value.lower()]
        if key == "mapping" and value.lower() == "auto":
            return None
    except (ValueError, KeyError):
        raise ConfigError(f"config line {lineno}: bad value {value!r} for {key!r}") from None
    return value


def load_config(path, **overrides) -> SweepConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    kw = parse_config_text(text)
    kw.update({k: v for k, v in overrides.items() if v is not None})
    if "method" not in kw or "grid" not in kw:
        raise ConfigError("config must set 'method' and 'grid'")
    return SweepConfig(**kw)


@dataclass(frozen=True)
class SweepRow:
    cm1: float
    cm2: float
    cm3: float | None
    um: float
    mutual_information: float

    def rounded(self, digits: int = 6) -> "SweepRow":
        return SweepRow(*(_sig(getattr(self, k), digits) for k in METRIC_KEYS))


@dataclass(frozen=True)
class GridPoint:
    parameter: float
    replicates: tuple[SweepRow, ...]
    mean: SweepRow


@dataclass(frozen=True)
class SweepResult:
    method: str
    parameter_name: str | None
    points: tuple[GridPoint, ...] = field(default_factory=tuple)

    def rounded(self, digits: int = 6) -> "SweepResult":
        pts = tuple(
            GridPoint(_sig(p.parameter, digits),
                      tuple(r.rounded(digits) for r in p.replicates),
                      p.mean.rounded(digits))
            for p in self.points
        )
        return replace(self, points=pts)

    def means(self, key: str) -> np.ndarray:
        return np.array([getattr(p.mean, key) for p in self.points], dtype=float)


def _sig(v, digits: int = 6):
    if v is None or math.isinf(v) or math.isnan(v):
        return v
    return float(f"{v:.{digits}g}")


def _mean_row(rows) -> SweepRow:
    vals = {}
    for key in METRIC_KEYS:
        xs = [getattr(r, key) for r in rows]
        if any(x is None for x in xs):
            vals[key] = None
        else:
            # fsum keeps the mean inside [min, max] of the replicates
            mean = math.fsum(xs) / len(xs) if not any(math.isinf(x) for x in xs) else math.inf
            vals[key] = min(max(mean, min(xs)), max(xs))
    return SweepRow(**vals)


def run_replicate(cfg: SweepConfig, x: Dataset, grid_index: int, replicate: int) -> SweepRow:
    """Anonymize and evaluate one (grid point, replicate) cell of a sweep."""
    param = cfg.grid[grid_index]
    seed = child_seed(cfg.seed, grid_index, replicate)
    y = anonymize(x, cfg.method, param, seed)
    rep = evaluate(x, y, compute_cm3=cfg.effective_cm3, mapping=cfg.effective_mapping, seed=seed)
    return SweepRow(rep.cm1, rep.cm2, rep.cm3, rep.um, rep.mutual_information)


def _cell(args):
    cfg, x, g, r = args
    try:
        return run_replicate(cfg, x, g, r)
    except SDCError as exc:
        raise type(exc)(f"grid point {cfg.method}={cfg.grid[g]:g}: {exc}") from None
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        raise NumericError(f"grid point {cfg.method}={cfg.grid[g]:g}: {exc}") from None


def run_sweep(cfg: SweepConfig, dataset: Dataset | None = None) -> SweepResult:
    """Evaluate every (grid value, replicate) pair and average per grid value.

    Results are ordered by grid value and do not depend on ``cfg.jobs``.
    """
    x = dataset if dataset is not None else cfg.load_dataset()
    order = sorted(range(len(cfg.grid)), key=lambda g: (cfg.grid[g], g))
    tasks = [(cfg, x, g, r) for g in order for r in range(cfg.replicates)]
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(_cell, tasks))
    else:
        rows = [_cell(t) for t in tasks]
    points = []
    for i, g in enumerate(order):
        reps = tuple(rows[i * cfg.replicates:(i + 1) * cfg.replicates])
        points.append(GridPoint(cfg.grid[g], reps, _mean_row(reps)))
    return SweepResult(cfg.method, METHODS[cfg.method], tuple(points))


CSV_COLUMNS = ("parameter", "cm1", "cm2", "cm3", "um", "mutual_information", "replicate")


def _fmt(v) -> str:
    if v is None:
        return ""
    if math.isinf(v):
        return "inf"
    return f"{v:.6g}"


def render_report(r: SweepResult, fmt: str = "csv") -> str:
    """CSV (one row per replicate plus a "mean" row per grid value) or JSON text."""
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for p in r.points:
            labelled = [(str(i), row) for i, row in enumerate(p.replicates)] + [("mean", p.mean)]
            for label, row in labelled:
                w.writerow([_fmt(p.parameter)] + [_fmt(getattr(row, k)) for k in METRIC_KEYS] + [label])
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "method": r.method,
            "parameter_name": r.parameter_name,
            "points": [
                {
                    "parameter": _json_val(p.parameter),
                    "replicates": [_row_json(row) for row in p.replicates],
                    "mean": _row_json(p.mean),
                }
                for p in r.points
            ],
        }
        return json.dumps(doc, indent=2) + "\n"
    raise ConfigError(f"report format must be 'csv' or 'json', got {fmt!r}")


def _json_val(v):
    if v is None:
        return None
    if math.isinf(v):
        return "inf"
    return _sig(v)


def _row_json(row: SweepRow) -> dict:
    return {k: _json_val(getattr(row, k)) for k in METRIC_KEYS}


def emit_report(r: SweepResult, fmt: str, path) -> None:
    text = render_report(r, fmt)
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot write report to {path}: {exc}") from None


def _from_json_val(v):
    if v == "inf":
        return math.inf
    return None if v is None else float(v)


def load_report_json(text: str) -> SweepResult:
    """Inverse of ``render_report(..., "json")``; values carry 6 significant digits."""
    doc = json.loads(text)

    def row(d):
        return SweepRow(**{k: _from_json_val(d.get(k)) for k in METRIC_KEYS})

    pts = tuple(
        GridPoint(_from_json_val(p["parameter"]), tuple(row(q) for q in p["replicates"]), row(p["mean"]))
        for p in doc["points"]
    )
    return SweepResult(doc["method"], doc["parameter_name"], pts)
