"""Acceptance criteria AC1-AC9.

Each test records one PASS/FAIL line; the lines are printed in the pytest
terminal summary under "acceptance criteria".
"""
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy.stats import spearmanr

from sdcmetrics.cca import cca
from sdcmetrics.cli import main
from sdcmetrics.data import Dataset, rank_matrix
from sdcmetrics.errors import NumericError
from sdcmetrics.harness import SweepConfig, run_sweep
from sdcmetrics.metrics import cm3, evaluate, null_divergence, spectrum_divergence
from sdcmetrics.sdc import (
    DomainBounds,
    additive_noise,
    column_shuffle,
    ipso_synthesize,
    laplace_dp,
    mdav,
    multiplicative_noise,
    trivial_record_swap,
)

from conftest import correlated
from oracles import max_corr_angle_grid

SEED = 1
FUZZ_PAIRS = 1000


def record(log, ident, desc, ok, detail=""):
    log.append(f"{ident} {'PASS' if ok else 'FAIL'}: {desc}" + (f" [{detail}]" if detail else ""))
    assert ok, f"{ident}: {desc} {detail}"


# ---------------------------------------------------------------- fuzz corpus

GENERATORS = ("additive", "multiplicative", "laplace", "mdav", "ipso", "shuffle", "swap",
              "identity", "partial")


def _source(g, n, m):
    kind = g.integers(3)
    x = correlated(n, m, float(g.uniform(0, 0.95)), seed=int(g.integers(2**31))).values
    if kind == 1:
        x = np.exp(x)
    elif kind == 2:
        x = np.round(x * 2) / 2  # heavy ties
    return Dataset.from_array(x)


def _fuzz_pair(i):
    g = np.random.default_rng([2024, i])
    n = int(g.integers(8, 201))
    m = int(g.integers(2, 7))
    method = GENERATORS[i % len(GENERATORS)]
    x = _source(g, n, m)
    seed = int(g.integers(2**31))
    if method == "additive":
        y = additive_noise(x, float(g.uniform(0.01, 2)), seed)
    elif method == "multiplicative":
        y = multiplicative_noise(x, float(g.uniform(0, 0.99)), seed)
    elif method == "laplace":
        bounds = DomainBounds(x.values.min(0) - 1, x.values.max(0) + 1)
        y = laplace_dp(x, float(10 ** g.uniform(-2, 2)), bounds, seed)
    elif method == "mdav":
        y = mdav(x, int(g.integers(1, n + 1)))
    elif method == "ipso":
        try:
            y = ipso_synthesize(x, seed=seed)
        except NumericError:  # tied source can be rank deficient
            x = Dataset.from_array(correlated(n, m, 0.5, seed).values)
            y = ipso_synthesize(x, seed=seed)
    elif method == "shuffle":
        y = column_shuffle(x, seed)
    elif method == "swap":
        y = trivial_record_swap(x, seed)
    elif method == "identity":
        y = x
    else:
        shuffled = column_shuffle(x, seed).values.copy()
        keep = int(g.integers(m))
        shuffled[:, keep] = x.values[:, keep]
        y = x.with_values(shuffled)
    mapping = "absent" if method == "ipso" else "paired"
    return m, evaluate(x, y, compute_cm3=True, mapping=mapping, seed=seed)


@pytest.fixture(scope="module")
def fuzz_corpus():
    t0 = time.perf_counter()
    corpus = [_fuzz_pair(i) for i in range(FUZZ_PAIRS)]
    return corpus, time.perf_counter() - t0


def test_ac1_boundedness_fuzz(fuzz_corpus, acceptance_log):
    corpus, elapsed = fuzz_corpus
    bad = []
    for i, (m, r) in enumerate(corpus):
        vals = (r.cm1, r.cm2, r.cm3, r.um)
        if not all(0.0 <= v <= 1.0 for v in vals):
            bad.append((i, "range", vals))
        if not r.cm2 <= r.cm1:
            bad.append((i, "cm2>cm1", vals))
        if (r.cm2 == 0.0) != (r.cm1 == 0.0):
            bad.append((i, "zero-iff", vals))
    ok = not bad and elapsed < 60.0
    record(acceptance_log, "AC1", f"{FUZZ_PAIRS} fuzz pairs bounded, CM2<=CM1, CM2=0<=>CM1=0, <60 s",
           ok, f"violations={len(bad)} first={bad[:1]} elapsed={elapsed:.1f}s")


def test_ac2_exact_degenerate_cases(acceptance_log):
    worst = 0.0
    for seed in range(5):
        x = correlated(250, 4, 0.6, seed=seed)
        for d in (x, x.with_values(np.exp(x.values)), x.with_values(np.round(x.values, 1))):
            r = evaluate(d, d)
            worst = max(worst, r.cm1, r.cm2, abs(r.um - 1.0))
            worst = max(worst, cm3(d, trivial_record_swap(d, seed=seed + 100)))
    record(acceptance_log, "AC2", "evaluate(X,X): CM1=CM2=0, UM=1; CM3(X, record swap)=0 (<=1e-9)",
           worst <= 1e-9, f"max error={worst:.2e}")


def test_ac3_cca_oracle_equivalence(acceptance_log):
    worst = 0.0
    for i in range(50):
        g = np.random.default_rng([77, i])
        n = int(g.integers(30, 201))
        x = correlated(n, 2, float(g.uniform(-0.8, 0.95)), seed=int(g.integers(2**31)))
        kind = i % 3
        if kind == 0:
            y = additive_noise(x, float(g.uniform(0.05, 3)), seed=i)
        elif kind == 1:
            y = mdav(x, int(g.integers(2, max(3, n // 4))))
        else:
            y = multiplicative_noise(x.with_values(np.exp(x.values)), float(g.uniform(0, 0.95)), seed=i)
        rx, ry = rank_matrix(x), rank_matrix(y)
        rho1 = cca(rx, ry).rhos[0]
        oracle = max_corr_angle_grid(rx.ranks, ry.ranks)
        worst = max(worst, abs(rho1 - oracle))
    record(acceptance_log, "AC3", "50 m=2 instances: rho1 equals angle-grid maximum (<=1e-4)",
           worst <= 1e-4, f"max |diff|={worst:.2e}")


def test_ac4_divergence_bounds(fuzz_corpus, acceptance_log):
    corpus, _ = fuzz_corpus
    worst_p1 = worst_p2 = -np.inf
    for m, r in corpus:
        worst_p1 = max(worst_p1, spectrum_divergence(r.lambda_x_scaled, r.lambda_yx_scaled) - 2.0)
        worst_p2 = max(worst_p2, null_divergence(r.lambda_x_scaled) - (m - 1) / m)
        assert abs(r.lambda_x_scaled.sum() - 1) <= 1e-9 and abs(r.lambda_yx_scaled.sum() - 1) <= 1e-9
    ok = worst_p1 <= 1e-12 and worst_p2 <= 1e-12
    record(acceptance_log, "AC4", "spectrum divergence <= 2, null divergence <= (m-1)/m (+1e-12)",
           ok, f"max excess {worst_p1:.2e} / {worst_p2:.2e}")


def test_ac5_mutual_information_identity(fuzz_corpus, acceptance_log):
    corpus, _ = fuzz_corpus
    worst = 0.0
    checked = 0
    for _, r in corpus:
        if r.cm2 > 0:
            checked += 1
            worst = max(worst, abs(np.exp(-r.mutual_information) - r.cm2) / r.cm2)
    record(acceptance_log, "AC5", "cm2 = exp(-mutual_information) within 1e-12 relative",
           worst <= 1e-12 and checked > 0, f"checked={checked} max rel err={worst:.2e}")


def test_ac6_table1_simulated_row(acceptance_log):
    t0 = time.perf_counter()
    cfg = SweepConfig(method="ipso", grid=(0,), replicates=100, seed=SEED,
                      dataset="simulated", sim_n=1080, sim_m=4, sim_rho=0.99)
    mean = run_sweep(cfg).points[0].mean
    elapsed = time.perf_counter() - t0
    ok = mean.um >= 0.99 and mean.cm1 >= 0.98 and mean.cm2 >= 0.98 and mean.cm3 <= 0.10 and elapsed < 300
    record(acceptance_log, "AC6", "IPSO on simulated 1080x4 rho=0.99, 100 reps: UM>=0.99, CM1>=0.98, "
           "CM2>=0.98, CM3<=0.10", ok,
           f"UM={mean.um:.4f} CM1={mean.cm1:.4f} CM2={mean.cm2:.4f} CM3={mean.cm3:.4f} {elapsed:.1f}s")


def _sim_cfg(**kw):
    return SweepConfig(seed=SEED, dataset="simulated", sim_n=1080, sim_m=4, sim_rho=0.6, **kw)


def _monotone_with_one_violation(values, direction):
    steps = np.diff(values) * direction  # should be >= 0
    violations = steps[steps < 0]
    return len(violations) <= 1 and np.all(-violations <= 0.02)


def test_ac7a_mdav_trend(acceptance_log):
    grid = (2, 5, 10, 25, 50, 100)
    r = run_sweep(_sim_cfg(method="mdav", grid=grid))
    s_cm1 = spearmanr(grid, r.means("cm1")).statistic
    s_um = spearmanr(grid, r.means("um")).statistic
    record(acceptance_log, "AC7a", "MDAV sweep: spearman(k, CM1) >= 0.9 and spearman(k, UM) <= -0.9",
           s_cm1 >= 0.9 and s_um <= -0.9, f"rho_cm1={s_cm1:.3f} rho_um={s_um:.3f}")


def test_ac7b_dp_trend(acceptance_log):
    r = run_sweep(_sim_cfg(method="laplace", grid=(0.01, 0.1, 1, 10, 100), replicates=5))
    cm1, um = r.means("cm1"), r.means("um")
    ok = _monotone_with_one_violation(cm1, -1) and _monotone_with_one_violation(um, +1)
    record(acceptance_log, "AC7b", "DP sweep: CM1 non-increasing, UM non-decreasing in epsilon "
           "(one violation <= 0.02 allowed)", ok,
           f"CM1={np.round(cm1, 4).tolist()} UM={np.round(um, 4).tolist()}")


def test_ac7c_additive_vs_multiplicative(acceptance_log):
    add = run_sweep(_sim_cfg(method="additive", grid=(0.5,), replicates=5)).means("cm1")[0]
    mult = run_sweep(_sim_cfg(method="multiplicative", grid=(0.5,), replicates=5)).means("cm1")[0]
    record(acceptance_log, "AC7c", "parameter 0.5: mean CM1 additive > multiplicative",
           add > mult, f"additive={add:.4f} multiplicative={mult:.4f}")


def test_ac7d_attribute_count(acceptance_log):
    means = {}
    for cols in ((0, 1, 2, 3), (0, 1, 2), (0, 1)):
        r = run_sweep(_sim_cfg(method="laplace", grid=(1.0,), replicates=5, columns=cols))
        means[len(cols)] = r.means("cm1")[0]
    record(acceptance_log, "AC7d", "DP epsilon=1: mean CM1 for m=4 > m=3 > m=2",
           means[4] > means[3] > means[2],
           " ".join(f"m={k}:{v:.5f}" for k, v in sorted(means.items(), reverse=True)))


def test_ac8_ipso_exactness(acceptance_log):
    worst = 0.0
    for i in range(20):
        g = np.random.default_rng([88, i])
        n = int(g.integers(10, 400))
        m = int(g.integers(1, 7))
        a = g.standard_normal((m, m)) * 10 ** g.uniform(-3, 3, size=m)
        vals = g.standard_normal((n, m)) @ a + g.uniform(-1e3, 1e3, size=m)
        d = Dataset.from_array(vals)
        out = ipso_synthesize(d, n_out=int(g.integers(m + 2, 500)), seed=i)
        mu, cov = vals.mean(0), np.cov(vals, rowvar=False).reshape(m, m)
        mu2, cov2 = out.values.mean(0), np.cov(out.values, rowvar=False).reshape(m, m)
        worst = max(worst, np.max(np.abs(mu2 - mu) / np.maximum(np.abs(mu), np.sqrt(np.diag(cov)))))
        worst = max(worst, np.max(np.abs(cov2 - cov)) / np.max(np.abs(cov)))
    record(acceptance_log, "AC8", "IPSO output means/covariances equal the original's (<=1e-8 relative)",
           worst <= 1e-8, f"max rel dev={worst:.2e}")


def _cli_outputs(tmp, tag):
    orig = tmp / f"orig_{tag}.csv"
    outs = []

    def run(args, out):
        assert main(args + ["-o", str(out)]) == 0
        outs.append(out.read_bytes())

    run(["simulate", "--n", "300", "--m", "3", "--rho", "0.7", "--seed", "9"], orig)
    for method, param in (("mdav", "4"), ("laplace", "5"), ("additive", "0.5"),
                          ("multiplicative", "0.3"), ("ipso", "0"), ("swap", None), ("shuffle", None)):
        args = ["anonymize", str(orig), "-m", method, "--seed", "13"] + (["-p", param] if param else [])
        anon = tmp / f"{method}_{tag}.csv"
        run(args, anon)
        mapping = "absent" if method == "ipso" else "paired"
        run(["measure", str(orig), str(anon), "--cm3", "--mapping", mapping, "--seed", "3"],
            tmp / f"m_{method}_{tag}.json")
    cfg = tmp / "sweep.txt"
    cfg.write_text("method = laplace\ngrid = 0.1 1 10\nreplicates = 3\nsim_n = 200\nsim_m = 3\n")
    for fmt in ("csv", "json"):
        run(["sweep", str(cfg), "--format", fmt, "--seed", "21"], tmp / f"s_{tag}.{fmt}")
    proc = subprocess.run([sys.executable, "-m", "sdcmetrics.cli", "sweep", str(cfg), "--seed", "21",
                           "--jobs", "2"], capture_output=True, check=True)
    outs.append(proc.stdout)
    return outs


def test_ac9_cli_determinism(tmp_path, acceptance_log):
    first = _cli_outputs(tmp_path, "a")
    second = _cli_outputs(tmp_path, "b")
    same = sum(a == b for a, b in zip(first, second))
    record(acceptance_log, "AC9", "repeated CLI invocations with the same seed are byte-identical",
           same == len(first), f"{same}/{len(first)} outputs identical")
