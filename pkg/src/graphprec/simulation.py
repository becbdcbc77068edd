"""Monte Carlo studies: banded ground truth, Gaussian sampling, bias tables.

Replication seeds are derived from the master seed and the scenario
coordinates through :class:`numpy.random.SeedSequence`, so any single
replication can be rerun in isolation and replications may run in any
order (or in parallel) without changing the aggregated numbers.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse

from .errors import (
    GraphPrecError,
    InvalidConfig,
    LengthMismatch,
    NotPositiveDefinite,
    ZeroTrueComponent,
)
from .estimator import (
    estimate_column_from_data,
    estimate_precision,
    infer_linear,
    sample_covariance,
)
from .io import format_float
from .linalg import cholesky, invert_spd, min_eigenvalue, spectral_norm
from .structure import GraphStructure, selection
from .tiger import TigerConfig, cross_validate

METHODS = ("proposed", "tiger")
_TAGS = {"data": 0, "proposed": 1, "tiger": 2, "normality": 3}


def derive_seed(master: int, *key) -> np.random.SeedSequence:
    """Stable per-job seed from the master seed and integer/float/str keys."""
    words = [int(master)]
    for k in key:
        if isinstance(k, str):
            words.append(_TAGS[k])
        elif isinstance(k, float):
            words.append(int(round(k * 1_000_000)))
        else:
            words.append(int(k))
    return np.random.SeedSequence(words)


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(int(seed))
    return np.random.Generator(np.random.PCG64(seed))


# --------------------------------------------------------------------------
# ground truth


@dataclass
class GroundTruth:
    """Banded precision matrix ``omega[i, j] = rho**|i-j|`` for ``|i-j| < s0``.

    Dense ``omega`` and ``sigma`` are built lazily, since only the band is
    needed for sampling and for the first-column truth.
    """

    p: int
    s0: int
    rho: float
    structure: GraphStructure
    min_eig: float
    max_eig: float
    upper_band: np.ndarray = field(repr=False)  # Omega = U'U in LAPACK upper band form

    @cached_property
    def omega(self) -> np.ndarray:
        k = np.abs(np.subtract.outer(np.arange(self.p), np.arange(self.p)))
        return np.where(k < self.s0, self.rho ** k, 0.0)

    @cached_property
    def sigma(self) -> np.ndarray:
        return invert_spd(self.omega)

    @property
    def sigma_l1(self) -> float:
        return float(np.abs(self.sigma).sum(axis=0).max())

    def column(self, i: int) -> np.ndarray:
        """Nonzero entries of column ``i`` in support order."""
        sup = self.structure.supports[i]
        return self.rho ** np.abs(sup - i).astype(float)


def make_ground_truth(p: int, s0: int, rho: float = 0.6) -> GroundTruth:
    """Banded Toeplitz precision matrix and its diagnostics.

    Raises
    ------
    NotPositiveDefinite
        When the truncated band is not positive definite for this
        ``(rho, s0)``. The matrix is never patched.
    """
    if not 1 <= s0 <= p:
        raise InvalidConfig(f"need 1 <= s0 <= p, got s0={s0}, p={p}")
    if not abs(rho) < 1:
        raise InvalidConfig(f"need |rho| < 1, got {rho}")
    bw = s0 - 1
    band = np.zeros((bw + 1, p))
    for k in range(bw + 1):
        band[bw - k, k:] = rho ** k
    try:
        upper = scipy.linalg.cholesky_banded(band, lower=False)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(
            f"banded precision with rho={rho}, s0={s0}, p={p} is not positive definite"
        ) from None
    if np.any(upper[bw] <= 0):
        raise NotPositiveDefinite("banded Cholesky produced a non-positive pivot")
    offsets = list(range(-bw, bw + 1))
    diags = [np.full(p - abs(k), rho ** abs(k)) for k in offsets]
    omega_sparse = scipy.sparse.diags(diags, offsets, format="csr")
    max_eig = _power_max_eig(omega_sparse, p)
    min_eig = min_eigenvalue(
        lambda v: scipy.linalg.cho_solve_banded((upper, False), v), p
    )
    return GroundTruth(
        p=p, s0=s0, rho=float(rho),
        structure=GraphStructure.banded(p, s0),
        min_eig=float(min_eig), max_eig=float(max_eig),
        upper_band=upper,
    )


def _power_max_eig(a, dim, rtol=1e-8, max_iter=10_000):
    v = np.ones(dim) / np.sqrt(dim)
    lam = 0.0
    for _ in range(max_iter):
        w = a @ v
        new = float(v @ w)
        v = w / np.linalg.norm(w)
        if abs(new - lam) <= rtol * abs(new):
            return new
        lam = new
    return lam


# --------------------------------------------------------------------------
# sampling


def sample_mvn(sigma, n: int, seed) -> np.ndarray:
    """``n`` rows from ``N(0, sigma)`` as ``u @ L.T`` with ``L = chol(sigma)``."""
    factor = cholesky(sigma)
    p = factor.dim
    u = rng_from(seed).standard_normal((n, p))
    return u @ factor.lower.T


def sample_from_truth(gt: GroundTruth, n: int, seed) -> np.ndarray:
    """``n`` rows from ``N(0, gt.sigma)`` without forming ``sigma``.

    Solves ``U x = u`` with the banded factor ``omega = U'U``, which gives
    ``cov(x) = (U'U)^{-1}`` at ``O(n p s0)`` cost.
    """
    u = rng_from(seed).standard_normal((n, gt.p))
    if n == 0:
        return u
    bw = gt.s0 - 1
    return scipy.linalg.solve_banded((0, bw), gt.upper_band, u.T, check_finite=False).T


# --------------------------------------------------------------------------
# metrics and study engine


class BiasMetrics(NamedTuple):
    rel_bias: float
    abs_bias: float


def bias_metrics(w_hat, w_true) -> BiasMetrics:
    """Mean relative and mean absolute componentwise error."""
    w_hat = np.asarray(w_hat, dtype=np.float64).ravel()
    w_true = np.asarray(w_true, dtype=np.float64).ravel()
    if w_hat.shape != w_true.shape:
        raise LengthMismatch(f"lengths {w_hat.size} and {w_true.size} differ")
    if np.any(w_true == 0):
        raise ZeroTrueComponent("true vector has a zero component")
    err = np.abs(w_hat - w_true)
    return BiasMetrics(float(np.mean(err / np.abs(w_true))), float(np.mean(err)))


def dimension_for(n: int, ratio: float) -> int:
    """``p = round(ratio * n)`` with halves rounded up."""
    return int(math.floor(ratio * n + 0.5))


@dataclass(frozen=True)
class StudyConfig:
    n_list: tuple[int, ...] = (100, 300, 500)
    ratio_list: tuple[float, ...] = (0.1, 0.5, 1.0, 5.0, 10.0)
    s0: int = 4
    rho: float = 0.6
    replications: int = 300
    seed: int = 42
    methods: tuple[str, ...] = ("proposed",)
    k_folds: int = 5
    n_lambda: int = 5
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "ratio_list", tuple(float(r) for r in self.ratio_list))
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.replications < 2:
            raise InvalidConfig(f"replications must be >= 2, got {self.replications}")
        if not self.n_list or not self.ratio_list:
            raise InvalidConfig("n_list and ratio_list must be non-empty")
        if not self.methods or any(m not in METHODS for m in self.methods):
            raise InvalidConfig(f"methods must be a non-empty subset of {METHODS}")
        if len(set(self.methods)) != len(self.methods):
            raise InvalidConfig("duplicate method")
        if self.s0 < 1:
            raise InvalidConfig("s0 must be >= 1")
        for n in self.n_list:
            if n < 2:
                raise InvalidConfig(f"sample size {n} < 2")
            for r in self.ratio_list:
                p = dimension_for(n, r)
                if p < self.s0:
                    raise InvalidConfig(
                        f"n={n}, ratio={r} gives p={p} < s0={self.s0}"
                    )
                if "tiger" in self.methods and p < 2:
                    raise InvalidConfig(f"n={n}, ratio={r} gives p={p}; TIGER needs p >= 2")
        if self.threads < 1:
            raise InvalidConfig("threads must be >= 1")


@dataclass(frozen=True)
class StudyRow:
    n: int
    ratio: float
    p: int
    method: str
    rel_bias_mean: float
    rel_bias_sd: float
    abs_bias_mean: float
    abs_bias_sd: float
    failures: int
    component_means: np.ndarray
    component_sds: np.ndarray


@dataclass
class StudyResult:
    rows: list[StudyRow]
    s0: int

    def row(self, n: int, ratio: float, method: str) -> StudyRow:
        for r in self.rows:
            if r.n == n and math.isclose(r.ratio, ratio) and r.method == method:
                return r
        raise KeyError((n, ratio, method))

    def to_csv(self) -> str:
        header = ["n", "ratio", "method", "rel_bias_mean", "rel_bias_sd",
                  "abs_bias_mean", "abs_bias_sd", "failures"]
        header += [f"comp_mean_{k + 1}" for k in range(self.s0)]
        header += [f"comp_sd_{k + 1}" for k in range(self.s0)]
        lines = [",".join(header)]
        for r in self.rows:
            cells = [str(r.n), format_float(r.ratio), r.method]
            cells += [format_float(v) for v in (r.rel_bias_mean, r.rel_bias_sd,
                                                r.abs_bias_mean, r.abs_bias_sd)]
            cells.append(str(r.failures))
            cells += [format_float(v) for v in r.component_means]
            cells += [format_float(v) for v in r.component_sds]
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def to_table(self) -> str:
        """Aligned text table with ``mean (sd)`` cells, two decimals."""
        def cell(m, s):
            return f"{m:.2f} ({s:.2f})"

        header = ["n", "p/n", "method", "RelBias", "AbsBias"]
        header += [f"w1_{k + 1}" for k in range(self.s0)]
        body = []
        for r in self.rows:
            line = [str(r.n), f"{r.ratio:g}", r.method,
                    cell(r.rel_bias_mean, r.rel_bias_sd),
                    cell(r.abs_bias_mean, r.abs_bias_sd)]
            line += [cell(m, s) for m, s in zip(r.component_means, r.component_sds)]
            body.append(line)
        widths = [max(len(row[c]) for row in [header] + body) for c in range(len(header))]
        out = []
        for k, row in enumerate([header] + body):
            out.append("  ".join(v.rjust(w) for v, w in zip(row, widths)))
            if k == 0:
                out.append("  ".join("-" * w for w in widths))
        return "\n".join(out) + "\n"


def _first_column(method, x, gt, tiger_cfg):
    if method == "proposed":
        return estimate_column_from_data(x, gt.structure, 0).w_i1
    fit = cross_validate(x, tiger_cfg)
    return fit.omega_hat[gt.structure.supports[0], 0]


def _replicate(cfg: StudyConfig, n: int, ratio: float, gt: GroundTruth, r: int):
    x = sample_from_truth(gt, n, derive_seed(cfg.seed, n, ratio, "data", r))
    out = {}
    for method in cfg.methods:
        tiger_cfg = None
        if method == "tiger":
            fold_seed = derive_seed(cfg.seed, n, ratio, "tiger", r).generate_state(1)[0]
            tiger_cfg = TigerConfig(n_lambda=cfg.n_lambda, k_folds=cfg.k_folds,
                                    seed=int(fold_seed))
        try:
            out[method] = _first_column(method, x, gt, tiger_cfg)
        except GraphPrecError:
            out[method] = None
    return out


def _summarize(n, ratio, p, method, estimates, w_true):
    ok = [w for w in estimates if w is not None]
    failures = len(estimates) - len(ok)
    nan = np.full(len(w_true), math.nan)
    if not ok:
        return StudyRow(n, ratio, p, method, math.nan, math.nan, math.nan, math.nan,
                        failures, nan, nan.copy())
    est = np.vstack(ok)
    metrics = np.array([bias_metrics(w, w_true) for w in ok])

    def sd(a, axis=None):
        return a.std(axis=axis, ddof=1) if len(ok) > 1 else np.full(np.shape(a.mean(axis=axis)), math.nan)

    return StudyRow(n, ratio, p, method,
                    float(metrics[:, 0].mean()), float(sd(metrics[:, 0])),
                    float(metrics[:, 1].mean()), float(sd(metrics[:, 1])),
                    failures, est.mean(axis=0), sd(est, axis=0))


def run_study(cfg: StudyConfig) -> StudyResult:
    """Bias study of the first precision column for each (n, ratio, method).

    All methods see the same simulated datasets (paired design). A
    replication that fails numerically is dropped and counted in
    ``failures``. Standard deviations use divisor ``R - 1``.
    """
    rows = []
    for n, ratio in itertools.product(cfg.n_list, cfg.ratio_list):
        p = dimension_for(n, ratio)
        gt = make_ground_truth(p, cfg.s0, cfg.rho)
        w_true = gt.column(0)
        jobs = range(cfg.replications)
        if cfg.threads > 1:
            with ThreadPoolExecutor(cfg.threads) as pool:
                results = list(pool.map(lambda r: _replicate(cfg, n, ratio, gt, r), jobs))
        else:
            results = [_replicate(cfg, n, ratio, gt, r) for r in jobs]
        for method in cfg.methods:
            rows.append(_summarize(n, ratio, p, method, [res[method] for res in results], w_true))
    return StudyResult(rows, cfg.s0)


# --------------------------------------------------------------------------
# inference checks


@dataclass(frozen=True)
class NormalityResult:
    z_samples: np.ndarray
    mean: float
    variance: float
    coverage95: float
    covered: np.ndarray = field(repr=False, default=None)


def normality_study(gt: GroundTruth, n: int, m=None, i: int = 0,
                    replications: int = 2000, seed: int = 42,
                    level: float = 0.95) -> NormalityResult:
    """Sampling distribution of the studentized linear functional ``m @ w_i1``.

    ``m`` defaults to the indicator of ``i`` within its support, i.e. the
    diagonal entry ``omega[i, i]``. The reported coverage is that of the
    ``level`` interval (95% by default).
    """
    sel = selection(gt.structure, i)
    m = sel.indicator() if m is None else np.asarray(m, dtype=np.float64).ravel()
    if m.shape != (sel.size,):
        raise LengthMismatch(f"m must have length {sel.size}, got {m.size}")
    truth = float(m @ gt.column(i))
    z = np.empty(replications)
    covered = np.zeros(replications, dtype=bool)
    for r in range(replications):
        x = sample_from_truth(gt, n, derive_seed(seed, n, "normality", i, r))
        res = infer_linear(sample_covariance(x), gt.structure, i, m,
                           null_value=truth, level=level, n=n)
        z[r] = res.z
        covered[r] = res.ci_low <= truth <= res.ci_high
    if replications == 0:
        return NormalityResult(z, math.nan, math.nan, math.nan, covered)
    var = float(z.var(ddof=1)) if replications > 1 else math.nan
    return NormalityResult(z, float(z.mean()), var, float(covered.mean()), covered)


def error_ladder(gt: GroundTruth, n_list: Sequence[int], seeds: int, i: int = 0,
                 master_seed: int = 0):
    """Median column-``i`` L2 error and median entrywise sup error per ``n``.

    Returns two arrays aligned with ``n_list``.
    """
    w_true = gt.column(i)
    omega = gt.omega
    col_med, sup_med = [], []
    for n in n_list:
        col_err, sup_err = [], []
        for r in range(seeds):
            x = sample_from_truth(gt, n, derive_seed(master_seed, n, "data", r))
            est = estimate_precision(sample_covariance(x), gt.structure)
            sup = gt.structure.supports[i]
            col_err.append(np.linalg.norm(est.omega_hat[sup, i] - w_true))
            sup_err.append(np.max(np.abs(est.omega_hat - omega)))
        col_med.append(float(np.median(col_err)))
        sup_med.append(float(np.median(sup_err)))
    return np.array(col_med), np.array(sup_med)


def monte_carlo_variance(omega_i, m, pivot: int, draws: int, seed,
                         batch: int = 250_000) -> float:
    """Brute-force variance of ``m' O Y Y' O g`` with ``Y ~ N(0, O^{-1})``.

    An oracle for the closed form in :func:`graphprec.estimator.variance_h`.
    """
    omega_i = np.asarray(omega_i, dtype=np.float64)
    m = np.asarray(m, dtype=np.float64)
    d = omega_i.shape[0]
    cov = np.linalg.inv(omega_i)
    root = np.linalg.cholesky(0.5 * (cov + cov.T))
    a = omega_i @ m
    b = omega_i[:, pivot]
    rng = rng_from(seed)
    total = total_sq = 0.0
    done = 0
    while done < draws:
        k = min(batch, draws - done)
        y = rng.standard_normal((k, d)) @ root.T
        q = (y @ a) * (y @ b)
        total += q.sum()
        total_sq += (q * q).sum()
        done += k
    mean = total / draws
    return float((total_sq - draws * mean * mean) / (draws - 1))


class PerturbationCheck(NamedTuple):
    lhs: float
    rhs: float
    contraction: float


def perturbation_bound(sigma_i, s_i) -> PerturbationCheck:
    """Both sides of the inverse-perturbation inequality in spectral norm.

    ``lhs = ||S^{-1} - Sigma^{-1}||`` and ``rhs = ||Sigma^{-1}|| q / (1 - q)``
    with ``q = ||Sigma^{-1} (S - Sigma)||``. The bound is only claimed
    when ``q < 1``; ``rhs`` is ``inf`` otherwise.
    """
    inv = invert_spd(sigma_i)
    q = spectral_norm(inv @ (np.asarray(s_i) - np.asarray(sigma_i)))
    lhs = spectral_norm(invert_spd(s_i) - inv)
    rhs = spectral_norm(inv) * q / (1.0 - q) if q < 1 else math.inf
    return PerturbationCheck(lhs, rhs, q)
