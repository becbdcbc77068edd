"""TIGER: column-wise precision estimation by square-root lasso regressions.

Structure-agnostic baseline.  Every variable is regressed on all the
others with the square-root lasso

    min_b  ||z_j - Z_{-j} b||_2 / sqrt(n) + lam * ||b||_1

on standardized data, and the coefficients are mapped back to a precision
column.  The penalty is picked from a short grid by K-fold
cross-validation on the Gaussian likelihood loss.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AllFoldsDegenerate,
    ConvergenceWarning,
    DegenerateResidual,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidConfig,
    InvalidSize,
    NotPositiveDefinite,
    TooFewRows,
    ZeroVarianceColumn,
)
from .estimator import sample_covariance
from .linalg import as_matrix, cholesky


@dataclass(frozen=True)
class TigerConfig:
    n_lambda: int = 5
    k_folds: int = 5
    cd_tol: float = 1e-7
    cd_max_iter: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.n_lambda < 2:
            raise InvalidConfig(f"n_lambda must be >= 2, got {self.n_lambda}")
        if self.k_folds < 2:
            raise InvalidConfig(f"k_folds must be >= 2, got {self.k_folds}")
        if not self.cd_tol > 0:
            raise InvalidConfig(f"cd_tol must be positive, got {self.cd_tol}")
        if self.cd_max_iter < 1:
            raise InvalidConfig(f"cd_max_iter must be >= 1, got {self.cd_max_iter}")


@dataclass
class TigerFit:
    omega_hat: np.ndarray
    chosen_lambda: float
    cv_losses: list[tuple[float, float]]
    per_column_tau: np.ndarray
    fold_losses: np.ndarray = field(repr=False, default=None)


def normalize(x):
    """Center each column and scale it to unit sample variance.

    Returns
    -------
    z : ndarray, shape (n, p)
    gamma_diag : ndarray, shape (p,)
        Sample variances (divisor ``n - 1``) of the original columns.
    """
    x = as_matrix(x, name="data")
    n = x.shape[0]
    if n < 2:
        raise TooFewRows(f"need at least 2 observations, got {n}")
    xc = x - x.mean(axis=0)
    var = np.einsum("ij,ij->j", xc, xc) / (n - 1)
    # a column that is constant up to rounding of the mean counts as constant
    scale = np.maximum(np.max(np.abs(x), axis=0), np.finfo(float).tiny)
    for j in np.flatnonzero(var <= (1e-13 * scale) ** 2):
        raise ZeroVarianceColumn(int(j))
    return xc / np.sqrt(var), var


def _sqrt_lasso_gram(gram, xty, yy, lam, tol, max_iter):
    """Coordinate descent for the square-root lasso in covariance form.

    ``gram = X'X/n``, ``xty = X'y/n``, ``yy = y'y/n``. Each coordinate step
    refreshes the noise level ``sigma = ||r|| / sqrt(n)`` and then takes the
    exact lasso step with penalty ``lam * sigma``; this is block coordinate
    descent on the jointly convex scaled-lasso objective.

    Returns ``(beta, converged)``.
    """
    d = gram.shape[0]
    beta = np.zeros(d)
    grad = xty.copy()  # X'r/n
    rss = yy  # ||r||^2/n
    if rss <= 0:
        raise DegenerateResidual("response is identically zero")
    diag = np.diag(gram)
    obj = np.sqrt(rss)
    for _ in range(max_iter):
        for k in range(d):
            a = diag[k]
            if a <= 0:
                continue
            bk = beta[k]
            rho = grad[k] + a * bk
            sigma = np.sqrt(max(rss, 0.0))
            thresh = lam * sigma
            if rho > thresh:
                new = (rho - thresh) / a
            elif rho < -thresh:
                new = (rho + thresh) / a
            else:
                new = 0.0
            delta = new - bk
            if delta != 0.0:
                # rss(b + delta e_k) = rss - 2 delta grad_k + a delta^2
                rss = rss - 2.0 * delta * grad[k] + a * delta * delta
                grad -= gram[:, k] * delta
                beta[k] = new
        rss = float(yy - 2.0 * beta @ xty + beta @ gram @ beta)
        # the Gram form loses about eps * yy to cancellation, so anything
        # this small cannot be told apart from an exact interpolant
        if rss <= 1e-14 * yy:
            raise DegenerateResidual("residual vanished; the fit interpolates the response")
        grad = xty - gram @ beta
        new_obj = np.sqrt(rss) + lam * np.abs(beta).sum()
        if obj - new_obj <= tol * abs(new_obj):
            return beta, True
        obj = new_obj
    return beta, False


def sqrt_lasso(design, response, lam: float, cfg: TigerConfig | None = None) -> np.ndarray:
    """Square-root lasso coefficients.

    Minimizes ``||response - design @ b||_2 / sqrt(n) + lam * ||b||_1`` by
    cyclic coordinate descent. Emits :class:`ConvergenceWarning` and returns
    the last iterate if ``cfg.cd_max_iter`` sweeps are not enough.
    """
    cfg = cfg or TigerConfig()
    if not lam > 0:
        raise InvalidConfig(f"lambda must be positive, got {lam}")
    x = as_matrix(design, name="design")
    y = np.asarray(response, dtype=np.float64).ravel()
    n = x.shape[0]
    if y.shape != (n,):
        raise DimensionMismatch(f"response length {y.shape[0]} != {n} design rows")
    beta, ok = _sqrt_lasso_gram(x.T @ x / n, x.T @ y / n, float(y @ y) / n,
                                lam, cfg.cd_tol, cfg.cd_max_iter)
    if not ok:
        warnings.warn(f"sqrt-lasso stopped after {cfg.cd_max_iter} sweeps",
                      ConvergenceWarning, stacklevel=2)
    return beta


def sqrt_lasso_objective(design, response, beta, lam: float) -> float:
    x = np.asarray(design, dtype=np.float64)
    r = np.asarray(response, dtype=np.float64) - x @ beta
    return float(np.linalg.norm(r) / np.sqrt(x.shape[0]) + lam * np.abs(beta).sum())


def _column_from_gram(gram, gamma_diag, j, lam, cfg):
    p = gram.shape[0]
    rest = np.r_[0:j, j + 1:p]
    beta, ok = _sqrt_lasso_gram(gram[np.ix_(rest, rest)], gram[rest, j], gram[j, j],
                                lam, cfg.cd_tol, cfg.cd_max_iter)
    if not ok:
        warnings.warn(f"sqrt-lasso for column {j} stopped after {cfg.cd_max_iter} sweeps",
                      ConvergenceWarning, stacklevel=3)
    tau2 = float(gram[j, j] - 2.0 * beta @ gram[rest, j]
                 + beta @ gram[np.ix_(rest, rest)] @ beta)
    if tau2 <= 0:
        raise DegenerateResidual(f"column {j}: residual scale is zero")
    col = np.empty(p)
    col[j] = 1.0 / (tau2 * gamma_diag[j])
    col[rest] = -beta / (tau2 * np.sqrt(gamma_diag[j] * gamma_diag[rest]))
    return col, np.sqrt(tau2)


def tiger_column(z, gamma_diag, j: int, lam: float, cfg: TigerConfig | None = None) -> np.ndarray:
    """Column ``j`` of the TIGER precision estimate from normalized data ``z``."""
    cfg = cfg or TigerConfig()
    z = as_matrix(z, name="z")
    n, p = z.shape
    gamma_diag = np.asarray(gamma_diag, dtype=np.float64)
    if gamma_diag.shape != (p,):
        raise DimensionMismatch(f"gamma_diag must have length {p}")
    if not 0 <= j < p:
        raise IndexOutOfRange(f"column {j} outside [0, {p})")
    col, _ = _column_from_gram(z.T @ z / n, gamma_diag, j, lam, cfg)
    return col


def tiger_fit(x, lam: float, cfg: TigerConfig | None = None):
    """Full TIGER estimate at one penalty. Returns ``(omega_hat, taus)``."""
    cfg = cfg or TigerConfig()
    z, gamma_diag = normalize(x)
    n, p = z.shape
    if p < 2:
        raise InvalidSize("TIGER needs at least 2 variables")
    gram = z.T @ z / n
    omega = np.empty((p, p))
    taus = np.empty(p)
    for j in range(p):
        omega[:, j], taus[j] = _column_from_gram(gram, gamma_diag, j, lam, cfg)
    return omega, taus


def lambda_grid(p: int, n: int, n_lambda: int = 5) -> np.ndarray:
    """Equally spaced penalties on ``[pi sqrt(log p / n) / 4, pi sqrt(log p / n)]``."""
    if p < 2 or n < 2:
        raise InvalidSize(f"need p >= 2 and n >= 2, got p={p}, n={n}")
    if n_lambda < 2:
        raise InvalidSize(f"need at least 2 grid points, got {n_lambda}")
    top = np.pi * np.sqrt(np.log(p) / n)
    return np.linspace(top / 4.0, top, n_lambda)


def likelihood_loss(s_test, omega) -> float:
    """``tr(S omega) - log det omega`` after symmetrizing; +inf if not PD."""
    omega = 0.5 * (omega + omega.T)
    try:
        factor = cholesky(omega)
    except NotPositiveDefinite:
        return np.inf
    logdet = 2.0 * np.sum(np.log(np.diag(factor.lower)))
    return float(np.sum(s_test * omega) - logdet)


def cross_validate(x, cfg: TigerConfig | None = None) -> TigerFit:
    """Pick the penalty by K-fold CV and refit on all the data.

    Rows are shuffled with ``cfg.seed`` and cut into contiguous folds. The
    grid is built from the full-data ``n`` and ``p`` and shared by all
    folds. Ties go to the smallest penalty.
    """
    cfg = cfg or TigerConfig()
    x = as_matrix(x, name="data")
    n, p = x.shape
    if n < 2 * cfg.k_folds:
        raise TooFewRows(f"need n >= 2 * k_folds = {2 * cfg.k_folds}, got {n}")
    grid = lambda_grid(p, n, cfg.n_lambda)
    perm = np.random.default_rng(cfg.seed).permutation(n)
    folds = np.array_split(perm, cfg.k_folds)
    losses = np.empty((cfg.n_lambda, cfg.k_folds))
    for f, test in enumerate(folds):
        train = np.setdiff1d(perm, test, assume_unique=True)
        s_test = sample_covariance(x[test])
        z, gamma_diag = normalize(x[train])
        gram = z.T @ z / z.shape[0]
        for li, lam in enumerate(grid):
            omega = np.empty((p, p))
            try:
                for j in range(p):
                    omega[:, j], _ = _column_from_gram(gram, gamma_diag, j, lam, cfg)
            except DegenerateResidual:
                losses[li, f] = np.inf
                continue
            losses[li, f] = likelihood_loss(s_test, omega)
    mean_loss = losses.mean(axis=1)
    if not np.any(np.isfinite(mean_loss)):
        raise AllFoldsDegenerate("every penalty gave an infinite held-out loss")
    best = int(np.argmin(mean_loss))  # first minimizer = smallest lambda
    omega, taus = tiger_fit(x, grid[best], cfg)
    return TigerFit(
        omega_hat=omega,
        chosen_lambda=float(grid[best]),
        cv_losses=[(float(l), float(v)) for l, v in zip(grid, mean_loss)],
        per_column_tau=taus,
        fold_losses=losses,
    )
