"""Small dense linear algebra helpers.

Matrices are plain 2-D ``float64`` numpy arrays.  The Cholesky routine
wraps LAPACK but adds the symmetry and pivot checks the estimators rely
on: near-singular input fails loudly instead of being regularized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    EmptyMatrix,
    NonFiniteEntries,
    NotPositiveDefinite,
    NotSquare,
    NotSymmetric,
)

SYMMETRY_RTOL = 1e-10
PIVOT_RTOL = 1e-12


def as_matrix(a, *, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite 2-D float64 array (vectors become columns)."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got {arr.ndim}-D")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteEntries(f"{name} contains NaN or Inf")
    return arr


def check_symmetric(a: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Validate symmetry and return the symmetrized copy ``(a + a.T) / 2``."""
    if a.shape[0] != a.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {a.shape}")
    scale = np.max(np.abs(a)) if a.size else 0.0
    if tol is None:
        tol = SYMMETRY_RTOL * scale
    if a.size and np.max(np.abs(a - a.T)) > tol:
        raise NotSymmetric("matrix is not symmetric within tolerance")
    return 0.5 * (a + a.T)


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower-triangular factor ``lower`` with ``lower @ lower.T == a``."""

    lower: np.ndarray

    @property
    def dim(self) -> int:
        return self.lower.shape[0]


def cholesky(a, tol: float | None = None) -> CholeskyFactor:
    """Cholesky factorization of a symmetric positive definite matrix.

    Parameters
    ----------
    a : array_like, shape (d, d)
        Symmetric matrix. Symmetry is checked to ``1e-10 * max|a|``.
    tol : float, optional
        Pivot tolerance. A squared diagonal entry of the factor at or
        below ``tol`` raises. Defaults to ``1e-12 * max(diag(a))``.

    Raises
    ------
    NotSymmetric, NotPositiveDefinite
    """
    a = check_symmetric(as_matrix(a))
    d = a.shape[0]
    if d == 0:
        raise EmptyMatrix("cannot factor an empty matrix")
    if tol is None:
        tol = PIVOT_RTOL * max(float(np.max(np.diag(a))), 0.0)
    try:
        lower = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    pivots = np.diag(lower) ** 2
    if np.any(pivots <= tol) or not np.all(np.isfinite(lower)):
        k = int(np.argmin(pivots))
        raise NotPositiveDefinite(f"pivot {k} is {pivots[k]:.3e} <= {tol:.3e}")
    return CholeskyFactor(lower)


def solve_spd(factor: CholeskyFactor, b) -> np.ndarray:
    """Solve ``a x = b`` given the Cholesky factor of ``a``.

    The return value has the same dimensionality as ``b``.
    """
    b_arr = np.asarray(b, dtype=np.float64)
    if b_arr.ndim not in (1, 2) or b_arr.shape[0] != factor.dim:
        raise DimensionMismatch(
            f"factor has dim {factor.dim}, right-hand side has shape {b_arr.shape}"
        )
    return scipy.linalg.cho_solve((factor.lower, True), b_arr, check_finite=False)


def invert_spd(a) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix, exactly symmetric."""
    factor = cholesky(a)
    inv = solve_spd(factor, np.eye(factor.dim))
    return 0.5 * (inv + inv.T)


def _power_rayleigh(ata, v, rtol, max_iter):
    w = ata @ v
    if np.linalg.norm(w) <= 1e-300:
        return 0.0
    lam = float(v @ w)
    for _ in range(max_iter):
        v = w / np.linalg.norm(w)
        w = ata @ v
        new = float(v @ w)
        if abs(new - lam) <= rtol * abs(new):
            return new
        lam = new
    return lam


def spectral_norm(a, *, rtol: float = 1e-10, max_iter: int = 10_000) -> float:
    """Largest singular value by power iteration on ``a.T @ a``.

    Two deterministic starts are used: the normalized all-ones vector and
    a fixed pseudo-random vector. The all-ones vector alone is an exact
    eigenvector of many structured matrices (equicorrelation, circulant),
    where the iteration would stall on the wrong eigenvalue.
    """
    a = as_matrix(a)
    if a.size == 0:
        raise EmptyMatrix("spectral norm of an empty matrix")
    # scale to unit sup norm so a.T @ a neither underflows nor overflows
    scale = float(np.max(np.abs(a)))
    if scale == 0.0:
        return 0.0
    a = a / scale
    if a.shape[1] == 1:
        return scale * float(np.linalg.norm(a[:, 0]))
    if a.shape[0] == 1:
        return scale * float(np.linalg.norm(a[0]))
    ata = a.T @ a
    d = ata.shape[0]
    ones = np.ones(d) / np.sqrt(d)
    other = np.random.default_rng(0).standard_normal(d)
    other /= np.linalg.norm(other)
    lam = max(_power_rayleigh(ata, ones, rtol, max_iter),
              _power_rayleigh(ata, other, rtol, max_iter))
    return scale * float(np.sqrt(max(lam, 0.0)))


class Norms(NamedTuple):
    l1: float
    linf: float
    sup: float
    spectral: float


def norms(a) -> Norms:
    """Max column sum, max row sum, max entry and spectral norm of ``a``."""
    a = as_matrix(a)
    if a.size == 0:
        raise EmptyMatrix("norms of an empty matrix")
    absa = np.abs(a)
    return Norms(
        l1=float(absa.sum(axis=0).max()),
        linf=float(absa.sum(axis=1).max()),
        sup=float(absa.max()),
        spectral=spectral_norm(a),
    )


def min_eigenvalue(solve, dim: int, *, rtol: float = 1e-8,
                   max_iter: int = 10_000) -> float:
    """Smallest eigenvalue of an SPD matrix by inverse power iteration.

    ``solve(v)`` must return ``a^{-1} v``. The start vector is drawn from
    a fixed-seed generator so that it is not orthogonal to the target
    eigenvector for structured (e.g. Toeplitz) matrices.
    """
    v = np.random.default_rng(0).standard_normal(dim)
    v /= np.linalg.norm(v)
    mu = 0.0
    for _ in range(max_iter):
        w = solve(v)
        new = float(v @ w)
        v = w / np.linalg.norm(w)
        if abs(new - mu) <= rtol * abs(new):
            mu = new
            break
        mu = new
    return 1.0 / mu
