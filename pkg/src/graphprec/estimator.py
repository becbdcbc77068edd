"""Closed-form precision matrix estimation under a known zero pattern.

For column ``i`` with support ``B_i`` (the allowed nonzeros, including
``i`` itself), the nonzero block of the column solves

    S[B_i, B_i] @ w_i1 = f_i,

where ``f_i`` is the unit vector marking ``i`` inside ``B_i``.  With the
population covariance in place of ``S`` this recovers the true column
exactly; with the sample covariance it is a plug-in estimator that is
asymptotically normal, which :func:`infer_linear` uses for z-tests and
confidence intervals on linear functionals ``m @ w_i1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import ndtri

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InvalidLevel,
    NonPositive,
    NotPositiveDefinite,
    SubmatrixNotPD,
    TooFewRows,
)
from .linalg import as_matrix, check_symmetric, cholesky, solve_spd
from .structure import (
    GraphStructure,
    SelectionMap,
    extract_submatrix,
    scatter_column,
    selection,
)


def sample_covariance(x) -> np.ndarray:
    """Mean-centred sample covariance of the rows of ``x`` (divisor ``n - 1``)."""
    x = as_matrix(x, name="data")
    n = x.shape[0]
    if n < 2:
        raise TooFewRows(f"need at least 2 observations, got {n}")
    xc = x - x.mean(axis=0)
    s = xc.T @ xc / (n - 1)
    return 0.5 * (s + s.T)


class ColumnEstimate(NamedTuple):
    w_i1: np.ndarray
    w_i: np.ndarray
    selection: SelectionMap


def _solve_column(sub: np.ndarray, sel: SelectionMap):
    try:
        factor = cholesky(sub)
    except NotPositiveDefinite as exc:
        raise SubmatrixNotPD(sel.column, f"column {sel.column}: {exc}") from None
    return factor, solve_spd(factor, sel.indicator())


def estimate_column(s, g: GraphStructure, i: int) -> ColumnEstimate:
    """Estimate column ``i`` of the precision matrix from covariance ``s``.

    Raises
    ------
    SubmatrixNotPD
        If ``s`` restricted to the support of column ``i`` is not positive
        definite, which happens whenever the support is at least as large
        as the sample size.
    IndexOutOfRange
    """
    s = as_matrix(s, name="covariance")
    if s.shape != (g.p, g.p):
        raise DimensionMismatch(f"covariance shape {s.shape} does not match p={g.p}")
    sel = selection(g, i)
    _, w_i1 = _solve_column(extract_submatrix(s, sel), sel)
    return ColumnEstimate(w_i1, scatter_column(w_i1, sel, g.p), sel)


def estimate_column_from_data(x, g: GraphStructure, i: int) -> ColumnEstimate:
    """Same as :func:`estimate_column` but only forms the needed covariance block.

    Useful when ``p`` is large and only a few columns are wanted.
    """
    x = as_matrix(x, name="data")
    if x.shape[1] != g.p:
        raise DimensionMismatch(f"data has {x.shape[1]} columns, structure has p={g.p}")
    sel = selection(g, i)
    _, w_i1 = _solve_column(sample_covariance(x[:, sel.support]), sel)
    return ColumnEstimate(w_i1, scatter_column(w_i1, sel, g.p), sel)


@dataclass(frozen=True)
class PrecisionEstimate:
    omega_hat: np.ndarray
    structure: GraphStructure
    symmetrized: bool
    per_column_condition: tuple[float, ...]


def estimate_precision(s, g: GraphStructure, symmetrize: bool = False) -> PrecisionEstimate:
    """Assemble the full precision estimate column by column.

    Parameters
    ----------
    s : array_like, shape (p, p)
        Covariance matrix, usually from :func:`sample_covariance`.
    g : GraphStructure
        Known zero pattern.
    symmetrize : bool, default False
        Replace the estimate by ``(omega + omega.T) / 2``. The column-wise
        estimate is not symmetric in general.
    """
    s = check_symmetric(as_matrix(s, name="covariance"))
    if s.shape != (g.p, g.p):
        raise DimensionMismatch(f"covariance shape {s.shape} does not match p={g.p}")
    omega = np.zeros((g.p, g.p))
    conds = []
    for i in range(g.p):
        sel = selection(g, i)
        sub = extract_submatrix(s, sel)
        _, w_i1 = _solve_column(sub, sel)
        omega[sel.support, i] = w_i1
        ev = np.linalg.eigvalsh(sub)
        conds.append(float(ev[-1] / ev[0]))
    if symmetrize:
        omega = 0.5 * (omega + omega.T)
    return PrecisionEstimate(omega, g, bool(symmetrize), tuple(conds))


def variance_h(omega_i, m, pivot: int) -> float:
    """Variance of ``m' O Y Y' O g`` for ``Y ~ N(0, O^{-1})``.

    Closed form ``O[pivot, pivot] * m' O m + (m' O g)^2`` where ``g`` is the
    unit vector at ``pivot``. This is the asymptotic variance of
    ``sqrt(n) * m' (w_hat_i1 - w_i1)``.
    """
    omega_i = as_matrix(omega_i, name="omega_i")
    m = np.asarray(m, dtype=np.float64).ravel()
    d = omega_i.shape[0]
    if omega_i.shape != (d, d) or m.shape != (d,):
        raise DimensionMismatch(f"omega_i {omega_i.shape} and m {m.shape} disagree")
    if not 0 <= pivot < d:
        raise IndexOutOfRange(f"pivot {pivot} outside [0, {d})")
    if not np.any(m):
        raise NonPositive("m must be nonzero")
    om = omega_i @ m
    return float(omega_i[pivot, pivot] * (m @ om) + om[pivot] ** 2)


def normal_quantile(prob: float) -> float:
    return float(ndtri(prob))


@dataclass(frozen=True)
class InferenceResult:
    estimate: float
    h_hat: float
    std_error: float
    z: float
    ci_low: float
    ci_high: float
    level: float


def infer_linear(s, g: GraphStructure, i: int, m, null_value: float = 0.0,
                 level: float = 0.95, n: int | None = None) -> InferenceResult:
    """Wald inference on ``m @ w_i1`` with the plug-in asymptotic variance.

    ``m`` has one entry per support element of column ``i`` (in support
    order). ``n`` is the number of observations behind ``s``.
    """
    if not 0.0 < level < 1.0:
        raise InvalidLevel(f"level must lie in (0, 1), got {level}")
    if n is None or n < 2:
        raise TooFewRows(f"need the sample size n >= 2, got {n}")
    s = as_matrix(s, name="covariance")
    if s.shape != (g.p, g.p):
        raise DimensionMismatch(f"covariance shape {s.shape} does not match p={g.p}")
    sel = selection(g, i)
    m = np.asarray(m, dtype=np.float64).ravel()
    if m.shape != (sel.size,):
        raise DimensionMismatch(f"m must have length {sel.size}, got {m.shape[0]}")
    sub = extract_submatrix(s, sel)
    factor, w_i1 = _solve_column(sub, sel)
    omega_i = solve_spd(factor, np.eye(sel.size))
    omega_i = 0.5 * (omega_i + omega_i.T)
    est = float(m @ w_i1)
    h = variance_h(omega_i, m, sel.pivot)
    se = float(np.sqrt(h / n))
    half = normal_quantile(0.5 * (1.0 + level)) * se
    return InferenceResult(
        estimate=est,
        h_hat=h,
        std_error=se,
        z=(est - null_value) / se,
        ci_low=est - half,
        ci_high=est + half,
        level=float(level),
    )


def representation_residual(s_inv, omega, w_mat, pivot: int | None = None) -> float:
    """Sup-norm residual of the exact perturbation expansion of ``S^{-1}``.

    With ``D = S^{-1} - O`` and ``W = S - O^{-1}`` the identity
    ``D = -O W O - O W D`` holds exactly; the residual
    ``max |D + O W O + O W D|`` is evaluated on column ``pivot`` (or on all
    columns when ``pivot`` is None) and should sit at rounding level.
    """
    s_inv = as_matrix(s_inv, name="s_inv")
    omega = as_matrix(omega, name="omega")
    w_mat = as_matrix(w_mat, name="w")
    d = s_inv.shape[0]
    if any(a.shape != (d, d) for a in (s_inv, omega, w_mat)):
        raise DimensionMismatch(
            f"shapes {s_inv.shape}, {omega.shape}, {w_mat.shape} are not all {d}x{d}"
        )
    diff = s_inv - omega
    ow = omega @ w_mat
    resid = diff + ow @ omega + ow @ diff
    if pivot is not None:
        if not 0 <= pivot < d:
            raise IndexOutOfRange(f"pivot {pivot} outside [0, {d})")
        resid = resid[:, pivot]
    return float(np.max(np.abs(resid)))
