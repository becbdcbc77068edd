"""Precision matrix estimation with a known graphical structure."""

from .errors import GraphPrecError, SubmatrixNotPD
from .estimator import (
    InferenceResult,
    PrecisionEstimate,
    estimate_column,
    estimate_precision,
    infer_linear,
    representation_residual,
    sample_covariance,
    variance_h,
)
from .structure import GraphStructure, SelectionMap, selection

__version__ = "0.1.0"
