"""Input validation helpers for matrices, weights and aggregators."""

import numpy as np

from .errors import DimensionMismatch, NotSymmetric, TooFewRows

AGGREGATORS = ("mean", "max", "min")


def as_data_matrix(sample):
    """Coerce a sample or array-like to a finite (m, n) float64 matrix, m >= 2."""
    data = getattr(sample, "data", sample)
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError("expected a 2-d matrix of shape (time steps, metrics)")
    if data.shape[0] < 2:
        raise TooFewRows(f"need at least 2 time steps, got {data.shape[0]}")
    if not np.isfinite(data).all():
        raise ValueError("data contains NaN or infinite entries")
    return data


def check_weights(w, n_metrics=None, tol=1e-12):
    """Validate a weight vector: non-negative entries summing to 1."""
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 1:
        raise ValueError("weights must be a 1-d vector")
    if n_metrics is not None and w.shape[0] != n_metrics:
        raise DimensionMismatch(f"{w.shape[0]} weights for {n_metrics} metrics")
    if (w < 0).any():
        raise ValueError("weights must be non-negative")
    total = float(w.sum())
    if abs(total - 1.0) > tol:
        raise ValueError(f"weights must sum to 1, got {total!r}")
    return w


def check_symmetric(matrix, tol=1e-10):
    """Validate a square symmetric matrix within tol, elementwise."""
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("matrix contains NaN or infinite entries")
    deviation = float(np.abs(a - a.T).max())
    if deviation > tol:
        raise NotSymmetric(f"asymmetry {deviation:g} exceeds tolerance {tol:g}")
    return a


def check_aggregator(f):
    if f not in AGGREGATORS:
        raise ValueError(f"aggregator must be one of {AGGREGATORS}, got {f!r}")
    return f
