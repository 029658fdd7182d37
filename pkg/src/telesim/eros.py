"""Similarity between variable-length multivariate time series via PCA.

Each sample is reduced to the eigendecomposition of its metric
covariance matrix, so samples with different row counts become
comparable. Two samples are then scored by the weighted sum of absolute
cosines between corresponding eigenvectors; the weights come from
aggregating the eigenvalue spectra of an entire database, which puts
every comparison in the context of the collection it belongs to. The
similarity s in [0, 1] induces the distance sqrt(2 - 2 s) in
[0, sqrt(2)].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._validation import as_data_matrix, check_aggregator, check_symmetric, check_weights
from .errors import AllConstantSample, DegenerateWeights, DimensionMismatch, NoConvergence

MAX_DISTANCE = math.sqrt(2.0)
_EIGENVALUE_CLAMP = 1e-10


@dataclass
class EigenDecomposition:
    """Right eigenvectors (orthonormal columns) and descending eigenvalues."""

    vectors: np.ndarray
    values: np.ndarray

    @property
    def n(self):
        return self.vectors.shape[0]

    def validate(self, tol=1e-8):
        """Check orthonormality, descending order and non-negativity."""
        gram = self.vectors.T @ self.vectors
        deviation = float(np.abs(gram - np.eye(self.n)).max())
        if deviation > tol:
            raise ValueError(f"eigenvector columns not orthonormal (deviation {deviation:g})")
        if (np.diff(self.values) > 0).any():
            raise ValueError("eigenvalues not sorted in descending order")
        if (self.values < -_EIGENVALUE_CLAMP).any():
            raise ValueError("negative eigenvalue beyond clamp tolerance")


def covariance(sample, ddof=1):
    """Sample covariance of the metric columns.

    Columns are mean-centered; the default 1/(m-1) normalization can be
    switched to 1/m with ddof=0. Eigenvectors are invariant under this
    uniform scaling, so distances do not depend on the choice.

    Parameters
    ----------
    sample : MtsSample or (m, n) array-like, m >= 2
    ddof : int, 0 or 1

    Returns
    -------
    (n, n) ndarray, symmetric positive semi-definite
    """
    if ddof not in (0, 1):
        raise ValueError("ddof must be 0 or 1")
    data = as_data_matrix(sample)
    cov = np.atleast_2d(np.cov(data, rowvar=False, ddof=ddof))
    return (cov + cov.T) / 2.0


def eigen(cov, symmetry_tol=1e-10):
    """Eigendecomposition of a symmetric PSD matrix, eigenvalues descending.

    Eigenvalues in [-1e-10, 0) are clamped to zero. The reconstruction
    vectors @ diag(values) @ vectors.T matches the input to 1e-8 in
    Frobenius norm.

    Raises
    ------
    NotSymmetric
        When the input deviates from symmetry by more than symmetry_tol.
    NoConvergence
        When the underlying solver gives up.
    """
    matrix = check_symmetric(cov, tol=symmetry_tol)
    try:
        values, vectors = np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    values = values[::-1].copy()
    vectors = vectors[:, ::-1].copy()
    small = (values < 0) & (values >= -_EIGENVALUE_CLAMP)
    values[small] = 0.0
    return EigenDecomposition(vectors=vectors, values=values)


def decompose(sample, ddof=1):
    """Covariance plus eigendecomposition in one step."""
    return eigen(covariance(sample, ddof=ddof))


def eigenvalue_matrix(decompositions, keys=None, normalize=True):
    """Stack per-sample eigenvalue spectra into columns of an (n, N) matrix.

    With normalize=True (the default) each column is scaled to sum to 1,
    so workloads with wildly different telemetry magnitudes contribute
    on an equal footing; normalize=False aggregates raw eigenvalues.
    A sample whose eigenvalues sum to zero is constant and carries no
    spectral signal, which raises AllConstantSample either way.
    """
    if not decompositions:
        raise ValueError("need at least one decomposition")
    S = np.column_stack([d.values for d in decompositions])
    sums = S.sum(axis=0)
    for j, total in enumerate(sums):
        if total <= 0.0:
            label, cid = keys[j] if keys is not None else (None, None)
            raise AllConstantSample(label, cid)
    if normalize:
        S = S / sums
    return S


def aggregate_weights(S, f="mean"):
    """Collapse an eigenvalue matrix into one weight per metric.

    Applies the aggregator across samples (along rows of S), then
    normalizes the result to sum to 1.
    """
    f = check_aggregator(f)
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2:
        raise ValueError("S must be 2-d (metrics x samples)")
    if f == "mean":
        raw = S.mean(axis=1)
    elif f == "max":
        raw = S.max(axis=1)
    else:
        raw = S.min(axis=1)
    total = float(raw.sum())
    if total <= 0.0:
        raise DegenerateWeights(f"aggregated weights sum to {total}, cannot normalize")
    return raw / total


def compute_weights(db, f="mean", normalize_eigenvalues=True, decompositions=None):
    """Database-wide weights plus the eigenvalue matrix they came from.

    Returns (w, S): w holds one non-negative entry per metric and sums
    to 1; column j of S holds sample j's (normalized) eigenvalues. Pass
    precomputed decompositions to avoid repeating the eigen work.
    """
    if decompositions is None:
        decompositions = [decompose(s) for s in db.samples]
    S = eigenvalue_matrix(decompositions, keys=db.keys(), normalize=normalize_eigenvalues)
    return aggregate_weights(S, f), S


def _check_pair(va, vb, w):
    if va.vectors.shape != vb.vectors.shape:
        raise DimensionMismatch(
            f"decompositions disagree: {va.vectors.shape} vs {vb.vectors.shape}")
    return check_weights(w, n_metrics=va.n)


def eros(va, vb, w):
    """Weighted sum of absolute cosines between corresponding eigenvectors.

    Returns a value in [0, 1]; 1 means the eigenvector frames coincide
    up to per-column sign.
    """
    w = _check_pair(va, vb, w)
    cosines = np.abs((va.vectors * vb.vectors).sum(axis=0))
    return min(1.0, max(0.0, float(np.dot(w, cosines))))


def eros_distance(va, vb, w):
    """Distance sqrt(2 - 2 * eros): 0 for identical inputs, at most sqrt(2)."""
    if va is vb or np.array_equal(va.vectors, vb.vectors):
        _check_pair(va, vb, w)
        return 0.0
    return math.sqrt(max(0.0, 2.0 - 2.0 * eros(va, vb, w)))


@dataclass
class DistanceMatrix:
    """Pairwise distances over an ordered list of (label, collection_id) keys."""

    keys: list[tuple[str, int]]
    values: np.ndarray

    def __post_init__(self):
        self.keys = [tuple(k) for k in self.keys]
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (len(self.keys), len(self.keys)):
            raise ValueError(
                f"matrix shape {self.values.shape} does not match {len(self.keys)} keys")

    def __len__(self):
        return len(self.keys)

    def index_of(self, key):
        try:
            return self.keys.index(tuple(key))
        except ValueError:
            raise KeyError(f"unknown sample {key!r}") from None

    def row(self, key):
        return self.values[self.index_of(key)]

    def to_delimited(self, round_digits=None):
        """Render as CSV with ``<label>__<id>`` row and column headers.

        Values use exact shortest-round-trip formatting by default; pass
        round_digits for fixed-point display (2 gives the usual
        report-table layout).
        """
        names = [f"{label}__{cid}" for label, cid in self.keys]

        def fmt(v):
            return repr(float(v)) if round_digits is None else f"{v:.{round_digits}f}"

        lines = ["," + ",".join(names)]
        for name, row in zip(names, self.values):
            lines.append(name + "," + ",".join(fmt(v) for v in row))
        return "\n".join(lines) + "\n"

    def write(self, path, round_digits=None):
        Path(path).write_text(self.to_delimited(round_digits=round_digits), encoding="utf-8")

    @classmethod
    def from_delimited(cls, text):
        lines = [line for line in text.splitlines() if line.strip()]
        if len(lines) < 2:
            raise ValueError("distance matrix text needs a header and at least one row")
        keys = []
        for name in lines[0].split(",")[1:]:
            label, sep, cid = name.rpartition("__")
            if not sep:
                raise ValueError(f"malformed sample name {name!r}")
            keys.append((label, int(cid)))
        values = np.array([[float(v) for v in line.split(",")[1:]] for line in lines[1:]])
        return cls(keys=keys, values=values)

    @classmethod
    def read(cls, path):
        return cls.from_delimited(Path(path).read_text(encoding="utf-8"))


def _pairwise(decompositions, w):
    """Symmetric distance matrix values; each unordered pair computed once."""
    n = len(decompositions)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = eros_distance(decompositions[i], decompositions[j], w)
            out[i, j] = out[j, i] = d
    return out


def distance_matrix(db, weights=None, f="mean", normalize_eigenvalues=True, ddof=1):
    """Full pairwise distance matrix for a database.

    The diagonal is exactly zero and each unordered pair is computed
    once. Weights default to compute_weights over the same database;
    caller-supplied weights must match the metric count.
    """
    db.validate()
    decompositions = [decompose(s, ddof=ddof) for s in db.samples]
    if weights is None:
        weights, _ = compute_weights(db, f=f, normalize_eigenvalues=normalize_eigenvalues,
                                     decompositions=decompositions)
    else:
        weights = check_weights(weights, n_metrics=len(db.schema))
    return DistanceMatrix(keys=db.keys(), values=_pairwise(decompositions, weights))
