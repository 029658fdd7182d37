"""Scikit-learn style estimators over the similarity core.

X is panel data: a sequence of 2-d arrays, one per execution, each
shaped (time steps, metrics). Row counts may differ between samples;
the metric count may not.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.exceptions import NotFittedError

from ._validation import as_data_matrix, check_aggregator
from .eros import _pairwise, aggregate_weights, decompose, eigenvalue_matrix, eros_distance
from .errors import DimensionMismatch, KTooLarge
from .evaluation import LabelScore, plurality_label


def _check_panel(X, n_metrics=None):
    mats = [as_data_matrix(x) for x in X]
    if not mats:
        raise ValueError("X must contain at least one sample")
    widths = {m.shape[1] for m in mats}
    if len(widths) > 1:
        raise DimensionMismatch(f"samples disagree on metric count: {sorted(widths)}")
    width = widths.pop()
    if n_metrics is not None and width != n_metrics:
        raise DimensionMismatch(f"expected {n_metrics} metrics, got {width}")
    return mats


def _require_fitted(estimator, attribute):
    if not hasattr(estimator, attribute):
        raise NotFittedError(
            f"This {type(estimator).__name__} instance is not fitted yet; "
            "call fit before using this method.")


class ErosSimilarity(TransformerMixin, BaseEstimator):
    """Distance-space embedding relative to a fitted sample collection.

    fit() reduces every training execution to the eigendecomposition of
    its covariance matrix and aggregates the eigenvalue spectra into one
    weight per metric. transform() then maps executions to their
    distances against the fitted samples using the frozen weights, so
    the output drops into anything that accepts a precomputed-metric
    matrix.

    Parameters
    ----------
    aggregator : {"mean", "max", "min"}, default="mean"
        How eigenvalue spectra combine across samples into weights.
    normalize_eigenvalues : bool, default=True
        Scale each sample's eigenvalues to sum to 1 before aggregating.

    Attributes
    ----------
    weights_ : ndarray of shape (n_features_in_,)
    decompositions_ : list of EigenDecomposition, one per fitted sample
    eigenvalue_matrix_ : ndarray of shape (n_features_in_, n_samples_fit_)
    n_features_in_ : int
        Number of metric columns.
    n_samples_fit_ : int
    """

    def __init__(self, aggregator="mean", normalize_eigenvalues=True):
        self.aggregator = aggregator
        self.normalize_eigenvalues = normalize_eigenvalues

    def fit(self, X, y=None):
        check_aggregator(self.aggregator)
        mats = _check_panel(X)
        decompositions = [decompose(m) for m in mats]
        S = eigenvalue_matrix(decompositions, normalize=self.normalize_eigenvalues)
        self.weights_ = aggregate_weights(S, self.aggregator)
        self.eigenvalue_matrix_ = S
        self.decompositions_ = decompositions
        self.n_features_in_ = mats[0].shape[1]
        self.n_samples_fit_ = len(mats)
        return self

    def transform(self, X):
        """Distances from each sample in X to every fitted sample."""
        _require_fitted(self, "decompositions_")
        mats = _check_panel(X, n_metrics=self.n_features_in_)
        out = np.empty((len(mats), self.n_samples_fit_))
        for i, m in enumerate(mats):
            d = decompose(m)
            out[i] = [eros_distance(d, ref, self.weights_) for ref in self.decompositions_]
        return out

    def pairwise_distances(self):
        """Symmetric zero-diagonal distance matrix over the fitted samples."""
        _require_fitted(self, "decompositions_")
        return _pairwise(self.decompositions_, self.weights_)


class ErosKNeighborsClassifier(ClassifierMixin, BaseEstimator):
    """K-nearest-neighbor classification in the similarity distance space.

    Parameters
    ----------
    n_neighbors : int, default=1
    aggregator : {"mean", "max", "min"}, default="mean"
    normalize_eigenvalues : bool, default=True
    refit_weights : bool, default=True
        Recompute the weight vector with each query sample included, as
        if it had just been registered alongside the training samples;
        False freezes the weights learned at fit time.

    Attributes
    ----------
    classes_ : ndarray of sorted unique labels
    weights_ : ndarray, the fit-time weight vector
    n_features_in_ : int
    n_samples_fit_ : int
    """

    def __init__(self, n_neighbors=1, aggregator="mean", normalize_eigenvalues=True,
                 refit_weights=True):
        self.n_neighbors = n_neighbors
        self.aggregator = aggregator
        self.normalize_eigenvalues = normalize_eigenvalues
        self.refit_weights = refit_weights

    def fit(self, X, y):
        check_aggregator(self.aggregator)
        if self.n_neighbors < 1:
            raise ValueError("n_neighbors must be >= 1")
        mats = _check_panel(X)
        y = np.asarray(y)
        if y.shape[0] != len(mats):
            raise ValueError(f"X has {len(mats)} samples but y has {y.shape[0]} labels")
        self._decompositions = [decompose(m) for m in mats]
        self._y = y
        self.classes_ = np.unique(y)
        self.n_features_in_ = mats[0].shape[1]
        self.n_samples_fit_ = len(mats)
        self.weights_ = aggregate_weights(
            eigenvalue_matrix(self._decompositions, normalize=self.normalize_eigenvalues),
            self.aggregator)
        return self

    def _query_weights(self, query_decomposition):
        if not self.refit_weights:
            return self.weights_
        S = eigenvalue_matrix(self._decompositions + [query_decomposition],
                              normalize=self.normalize_eigenvalues)
        return aggregate_weights(S, self.aggregator)

    def kneighbors(self, X, n_neighbors=None):
        """Distances and indices of the nearest fitted samples.

        Returns (distances, indices), each of shape (len(X), k); ties in
        distance break by training index.
        """
        _require_fitted(self, "_decompositions")
        k = self.n_neighbors if n_neighbors is None else n_neighbors
        if k < 1:
            raise ValueError("n_neighbors must be >= 1")
        if k > self.n_samples_fit_:
            raise KTooLarge(f"k={k} but only {self.n_samples_fit_} fitted samples")
        mats = _check_panel(X, n_metrics=self.n_features_in_)
        distances = np.empty((len(mats), k))
        indices = np.empty((len(mats), k), dtype=int)
        for i, m in enumerate(mats):
            query = decompose(m)
            w = self._query_weights(query)
            dists = np.array([eros_distance(query, ref, w) for ref in self._decompositions])
            order = np.lexsort((np.arange(len(dists)), dists))[:k]
            indices[i] = order
            distances[i] = dists[order]
        return distances, indices

    def predict(self, X):
        """Plurality vote among the k nearest fitted samples."""
        distances, indices = self.kneighbors(X)
        out = []
        for drow, irow in zip(distances, indices):
            nearest = [((self._y[i], int(i)), float(d)) for d, i in zip(drow, irow)]
            by_label = {}
            for (label, _), dist in nearest:
                entry = by_label.setdefault(label, [dist, 0])
                entry[0] = min(entry[0], dist)
                entry[1] += 1
            scores = [LabelScore(label=label, best_distance=best, votes=votes)
                      for label, (best, votes) in by_label.items()]
            out.append(plurality_label(scores))
        return np.asarray(out)
