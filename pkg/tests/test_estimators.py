"""Estimator API tests: sklearn conventions, shapes, prediction quality."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from telesim.errors import DimensionMismatch, KTooLarge
from telesim.estimators import ErosKNeighborsClassifier, ErosSimilarity


def panel(rng, n_labels=3, per_label=3, n_metrics=4, strong=10.0, noise=0.1):
    X, y = [], []
    for j in range(n_labels):
        direction = np.zeros(n_metrics)
        direction[j] = 1.0
        for _ in range(per_label):
            m = int(rng.integers(30, 50))
            drive = rng.normal(size=(m, 1))
            X.append(drive * direction * strong + rng.normal(scale=noise, size=(m, n_metrics)))
            y.append(f"W{j}")
    return X, np.asarray(y)


class TestErosSimilarity:
    def test_get_params_and_clone(self):
        est = ErosSimilarity(aggregator="max", normalize_eigenvalues=False)
        assert est.get_params() == {"aggregator": "max", "normalize_eigenvalues": False}
        cloned = clone(est)
        assert cloned.get_params() == est.get_params()

    def test_set_params(self):
        est = ErosSimilarity().set_params(aggregator="min")
        assert est.aggregator == "min"

    def test_not_fitted(self, rng):
        with pytest.raises(NotFittedError):
            ErosSimilarity().transform([rng.normal(size=(10, 3))])

    def test_fit_attributes(self, rng):
        X, _ = panel(rng)
        est = ErosSimilarity().fit(X)
        assert est.n_features_in_ == 4
        assert est.n_samples_fit_ == len(X)
        assert est.weights_.shape == (4,)
        assert abs(est.weights_.sum() - 1.0) <= 1e-12
        assert est.eigenvalue_matrix_.shape == (4, len(X))

    def test_transform_shape_and_self_distance(self, rng):
        X, _ = panel(rng)
        est = ErosSimilarity().fit(X)
        out = est.transform(X)
        assert out.shape == (len(X), len(X))
        assert np.allclose(np.diagonal(out), 0.0)

    def test_fit_transform(self, rng):
        X, _ = panel(rng)
        out = ErosSimilarity().fit_transform(X)
        assert out.shape == (len(X), len(X))

    def test_pairwise_distances(self, rng):
        X, _ = panel(rng)
        est = ErosSimilarity().fit(X)
        dm = est.pairwise_distances()
        assert np.array_equal(dm, dm.T)
        assert (np.diagonal(dm) == 0.0).all()

    def test_width_mismatch(self, rng):
        X, _ = panel(rng)
        est = ErosSimilarity().fit(X)
        with pytest.raises(DimensionMismatch):
            est.transform([rng.normal(size=(10, 7))])

    def test_ragged_training_panel_rejected(self, rng):
        with pytest.raises(DimensionMismatch):
            ErosSimilarity().fit([rng.normal(size=(10, 3)), rng.normal(size=(10, 4))])


class TestErosKNeighborsClassifier:
    def test_get_params_defaults(self):
        est = ErosKNeighborsClassifier()
        assert est.get_params() == {
            "n_neighbors": 1,
            "aggregator": "mean",
            "normalize_eigenvalues": True,
            "refit_weights": True,
        }

    def test_training_samples_recovered(self, rng):
        X, y = panel(rng)
        est = ErosKNeighborsClassifier(n_neighbors=1).fit(X, y)
        assert (est.predict(X) == y).all()

    def test_holdout_classification(self, rng):
        X, y = panel(rng, per_label=4)
        holdout_X, holdout_y = panel(np.random.default_rng(777), per_label=1)
        est = ErosKNeighborsClassifier(n_neighbors=3).fit(X, y)
        assert (est.predict(holdout_X) == holdout_y).all()

    def test_score(self, rng):
        X, y = panel(rng)
        est = ErosKNeighborsClassifier(n_neighbors=1).fit(X, y)
        assert est.score(X, y) == 1.0

    def test_classes_sorted(self, rng):
        X, y = panel(rng)
        est = ErosKNeighborsClassifier().fit(X, y)
        assert est.classes_.tolist() == sorted(set(y))

    def test_kneighbors_sorted(self, rng):
        X, y = panel(rng)
        est = ErosKNeighborsClassifier(n_neighbors=4).fit(X, y)
        dist, idx = est.kneighbors([X[0]])
        assert dist.shape == idx.shape == (1, 4)
        assert (np.diff(dist[0]) >= 0).all()
        assert idx[0][0] == 0  # identical sample is its own nearest neighbor

    def test_k_too_large(self, rng):
        X, y = panel(rng)
        est = ErosKNeighborsClassifier(n_neighbors=len(X) + 1)
        est.fit(X, y)
        with pytest.raises(KTooLarge):
            est.predict([X[0]])

    def test_frozen_weights_variant(self, rng):
        X, y = panel(rng)
        est = ErosKNeighborsClassifier(n_neighbors=1, refit_weights=False).fit(X, y)
        assert (est.predict(X) == y).all()

    def test_not_fitted(self, rng):
        with pytest.raises(NotFittedError):
            ErosKNeighborsClassifier().predict([rng.normal(size=(10, 3))])

    def test_label_length_mismatch(self, rng):
        X, y = panel(rng)
        with pytest.raises(ValueError):
            ErosKNeighborsClassifier().fit(X, y[:-1])
