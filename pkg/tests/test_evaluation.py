import numpy as np
import pytest

from kema.align import AlignmentProblem, fit_ssma
from kema.dataset import DomainDataset
from kema.evaluation import (
    ErrorCurve,
    baseline_curve,
    error_curve,
    knn_classify,
    reconstruction_error,
    ridge_linear_classify,
    sweep_accuracy,
)
from kema.exceptions import DataError, DimensionMismatch, NoLabeledTraining
from kema.graphs import GraphConfig

from conftest import two_moon_domains


class TestKnn:
    def test_exact_hit(self):
        X = np.array([[0.0, 1.0, 2.0]])
        y = np.array([1, 2, 3])
        assert knn_classify(X, y, np.array([[1.0]]))[0] == 2

    def test_single_training_point(self):
        X = np.array([[0.5]])
        pred = knn_classify(X, np.array([7]), np.array([[0.0, 9.0]]))
        assert np.all(pred == 7)

    def test_matches_bruteforce(self):
        rng = np.random.default_rng(0)
        Xtr = rng.normal(size=(2, 40))
        ytr = rng.integers(1, 3, size=40)
        Xte = rng.normal(size=(2, 25))
        pred = knn_classify(Xtr, ytr, Xte)
        for j in range(25):
            d = np.sum((Xtr - Xte[:, j : j + 1]) ** 2, axis=0)
            assert pred[j] == ytr[np.argmin(d)]

    def test_k3_majority(self):
        X = np.array([[0.0, 0.1, 0.2, 5.0]])
        y = np.array([1, 1, 2, 2])
        assert knn_classify(X, y, np.array([[0.05]]), k=3)[0] == 1

    def test_k_too_large(self):
        with pytest.raises(DataError):
            knn_classify(np.zeros((1, 2)), np.array([1, 2]), np.zeros((1, 1)), k=3)

    def test_no_training(self):
        with pytest.raises(NoLabeledTraining):
            knn_classify(np.zeros((1, 0)), np.array([], dtype=int), np.zeros((1, 1)))


class TestRidge:
    def test_separable_perfect(self):
        X = np.array([[-2.0, -1.9, 2.0, 2.1]])
        y = np.array([1, 1, 2, 2])
        pred = ridge_linear_classify(X, y, X)
        assert np.array_equal(pred, y)

    def test_single_class(self):
        X = np.array([[0.0, 1.0]])
        y = np.array([3, 3])
        assert np.all(ridge_linear_classify(X, y, X) == 3)

    def test_matches_normal_equations_oracle(self):
        rng = np.random.default_rng(1)
        centers = np.array([[0.0, 4.0, 0.0], [0.0, 0.0, 4.0]])
        ytr = rng.integers(1, 4, size=90)
        Xtr = centers[:, ytr - 1] + rng.normal(size=(2, 90))
        yte = rng.integers(1, 4, size=60)
        Xte = centers[:, yte - 1] + rng.normal(size=(2, 60))
        pred = ridge_linear_classify(Xtr, ytr, Xte, ridge=1e-3)

        Xa = np.vstack([Xtr, np.ones((1, 90))])
        Y = (ytr[:, None] == np.array([1, 2, 3])[None, :]).astype(float)
        W = np.linalg.solve(Xa @ Xa.T + 1e-3 * np.eye(3), Xa @ Y)
        Ta = np.vstack([Xte, np.ones((1, 60))])
        oracle = np.array([1, 2, 3])[np.argmax(W.T @ Ta, axis=0)]
        assert np.mean(pred == oracle) >= 0.99

    def test_bad_ridge(self):
        with pytest.raises(DataError):
            ridge_linear_classify(np.zeros((1, 2)), np.array([1, 2]),
                                  np.zeros((1, 1)), ridge=0.0)

    def test_no_training(self):
        with pytest.raises(NoLabeledTraining):
            ridge_linear_classify(np.zeros((1, 0)), np.array([], dtype=int),
                                  np.zeros((1, 1)))


class TestCurves:
    def _fitted(self):
        train = two_moon_domains(seed=7)
        test = two_moon_domains(seed=8)
        # fully label the test split
        test = [
            DomainDataset(ds.features, np.where(ds.labels > 0, ds.labels,
                                                _true_classes(ds)), ds.domain_id)
            for ds in test
        ]
        model = fit_ssma(AlignmentProblem(datasets=train, graph_cfg=GraphConfig(k=4)))
        return model, train, test

    def test_error_curve_sweeps_all_features(self):
        model, train, test = self._fitted()
        curve = error_curve(model, train, test, 0)
        assert curve.feature_counts == list(range(1, model.n_features + 1))
        assert all(0.0 <= e <= 1.0 for e in curve.error_rates)
        assert curve.min_error() == min(curve.error_rates)

    def test_error_curve_max_features(self):
        model, train, test = self._fitted()
        curve = error_curve(model, train, test, 1, max_features=2)
        assert curve.feature_counts == [1, 2]

    def test_bad_max_features(self):
        model, train, test = self._fitted()
        with pytest.raises(DataError):
            error_curve(model, train, test, 0, max_features=99)

    def test_baseline_flat(self):
        _, train, test = self._fitted()
        curve = baseline_curve(train[0], test[0], max_features=4)
        assert len(set(curve.error_rates)) == 1
        assert curve.method == "baseline"

    def test_baseline_needs_labels(self):
        _, train, test = self._fitted()
        unlabeled = DomainDataset(train[0].features,
                                  np.zeros(train[0].n_samples, dtype=int), "u")
        with pytest.raises(NoLabeledTraining):
            baseline_curve(unlabeled, test[0])

    def test_sweep_accuracy_is_best_over_counts(self):
        model, train, test = self._fitted()
        acc = sweep_accuracy(model, train, test)
        per_curve = []
        for nf in range(1, model.n_features + 1):
            correct = total = 0
            for d in range(2):
                c = error_curve(model, train, test, d, max_features=nf)
                correct += (1.0 - c.error_rates[-1]) * test[d].n_samples
                total += test[d].n_samples
            per_curve.append(correct / total)
        assert np.isclose(acc, max(per_curve))

    def test_rows_iteration(self):
        curve = ErrorCurve("m", "t", [1, 2], [0.5, 0.25])
        assert list(curve.rows()) == [("m", "t", 1, 0.5), ("m", "t", 2, 0.25)]


def _true_classes(ds):
    # class by position along the latent parameter, mirroring the generator
    order = np.argsort(np.arctan2(ds.features[1], ds.features[0]))
    cls = np.ones(ds.n_samples, dtype=int)
    cls[order[ds.n_samples // 2 :]] = 2
    return cls


class TestReconstructionError:
    def test_exact_zero(self):
        X = np.arange(6.0).reshape(2, 3)
        assert reconstruction_error(X, X) == 0.0

    def test_unit_offset(self):
        X = np.zeros((3, 1))
        Y = np.array([[1.0], [0.0], [0.0]])
        assert reconstruction_error(X, Y) == 1.0

    def test_matches_naive(self):
        rng = np.random.default_rng(2)
        A = rng.normal(size=(3, 8))
        B = rng.normal(size=(3, 8))
        naive = np.mean([np.linalg.norm(A[:, j] - B[:, j]) for j in range(8)])
        assert np.isclose(reconstruction_error(A, B), naive, atol=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            reconstruction_error(np.zeros((2, 3)), np.zeros((3, 2)))
