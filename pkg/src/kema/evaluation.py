"""Classifiers over latent coordinates, error-vs-feature-count curves, and
reconstruction error measurement."""

from dataclasses import dataclass

import numpy as np

from .align import project
from .exceptions import DataError, DimensionMismatch, NoLabeledTraining
from .linalg import pairwise_sq_distances


@dataclass
class ErrorCurve:
    """Classification error as a function of the number of latent features."""

    method: str
    target_domain: str
    feature_counts: list
    error_rates: list

    def min_error(self):
        return min(self.error_rates)

    def rows(self):
        for nf, err in zip(self.feature_counts, self.error_rates):
            yield (self.method, self.target_domain, nf, err)


def knn_classify(train_latent, train_labels, test_latent, k=1):
    """k-NN prediction in latent space; distance ties break toward the lower
    training index, vote ties toward the lower class label."""
    train_latent = np.asarray(train_latent, dtype=float)
    test_latent = np.asarray(test_latent, dtype=float)
    train_labels = np.asarray(train_labels, dtype=int)
    n = train_latent.shape[1]
    if n == 0:
        raise NoLabeledTraining("no labeled training points")
    if k > n:
        raise DataError(f"k={k} exceeds {n} training points")
    D = pairwise_sq_distances(train_latent, test_latent)
    # stable sort on distances: equal distances keep index order
    order = np.argsort(D, axis=0, kind="stable")[:k, :]
    votes = train_labels[order]
    if k == 1:
        return votes[0]
    preds = np.empty(votes.shape[1], dtype=int)
    for j in range(votes.shape[1]):
        vals, counts = np.unique(votes[:, j], return_counts=True)
        preds[j] = vals[np.argmax(counts)]
    return preds


def ridge_linear_classify(train_latent, train_labels, test_latent, ridge=1e-3):
    """One-hot ridge regression to class indicators with argmax decoding."""
    X = np.asarray(train_latent, dtype=float)
    y = np.asarray(train_labels, dtype=int)
    if X.shape[1] == 0:
        raise NoLabeledTraining("no labeled training points")
    if ridge <= 0:
        raise DataError("ridge must be positive")
    classes = np.unique(y)
    Y = (y[:, None] == classes[None, :]).astype(float)
    # bias row appended; kept in the penalty for simplicity
    Xa = np.vstack([X, np.ones((1, X.shape[1]))])
    G = Xa @ Xa.T + ridge * np.eye(Xa.shape[0])
    W = np.linalg.solve(G, Xa @ Y)
    Ta = np.vstack(
        [np.asarray(test_latent, dtype=float), np.ones((1, np.asarray(test_latent).shape[1]))]
    )
    scores = W.T @ Ta
    return classes[np.argmax(scores, axis=0)]


CLASSIFIERS = {
    "1nn": knn_classify,
    "ridge": ridge_linear_classify,
}


def _pooled_labeled_latent(model, train_datasets, n_features):
    feats, labels = [], []
    for d, ds in enumerate(train_datasets):
        mask = ds.labeled_mask
        if not mask.any():
            continue
        Z = project(model, d, ds.features[:, mask])[:n_features, :]
        feats.append(Z)
        labels.append(ds.labels[mask])
    if not feats:
        raise NoLabeledTraining("no labeled samples in any domain")
    return np.hstack(feats), np.concatenate(labels)


def error_curve(
    model,
    train_datasets,
    test_datasets,
    target_domain,
    classifier="ridge",
    max_features=None,
    method=None,
):
    """Test error on one target domain for latent dimensions 1..max_features.

    The classifier is trained on the pooled labeled projections of all
    domains; test samples must carry ground-truth labels.
    """
    clf = CLASSIFIERS[classifier] if isinstance(classifier, str) else classifier
    t = model.domain_index(target_domain)
    if max_features is None:
        max_features = model.n_features
    if not (1 <= max_features <= model.n_features):
        raise DataError(f"max_features must be in 1..{model.n_features}")
    test = test_datasets[t]
    Zt_full = project(model, t, test.features)
    counts, errors = [], []
    for nf in range(1, max_features + 1):
        Ztr, ytr = _pooled_labeled_latent(model, train_datasets, nf)
        pred = clf(Ztr, ytr, Zt_full[:nf, :])
        errors.append(float(np.mean(pred != test.labels)))
        counts.append(nf)
    return ErrorCurve(
        method=method or model.mode,
        target_domain=test.domain_id,
        feature_counts=counts,
        error_rates=errors,
    )


def baseline_curve(train_dataset, test_dataset, classifier="ridge", max_features=None):
    """No-alignment reference: classify target-domain test data with a
    classifier trained on the target domain's own labeled samples in input
    space. Constant in the feature count; emitted as a flat curve."""
    clf = CLASSIFIERS[classifier] if isinstance(classifier, str) else classifier
    mask = train_dataset.labeled_mask
    if not mask.any():
        raise NoLabeledTraining("target domain has no labeled samples")
    pred = clf(
        train_dataset.features[:, mask],
        train_dataset.labels[mask],
        test_dataset.features,
    )
    err = float(np.mean(pred != test_dataset.labels))
    n = max_features or 1
    return ErrorCurve(
        method="baseline",
        target_domain=test_dataset.domain_id,
        feature_counts=list(range(1, n + 1)),
        error_rates=[err] * n,
    )


def sweep_accuracy(model, train_datasets, test_datasets, classifier="ridge", max_features=None):
    """Best accuracy over the feature sweep, pooled over all domains' tests."""
    if max_features is None:
        max_features = model.n_features
    best = 0.0
    for nf in range(1, max_features + 1):
        Ztr, ytr = _pooled_labeled_latent(model, train_datasets, nf)
        clf = CLASSIFIERS[classifier] if isinstance(classifier, str) else classifier
        correct = 0
        total = 0
        for d, test in enumerate(test_datasets):
            Zt = project(model, d, test.features)[:nf, :]
            pred = clf(Ztr, ytr, Zt)
            correct += int(np.sum(pred == test.labels))
            total += test.n_samples
        best = max(best, correct / total)
    return best


def reconstruction_error(X_true, X_rec):
    """Mean over samples of the Euclidean norm of the per-sample difference."""
    X_true = np.asarray(X_true, dtype=float)
    X_rec = np.asarray(X_rec, dtype=float)
    if X_true.shape != X_rec.shape:
        raise DimensionMismatch(
            f"shape mismatch: {X_true.shape} vs {X_rec.shape}"
        )
    return float(np.mean(np.linalg.norm(X_true - X_rec, axis=0)))
