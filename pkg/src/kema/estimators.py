"""Scikit-learn style estimator wrappers around the functional fit API.

The estimators take a list of DomainDataset at fit time (domains may differ in
dimensionality, so there is no single X matrix); transform/projection then
works per domain, including out-of-sample points.
"""

import numpy as np
from sklearn.base import BaseEstimator

from .align import (
    AlignmentProblem,
    choose_representatives,
    fit_kema,
    fit_rekema,
    fit_ssma,
    invert,
    project,
)
from .graphs import GraphConfig


class BaseAligner(BaseEstimator):
    """Shared fit/transform plumbing for the three alignment variants."""

    def __init__(self, mu=1.0, n_components=None, n_neighbors=21,
                 graph_weighting="binary", eig_reg=1e-8):
        self.mu = mu
        self.n_components = n_components
        self.n_neighbors = n_neighbors
        self.graph_weighting = graph_weighting
        self.eig_reg = eig_reg

    def _problem(self, datasets, kernels=None):
        return AlignmentProblem(
            datasets=list(datasets),
            kernels=kernels,
            graph_cfg=GraphConfig(k=self.n_neighbors, weighting=self.graph_weighting),
            mu=self.mu,
            num_features=self.n_components,
            eig_reg=self.eig_reg,
        )

    def fit(self, datasets, y=None):
        self.model_ = self._fit(list(datasets))
        self.eigenvalues_ = self.model_.eigenvalues
        return self

    def transform(self, X, domain=0):
        """Latent coordinates (m x n) of samples from the given domain."""
        return project(self.model_, domain, np.asarray(X, dtype=float))

    def fit_transform(self, datasets, y=None):
        self.fit(datasets)
        return [
            self.transform(ds.features, domain=d) for d, ds in enumerate(datasets)
        ]

    def map_between(self, X, source, target):
        """Map samples from one domain into another domain's feature space."""
        return invert(self.model_, source, target, np.asarray(X, dtype=float))


class SSMA(BaseAligner):
    """Linear (primal) semi-supervised manifold alignment."""

    def _fit(self, datasets):
        return fit_ssma(self._problem(datasets))


class KEMA(BaseAligner):
    """Kernelized manifold alignment; ``kernels`` is a spec string like
    "rbf:auto", a KernelSpec, or one per domain."""

    def __init__(self, kernels="linear", mu=1.0, n_components=None,
                 n_neighbors=21, graph_weighting="binary", eig_reg=1e-8):
        super().__init__(mu=mu, n_components=n_components, n_neighbors=n_neighbors,
                         graph_weighting=graph_weighting, eig_reg=eig_reg)
        self.kernels = kernels

    def _fit(self, datasets):
        return fit_kema(self._problem(datasets, kernels=self.kernels))


class REKEMA(KEMA):
    """Reduced-rank KEMA over per-domain representative subsets."""

    def __init__(self, kernels="linear", rank_fraction=0.1, representatives=None,
                 random_state=0, mu=1.0, n_components=None, n_neighbors=21,
                 graph_weighting="binary", eig_reg=1e-8):
        super().__init__(kernels=kernels, mu=mu, n_components=n_components,
                         n_neighbors=n_neighbors, graph_weighting=graph_weighting,
                         eig_reg=eig_reg)
        self.rank_fraction = rank_fraction
        self.representatives = representatives
        self.random_state = random_state

    def _fit(self, datasets):
        reps = self.representatives
        if reps is None:
            reps = choose_representatives(
                datasets, self.rank_fraction, seed=self.random_state
            )
        return fit_rekema(self._problem(datasets, kernels=self.kernels), reps)
