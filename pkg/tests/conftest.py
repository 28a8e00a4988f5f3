"""Shared fixtures: small seeded alignment problems sized for fast tests."""

import numpy as np
import pytest

from kema.dataset import DomainDataset
from kema.graphs import GraphConfig


def two_moon_domains(seed=0, n=30, labeled_per_class=5, dims=(2, 3)):
    """Two small domains with a shared 1-D latent parameter and 2 classes.

    Domain features are different smooth maps of the same latent draws, so
    alignment is possible; labels mark the first samples of each class.
    """
    rng = np.random.default_rng(seed)
    datasets = []
    for d, dim in enumerate(dims):
        t = np.sort(rng.uniform(0.0, 1.0, size=n))
        cls = np.where(t < 0.5, 1, 2)
        labels = np.zeros(n, dtype=int)
        for c in (1, 2):
            idx = np.flatnonzero(cls == c)[:labeled_per_class]
            labels[idx] = c
        base = np.vstack([np.cos(2.0 * t + d), np.sin(3.0 * t - d)])
        if dim == 3:
            base = np.vstack([base, t * t - 0.3])
        X = base + 0.01 * rng.normal(size=base.shape)
        datasets.append(DomainDataset(X, labels, domain_id=f"dom{d + 1}"))
    return datasets


@pytest.fixture
def small_problem_datasets():
    return two_moon_domains()


@pytest.fixture
def small_graph_cfg():
    return GraphConfig(k=4)
