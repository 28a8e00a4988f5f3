"""Per-domain k-NN topology graphs, cross-domain class graphs, and their
combinatorial Laplacians, assembled as blocks over the concatenated samples.

The topology graph is block-diagonal by domain; the class similarity and
dissimilarity graphs connect labeled samples across all domains.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    DataError,
    DegenerateDomain,
    KTooLarge,
    NegativeWeight,
    NonSymmetric,
)
from .linalg import check_symmetric, pairwise_sq_distances


@dataclass(frozen=True)
class GraphConfig:
    """k-NN graph settings. weighting is "binary" or "heat"; sigma is the
    heat bandwidth (None = mean k-th neighbor distance, per domain)."""

    k: int = 21
    weighting: str = "binary"
    sigma: float = None
    normalized: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise DataError(f"k must be positive, got {self.k}")
        if self.weighting not in ("binary", "heat"):
            raise DataError(f"weighting must be 'binary' or 'heat', got {self.weighting!r}")


@dataclass
class JointGraphs:
    """Topology (W), same-class (Ws) and different-class (Wd) adjacencies over
    the concatenated sample set, with their Laplacians."""

    W: np.ndarray
    Ws: np.ndarray
    Wd: np.ndarray
    L: np.ndarray
    Ls: np.ndarray
    Ld: np.ndarray
    domain_offsets: list = field(default_factory=list)


def _knn_adjacency(X, cfg, domain_id):
    n = X.shape[1]
    if cfg.k >= n:
        raise KTooLarge(f"{domain_id}: k={cfg.k} requires at least {cfg.k + 1} samples")
    D2 = pairwise_sq_distances(X, X)
    if n > 1 and D2.max() == 0.0:
        raise DegenerateDomain(f"{domain_id}: all points identical")
    D = np.sqrt(D2)
    np.fill_diagonal(D, np.inf)
    # stable sort: distance ties broken by lower sample index
    order = np.argsort(D, axis=1, kind="stable")
    neighbors = order[:, : cfg.k]

    A = np.zeros((n, n))
    rows = np.repeat(np.arange(n), cfg.k)
    cols = neighbors.ravel()
    if cfg.weighting == "binary":
        A[rows, cols] = 1.0
    else:
        sigma = cfg.sigma
        if sigma is None:
            kth = D[np.arange(n), neighbors[:, -1]]
            sigma = float(kth.mean())
        if sigma <= 0:
            raise DegenerateDomain(f"{domain_id}: zero heat bandwidth")
        A[rows, cols] = np.exp(-D2[rows, cols] / (2.0 * sigma * sigma))
    # union of neighborhoods keeps the graph symmetric
    return np.maximum(A, A.T)


def build_topology_graph(datasets, cfg):
    """Block-diagonal k-NN adjacency over all domains, in dataset order."""
    sizes = [ds.n_samples for ds in datasets]
    n = sum(sizes)
    W = np.zeros((n, n))
    off = 0
    for ds in datasets:
        ni = ds.n_samples
        W[off : off + ni, off : off + ni] = _knn_adjacency(ds.features, cfg, ds.domain_id)
        off += ni
    return W


def build_class_graphs(datasets):
    """Same-class (Ws) and different-class (Wd) graphs over labeled samples,
    including cross-domain pairs; unlabeled rows/columns are zero."""
    labels = np.concatenate([ds.labels for ds in datasets])
    labeled = labels > 0
    both = np.outer(labeled, labeled)
    same = labels[:, None] == labels[None, :]
    Ws = (both & same).astype(float)
    Wd = (both & ~same).astype(float)
    np.fill_diagonal(Ws, 0.0)
    np.fill_diagonal(Wd, 0.0)
    return Ws, Wd


def laplacian(W, normalized=False):
    """Combinatorial Laplacian L = D - W (or its symmetric-normalized form)."""
    W = np.asarray(W, dtype=float)
    try:
        check_symmetric(W, "W")
    except NonSymmetric:
        raise
    if (W < 0).any():
        raise NegativeWeight("adjacency must be nonnegative")
    deg = W.sum(axis=1)
    L = np.diag(deg) - W
    if normalized:
        with np.errstate(divide="ignore"):
            dinv = 1.0 / np.sqrt(deg)
        dinv[~np.isfinite(dinv)] = 0.0
        L = dinv[:, None] * L * dinv[None, :]
    return L


def domain_offsets(datasets):
    """Start index of each domain's block in the concatenated sample order."""
    offs = [0]
    for ds in datasets[:-1]:
        offs.append(offs[-1] + ds.n_samples)
    return offs


def build_joint_graphs(datasets, cfg):
    """Build W, Ws, Wd and their Laplacians for the concatenated sample set."""
    W = build_topology_graph(datasets, cfg)
    Ws, Wd = build_class_graphs(datasets)
    return JointGraphs(
        W=W,
        Ws=Ws,
        Wd=Wd,
        L=laplacian(W, normalized=cfg.normalized),
        Ls=laplacian(Ws, normalized=cfg.normalized),
        Ld=laplacian(Wd, normalized=cfg.normalized),
        domain_offsets=domain_offsets(datasets),
    )
