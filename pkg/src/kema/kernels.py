"""Kernel functions and Gram-matrix construction.

Supported kernels: linear, RBF, histogram intersection, chi-squared, and
precomputed. The RBF/chi-squared lengthscale can be set to "auto", in which
case it is resolved from the labeled samples (mean pairwise distance in the
kernel's own metric) at fit time.
"""

from dataclasses import dataclass, replace

import numpy as np

from .exceptions import (
    DataError,
    DimensionMismatch,
    NegativeFeature,
    NoLabeledPairs,
    ZeroSpread,
)
from .linalg import check_finite, check_symmetric, pairwise_sq_distances

KERNEL_KINDS = ("linear", "rbf", "hist", "chi2", "precomputed")

# dims processed per block when evaluating histogram-type kernels, to cap
# the d x n x m intermediate
_CHUNK = 64


@dataclass(frozen=True)
class KernelSpec:
    """Declarative kernel choice for one domain.

    kind : one of "linear", "rbf", "hist", "chi2", "precomputed"
    sigma : positive float, or "auto" (resolved at fit time), or None
    matrix : Gram matrix for kind="precomputed"
    """

    kind: str = "linear"
    sigma: object = None
    matrix: np.ndarray = None

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise DataError(f"unknown kernel kind {self.kind!r}")
        if self.sigma is not None and self.sigma != "auto":
            if not float(self.sigma) > 0:
                raise DataError(f"sigma must be positive, got {self.sigma}")
        if self.kind == "precomputed":
            if self.matrix is None:
                raise DataError("precomputed kernel needs a matrix")
            M = check_finite(self.matrix, "precomputed kernel")
            check_symmetric(M, "precomputed kernel")
        elif self.matrix is not None:
            raise DataError(f"kernel kind {self.kind!r} does not take a matrix")

    @property
    def needs_sigma(self):
        return self.kind in ("rbf", "chi2")

    @staticmethod
    def parse(text):
        """Parse "linear", "rbf:auto", "rbf:1.5", "hist", "chi2:0.3"."""
        kind, _, arg = text.partition(":")
        kind = kind.strip().lower()
        if kind not in KERNEL_KINDS:
            raise DataError(f"unknown kernel kind {kind!r}")
        sigma = None
        if arg:
            sigma = "auto" if arg.strip() == "auto" else float(arg)
        elif kind in ("rbf", "chi2"):
            sigma = "auto"
        return KernelSpec(kind=kind, sigma=sigma)

    def __str__(self):
        if self.kind in ("rbf", "chi2") and self.sigma is not None:
            return f"{self.kind}:{self.sigma}"
        return self.kind


def _require_nonnegative(X, Y, kind):
    if (X < 0).any() or (Y < 0).any():
        raise NegativeFeature(f"{kind} kernel requires nonnegative features")


def _hist_gram(X, Y):
    d, n = X.shape
    m = Y.shape[1]
    K = np.zeros((n, m))
    for lo in range(0, d, _CHUNK):
        hi = min(lo + _CHUNK, d)
        K += np.minimum(X[lo:hi, :, None], Y[lo:hi, None, :]).sum(axis=0)
    return K


def chi2_distances(X, Y):
    """chi^2(x, y) = 0.5 * sum_d (x_d - y_d)^2 / (x_d + y_d); 0/0 terms -> 0."""
    d, n = X.shape
    m = Y.shape[1]
    D = np.zeros((n, m))
    for lo in range(0, d, _CHUNK):
        hi = min(lo + _CHUNK, d)
        diff = X[lo:hi, :, None] - Y[lo:hi, None, :]
        tot = X[lo:hi, :, None] + Y[lo:hi, None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            term = np.where(tot > 0.0, diff * diff / np.where(tot > 0.0, tot, 1.0), 0.0)
        D += 0.5 * term.sum(axis=0)
    return D


def kernel_matrix(spec, X, Y):
    """Gram matrix K(i, j) = k(column i of X, column j of Y); shape n x m."""
    if spec.kind == "precomputed":
        return np.asarray(spec.matrix, dtype=float)
    X = check_finite(X, "X")
    Y = check_finite(Y, "Y")
    if X.shape[0] != Y.shape[0]:
        raise DimensionMismatch(
            f"X {X.shape} and Y {Y.shape} must share their dimension"
        )
    if spec.kind == "linear":
        return X.T @ Y
    if spec.kind == "rbf":
        sigma = _concrete_sigma(spec)
        D = pairwise_sq_distances(X, Y)
        return np.exp(-D / (2.0 * sigma * sigma))
    if spec.kind == "hist":
        _require_nonnegative(X, Y, "histogram-intersection")
        return _hist_gram(X, Y)
    if spec.kind == "chi2":
        _require_nonnegative(X, Y, "chi-squared")
        sigma = _concrete_sigma(spec)
        return np.exp(-chi2_distances(X, Y) / (2.0 * sigma * sigma))
    raise DataError(f"unknown kernel kind {spec.kind!r}")


def _concrete_sigma(spec):
    if spec.sigma is None or spec.sigma == "auto":
        raise DataError(
            f"{spec.kind} kernel sigma is unresolved; call resolve_sigma first"
        )
    return float(spec.sigma)


def sigma_heuristic(datasets):
    """Mean Euclidean distance over all unordered pairs of labeled samples.

    Pairs are formed within each domain (feature spaces may differ in
    dimension across domains) and pooled into a single average.
    """
    dists = []
    for ds in datasets:
        Xl = ds.labeled_features()
        nl = Xl.shape[1]
        if nl < 2:
            continue
        D = np.sqrt(pairwise_sq_distances(Xl, Xl))
        iu = np.triu_indices(nl, k=1)
        dists.append(D[iu])
    if not dists:
        raise NoLabeledPairs("need at least two labeled samples in one domain")
    mean = float(np.concatenate(dists).mean())
    if mean == 0.0:
        raise ZeroSpread("all labeled samples coincide; lengthscale undefined")
    return mean


def chi2_sigma_heuristic(datasets):
    """Mean pairwise chi^2 distance among labeled samples, pooled per domain."""
    dists = []
    for ds in datasets:
        Xl = ds.labeled_features()
        nl = Xl.shape[1]
        if nl < 2:
            continue
        if (Xl < 0).any():
            raise NegativeFeature("chi-squared heuristic requires nonnegative data")
        D = chi2_distances(Xl, Xl)
        iu = np.triu_indices(nl, k=1)
        dists.append(D[iu])
    if not dists:
        raise NoLabeledPairs("need at least two labeled samples in one domain")
    mean = float(np.concatenate(dists).mean())
    if mean == 0.0:
        raise ZeroSpread("all labeled samples coincide; lengthscale undefined")
    return mean


def resolve_sigma(spec, datasets, per_domain=None):
    """Return a spec with any "auto" sigma replaced by its heuristic value.

    ``per_domain`` restricts the heuristic to a single dataset (domain-specific
    metric); by default labeled samples of all domains are pooled.
    """
    if not spec.needs_sigma or spec.sigma != "auto":
        return spec
    pool = [per_domain] if per_domain is not None else list(datasets)
    if spec.kind == "rbf":
        return replace(spec, sigma=sigma_heuristic(pool))
    return replace(spec, sigma=chi2_sigma_heuristic(pool))
