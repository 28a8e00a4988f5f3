"""Finite-sample spectral stability diagnostics for a dual alignment problem.

The effective operator is K* = (K (L + mu Ls) K)^{-1} K Ld K; its empirical
eigenvalue spectrum feeds residual/projection bounds for an m-dimensional
latent subspace at confidence 1 - delta. The bounds are diagnostic output
only: they concern population quantities and are never asserted against data.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .align import LEFT_RIDGE, _block_diag
from .exceptions import (
    InvalidConfidence,
    InvalidSubspaceDim,
    SingularAfterRegularization,
)
from .graphs import build_joint_graphs
from .kernels import kernel_matrix
from .linalg import regularized_rhs


@dataclass
class BoundsReport:
    """Empirical spectral bounds for subspace dimension m at confidence 1-delta."""

    m: int
    delta: float
    n: int
    R: float
    empirical_eigenvalues: np.ndarray = field(repr=False)
    lower_residual: float = 0.0
    upper_residual: float = 0.0
    lower_projection: float = 0.0
    upper_projection: float = 0.0

    def to_dict(self):
        return {
            "m": self.m,
            "delta": self.delta,
            "n": self.n,
            "R": self.R,
            "empirical_eigenvalues": [float(v) for v in self.empirical_eigenvalues],
            "lower_residual": self.lower_residual,
            "upper_residual": self.upper_residual,
            "lower_projection": self.lower_projection,
            "upper_projection": self.upper_projection,
        }


def compute_kstar(problem):
    """K* for a dual-mode problem, using the same trace-scaled regularization
    as the alignment fit for the inverted left factor."""
    graphs = build_joint_graphs(problem.datasets, problem.graph_cfg)
    kernels = problem.resolved_kernels()
    K = _block_diag(
        [
            kernel_matrix(spec, ds.features, ds.features)
            for spec, ds in zip(kernels, problem.datasets)
        ]
    )
    M = graphs.L + problem.mu * graphs.Ls
    A = K @ M @ K
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    tr = abs(float(np.trace(A)))
    A = A + (LEFT_RIDGE * (tr / n if tr else 1.0)) * np.eye(n)
    Areg = regularized_rhs(A, problem.eig_reg)
    B = K @ graphs.Ld @ K
    try:
        c, low = scipy.linalg.cho_factor(Areg, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise SingularAfterRegularization(
            "left factor is not positive definite; raise eig_reg"
        ) from exc
    kstar = scipy.linalg.cho_solve((c, low), B)
    if not np.isfinite(kstar).all():
        raise SingularAfterRegularization("left factor numerically singular")
    return kstar


def spectral_bounds(kstar, m, delta, R=None, normalize=False):
    """Evaluate the residual and projection bounds for the spectrum of K*.

    Eigenvalues are taken from the symmetrized K* (asymmetry after the
    regularized inversion is numerical noise), sorted descending. With
    ``normalize`` the spectrum of K*/n is used instead. R defaults to
    max_i sqrt(max(K*_ii, 0)).
    """
    kstar = np.asarray(kstar, dtype=float)
    n = kstar.shape[0]
    if not (0.0 < delta < 1.0):
        raise InvalidConfidence(f"delta must be in (0, 1), got {delta}")
    if not (1 <= m <= n):
        raise InvalidSubspaceDim(f"m must be in 1..{n}, got {m}")
    diag = np.diag(kstar)
    if R is None:
        R = float(np.sqrt(max(float(diag.max(initial=0.0)), 0.0)))
    lam = np.sort(scipy.linalg.eigvalsh(0.5 * (kstar + kstar.T)))[::-1]
    if normalize:
        lam = lam / n

    diag_term = math.sqrt((2.0 / n) * float(np.sum(diag * diag)))
    lower_residual = float(lam[m:].sum())
    lower_projection = float(lam[:m].sum())
    upper_residual = min(
        (1.0 / n) * float(lam[l:].sum()) + ((1.0 + math.sqrt(l)) / math.sqrt(n)) * diag_term
        for l in range(1, m + 1)
    ) + R * R * math.sqrt((18.0 / n) * math.log(2.0 * n / delta))
    upper_projection = max(
        (1.0 / n) * float(lam[:l].sum()) - ((1.0 + math.sqrt(l)) / math.sqrt(n)) * diag_term
        for l in range(1, m + 1)
    ) - R * R * math.sqrt((19.0 / n) * math.log(2.0 * (n + 1) / delta))

    return BoundsReport(
        m=m,
        delta=delta,
        n=n,
        R=R,
        empirical_eigenvalues=lam,
        lower_residual=lower_residual,
        upper_residual=float(upper_residual),
        lower_projection=lower_projection,
        upper_projection=float(upper_projection),
    )
