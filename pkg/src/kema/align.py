"""Fit SSMA (primal), KEMA (dual) and REKEMA (reduced-rank) alignment models,
project data to the shared latent space (including out-of-sample points), and
invert latent coordinates into a linear-kernel target domain.

All three fits solve a generalized eigenproblem pencil whose left side encodes
within-domain geometry plus cross-domain class similarity and whose right side
encodes class dissimilarity; the latent basis is given by the eigenvectors of
the smallest non-zero eigenvalues.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse

from .exceptions import (
    DataError,
    EmptyRepresentativeSet,
    RankDeficientTargetWarning,
    TargetKernelNotLinear,
    TooFewNonzeroEigenvalues,
    UnknownDomain,
)
from .graphs import GraphConfig, build_joint_graphs
from .kernels import KernelSpec, kernel_matrix, resolve_sigma
from .linalg import (
    check_finite,
    generalized_eigensolve,
    pencil_residuals,
    pseudo_inverse,
)

DEFAULT_REG = 1e-8
# left-side ridge keeps the Cholesky reduction stable for near-duplicate samples
LEFT_RIDGE = 1e-12
# relative cutoff below which an eigenvalue counts as "zero" and is discarded
ZERO_EIG_RTOL = 1e-9
DEFAULT_MAX_FEATURES = 20
# relative cutoff for the numerical rank of a kernel block (dual fits solve in
# the kernel's range; its null space satisfies the pencil trivially)
KERNEL_RANK_RTOL = 1e-10


@dataclass
class AlignmentProblem:
    """Input to a fit: datasets, per-domain kernels, graph settings, the
    similarity weight mu and the requested latent dimension."""

    datasets: list
    kernels: list = None
    graph_cfg: GraphConfig = field(default_factory=GraphConfig)
    mu: float = 1.0
    num_features: int = None
    eig_reg: float = DEFAULT_REG
    pooled_sigma: bool = True

    def __post_init__(self):
        if len(self.datasets) < 2:
            raise DataError("alignment needs at least two domains")
        for ds in self.datasets:
            if ds.n_labeled < 1:
                raise DataError(f"{ds.domain_id}: every domain needs >= 1 labeled sample")
        if self.kernels is None:
            self.kernels = [KernelSpec("linear")] * len(self.datasets)
        if isinstance(self.kernels, (str, KernelSpec)):
            spec = self.kernels if isinstance(self.kernels, KernelSpec) else KernelSpec.parse(self.kernels)
            self.kernels = [spec] * len(self.datasets)
        self.kernels = [
            KernelSpec.parse(k) if isinstance(k, str) else k for k in self.kernels
        ]
        if len(self.kernels) != len(self.datasets):
            raise DataError("need one kernel spec per domain")
        if self.mu < 0:
            raise DataError("mu must be nonnegative")

    def joint_graphs(self):
        """Topology/class graphs for the concatenated samples, built once."""
        if getattr(self, "_graphs", None) is None:
            self._graphs = build_joint_graphs(self.datasets, self.graph_cfg)
        return self._graphs

    def resolved_kernels(self):
        return [
            resolve_sigma(
                spec,
                self.datasets,
                per_domain=None if self.pooled_sigma else ds,
            )
            for spec, ds in zip(self.kernels, self.datasets)
        ]


@dataclass
class AlignmentModel:
    """Fitted alignment: per-domain coefficient blocks over the latent basis.

    mode "primal": coefs[i] is d_i x m, applied as v.T @ X.
    mode "dual"/"reduced": coefs[i] is n_i x m (r_i x m), applied through
    kernel evaluations against the retained training samples.
    """

    mode: str
    coefs: list
    eigenvalues: np.ndarray
    kernels: list
    domain_ids: list
    dims: list
    training: list = None
    representatives: list = None
    mu: float = 1.0
    graph_cfg: GraphConfig = field(default_factory=GraphConfig)
    eig_reg: float = DEFAULT_REG
    fit_residual: float = 0.0

    @property
    def n_features(self):
        return len(self.eigenvalues)

    @property
    def n_domains(self):
        return len(self.coefs)

    def domain_index(self, domain):
        if isinstance(domain, (int, np.integer)) and 0 <= domain < self.n_domains:
            return int(domain)
        if domain in self.domain_ids:
            return self.domain_ids.index(domain)
        raise UnknownDomain(f"unknown domain {domain!r}")


def _block_diag(blocks):
    return scipy.linalg.block_diag(*blocks)


def _select_pairs(pairs, B_unreg, trace_denom=None):
    """Indices of the non-zero eigenvalues with genuine right-side content,
    smallest first.

    An eigenvalue counts as zero when it falls below ZERO_EIG_RTOL relative to
    the largest magnitude, or when its eigenvector carries no mass on the
    unregularized right side (such directions are eigenpairs of the
    regularizer only, not of the true pencil).
    """
    w = pairs.eigenvalues
    V = pairs.eigenvectors
    scale = max(float(np.abs(w).max(initial=0.0)), 1.0)
    thr = ZERO_EIG_RTOL * scale
    bmass = np.einsum("ij,ij->j", V, B_unreg @ V)
    denom = trace_denom if trace_denom else B_unreg.shape[0]
    btol = ZERO_EIG_RTOL * max(abs(float(np.trace(B_unreg))) / denom, 1.0)
    return np.flatnonzero((w >= thr) & (bmass > btol))


def _split_rows(V, sizes):
    blocks, off = [], 0
    for s in sizes:
        blocks.append(V[off : off + s, :])
        off += s
    return blocks


def _num_features(problem, cap):
    m = problem.num_features
    if m is None:
        m = min(DEFAULT_MAX_FEATURES, cap)
    if m < 1 or m > cap:
        raise DataError(f"num_features must be in 1..{cap}, got {m}")
    return m


def _solve(A, B, reg, m, sizes, what, full_size=None, clamp=False):
    """Smallest-nonzero eigenpairs of the pencil, split into per-domain rows.

    ``full_size`` rescales the ridge and regularizer traces when the pencil
    was deflated from a larger ambient problem, so eigenvalues match the
    undeflated solve. With ``clamp`` the request shrinks to however many pairs
    survive thresholding (used for default feature counts).
    """
    A = 0.5 * (A + A.T)
    B = 0.5 * (B + B.T)
    size = A.shape[0]
    nfull = full_size if full_size else size
    tr = abs(float(np.trace(A)))
    A = A + (LEFT_RIDGE * (tr / nfull if tr else 1.0)) * np.eye(size)
    reg_eff = reg * size / nfull
    # solve for a small candidate window first; widen if thresholding eats it
    cand = min(size, m + 16)
    while True:
        pairs = generalized_eigensolve(
            A, B, reg=reg_eff, num_pairs=cand if cand < size else None
        )
        idx = _select_pairs(pairs, B, trace_denom=nfull)
        if len(idx) >= m:
            idx = idx[:m]
            break
        if cand >= size:
            if clamp and len(idx) >= 1:
                break
            raise TooFewNonzeroEigenvalues(
                f"{what}: requested {m} features but only {len(idx)} "
                "eigenpairs survive the zero-threshold"
            )
        cand = min(size, max(2 * cand, m + 16))
    V = pairs.eigenvectors[:, idx]
    # rescale to unit right-side mass so latent components are commensurate
    # (positive by the selection filter; pure column scaling, so residuals,
    # eigenvalues and full-rank inversion are unaffected)
    bmass = np.einsum("ij,ij->j", V, B @ V)
    V = V / np.sqrt(bmass)
    kept = type(pairs)(pairs.eigenvalues[idx], V)
    fit_residual = float(pencil_residuals(A, B, reg_eff, kept).max(initial=0.0))
    return kept.eigenvalues, _split_rows(kept.eigenvectors, sizes), fit_residual


def fit_ssma(problem):
    """Linear (primal) alignment over stacked feature dimensions."""
    graphs = problem.joint_graphs()
    Z = _block_diag([ds.features for ds in problem.datasets])
    M = graphs.L + problem.mu * graphs.Ls
    A = Z @ M @ Z.T
    B = Z @ graphs.Ld @ Z.T
    dims = [ds.dim for ds in problem.datasets]
    m = _num_features(problem, sum(dims))
    w, blocks, resid = _solve(
        A, B, problem.eig_reg, m, dims, "ssma", clamp=problem.num_features is None
    )
    return AlignmentModel(
        mode="primal",
        coefs=blocks,
        eigenvalues=w,
        kernels=[KernelSpec("linear")] * len(dims),
        domain_ids=[ds.domain_id for ds in problem.datasets],
        dims=dims,
        training=[ds.features for ds in problem.datasets],
        mu=problem.mu,
        graph_cfg=problem.graph_cfg,
        eig_reg=problem.eig_reg,
        fit_residual=resid,
    )


def _deflated_pencil(problem, graphs, kernels, reps):
    """Dual pencil restricted to the numerical row space of the kernel blocks.

    Left null directions of each representative kernel block satisfy both
    sides of the pencil trivially and would otherwise surface as spurious
    small eigenvalues; the restriction is exact, not approximate. Returns
    (per-block orthonormal bases, A, B) with A, B of reduced size.
    """
    bases, zs = [], []
    for spec, ds, idx in zip(kernels, problem.datasets, reps):
        Kb = kernel_matrix(spec, ds.features[:, idx], ds.features)
        Q, s, Vt = scipy.linalg.svd(Kb, full_matrices=False)
        top = float(s[0]) if s.size else 0.0
        if top <= 0.0:
            raise DataError(f"{ds.domain_id}: kernel block is entirely zero")
        keep = s > KERNEL_RANK_RTOL * top
        bases.append(Q[:, keep])
        zs.append(s[keep, None] * Vt[keep])
    Z = _block_diag(zs)
    M = scipy.sparse.csr_matrix(graphs.L + problem.mu * graphs.Ls)
    Ld = scipy.sparse.csr_matrix(graphs.Ld)
    A = Z @ (M @ Z.T)
    B = Z @ (Ld @ Z.T)
    return bases, A, B


def fit_kema(problem):
    """Kernelized (dual) alignment over all training samples.

    The pencil is solved in the numerical range of the block-diagonal kernel,
    shared with the reduced-rank path: with every index as a representative
    the two coincide exactly.
    """
    graphs = problem.joint_graphs()
    kernels = problem.resolved_kernels()
    reps = [np.arange(ds.n_samples) for ds in problem.datasets]
    bases, A, B = _deflated_pencil(problem, graphs, kernels, reps)
    n = sum(ds.n_samples for ds in problem.datasets)
    sizes = [u.shape[1] for u in bases]
    m = _num_features(problem, n)
    w, blocks, resid = _solve(
        A,
        B,
        problem.eig_reg,
        m,
        sizes,
        "kema",
        full_size=n,
        clamp=problem.num_features is None,
    )
    return AlignmentModel(
        mode="dual",
        coefs=[u @ y for u, y in zip(bases, blocks)],
        eigenvalues=w,
        kernels=kernels,
        domain_ids=[ds.domain_id for ds in problem.datasets],
        dims=[ds.dim for ds in problem.datasets],
        training=[ds.features for ds in problem.datasets],
        mu=problem.mu,
        graph_cfg=problem.graph_cfg,
        eig_reg=problem.eig_reg,
        fit_residual=resid,
    )


def fit_rekema(problem, representatives):
    """Reduced-rank dual alignment: coefficients live on per-domain
    representative subsets; with all indices this reproduces fit_kema."""
    if len(representatives) != len(problem.datasets):
        raise DataError("need one representative index list per domain")
    reps = []
    for ds, idx in zip(problem.datasets, representatives):
        idx = np.asarray(idx, dtype=int)
        if idx.size == 0:
            raise EmptyRepresentativeSet(f"{ds.domain_id}: empty representative set")
        if idx.min() < 0 or idx.max() >= ds.n_samples:
            raise DataError(f"{ds.domain_id}: representative index out of range")
        reps.append(idx)

    graphs = problem.joint_graphs()
    kernels = problem.resolved_kernels()
    bases, A, B = _deflated_pencil(problem, graphs, kernels, reps)
    r_total = sum(len(idx) for idx in reps)
    sizes = [q.shape[1] for q in bases]
    m = _num_features(problem, r_total)
    w, blocks, resid = _solve(
        A, B, problem.eig_reg, m, sizes, "rekema",
        full_size=r_total, clamp=problem.num_features is None,
    )
    return AlignmentModel(
        mode="reduced",
        coefs=[q @ y for q, y in zip(bases, blocks)],
        eigenvalues=w,
        kernels=kernels,
        domain_ids=[ds.domain_id for ds in problem.datasets],
        dims=[ds.dim for ds in problem.datasets],
        training=[
            ds.features[:, idx] for ds, idx in zip(problem.datasets, reps)
        ],
        representatives=[idx.tolist() for idx in reps],
        mu=problem.mu,
        graph_cfg=problem.graph_cfg,
        eig_reg=problem.eig_reg,
        fit_residual=resid,
    )


def choose_representatives(datasets, fraction, seed=0):
    """Uniform per-domain sampling without replacement, at least one each."""
    if not (0 < fraction <= 1):
        raise DataError(f"rank fraction must be in (0, 1], got {fraction}")
    rng = np.random.default_rng(seed)
    reps = []
    for ds in datasets:
        r = max(1, int(round(fraction * ds.n_samples)))
        reps.append(np.sort(rng.choice(ds.n_samples, size=r, replace=False)))
    return reps


def project(model, domain, X_new):
    """Latent coordinates (m x n_new) of new samples from one domain."""
    i = model.domain_index(domain)
    X_new = check_finite(np.asarray(X_new, dtype=float), "X_new")
    if X_new.ndim != 2 or X_new.shape[0] != model.dims[i]:
        raise DataError(
            f"expected d={model.dims[i]} rows for domain {model.domain_ids[i]}, "
            f"got shape {X_new.shape}"
        )
    if model.mode == "primal":
        return model.coefs[i].T @ X_new
    K = kernel_matrix(model.kernels[i], model.training[i], X_new)
    return model.coefs[i].T @ K


def latent_basis(model, domain):
    """The target-domain latent basis u_i (d_i x m) used for inversion."""
    i = model.domain_index(domain)
    if model.mode == "primal":
        return model.coefs[i]
    if model.kernels[i].kind != "linear":
        raise TargetKernelNotLinear(
            f"domain {model.domain_ids[i]} was fitted with kernel "
            f"{model.kernels[i].kind!r}; inversion requires a linear kernel"
        )
    return model.training[i] @ model.coefs[i]


def invert(model, source, target, X_src, rel_tol=1e-10):
    """Map source-domain samples into the target domain's feature space.

    The target domain must use a linear kernel (primal models qualify); the
    source kernel is arbitrary. Returns a d_target x n matrix.

    ``rel_tol`` is the singular-value cutoff used when pseudo-inverting the
    target latent basis. Latent components with relative target-basis mass
    below the cutoff are dropped instead of amplified; raising it (e.g. to
    0.05) regularizes inversion when some components live mostly in other
    domains.
    """
    j = model.domain_index(source)
    i = model.domain_index(target)
    u_i = latent_basis(model, i)
    if np.linalg.matrix_rank(u_i) < model.dims[i]:
        warnings.warn(
            f"target domain {model.domain_ids[i]} has a rank-deficient latent "
            "basis; inversion is lossy",
            RankDeficientTargetWarning,
            stacklevel=2,
        )
    u_dag = pseudo_inverse(u_i, rel_tol=rel_tol)
    X_src = check_finite(np.asarray(X_src, dtype=float), "X_src")
    if model.mode == "primal":
        T = model.coefs[j] @ u_dag
        return T.T @ X_src
    K_j = kernel_matrix(model.kernels[j], model.training[j], X_src)
    T = model.coefs[j] @ u_dag
    return T.T @ K_j
