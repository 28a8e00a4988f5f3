"""Dense linear-algebra primitives: symmetric generalized eigensolver,
pseudo-inverse, pairwise squared distances.

The generalized solver reduces ``A v = lam (B + reg*s*I) v`` to a standard
symmetric problem through a Cholesky factorization of the regularized right
side. ``s = trace(B)/size`` makes ``reg`` dimensionless.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import (
    DimensionMismatch,
    NonSymmetric,
    NotFinite,
    SingularAfterRegularization,
)

SYMMETRY_RTOL = 1e-10


def check_finite(M, name="matrix"):
    """Return ``M`` as a float ndarray, raising NotFinite on NaN/Inf."""
    M = np.asarray(M, dtype=float)
    if M.size and not np.isfinite(M).all():
        raise NotFinite(f"{name} contains NaN or Inf entries")
    return M


def check_symmetric(M, name="matrix", rtol=SYMMETRY_RTOL):
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {M.shape}")
    scale = max(float(np.abs(M).max(initial=0.0)), 1.0)
    asym = float(np.abs(M - M.T).max(initial=0.0))
    if asym > rtol * scale:
        raise NonSymmetric(
            f"{name} asymmetry {asym:.3e} exceeds {rtol:.1e} * scale {scale:.3e}"
        )


@dataclass(frozen=True)
class EigenPairs:
    """Eigenvalues in ascending order; one unit-norm eigenvector per column.

    Sign convention: the entry of largest absolute value in each column is
    positive, so decompositions are reproducible across LAPACK builds.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __len__(self):
        return len(self.eigenvalues)


def _normalize_columns(V):
    norms = np.linalg.norm(V, axis=0)
    norms[norms == 0.0] = 1.0
    V = V / norms
    lead = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[lead, np.arange(V.shape[1])])
    signs[signs == 0.0] = 1.0
    return V * signs


def regularized_rhs(B, reg):
    """``B + reg*s*I`` with ``s = trace(B)/size`` (``s = 1`` for zero trace)."""
    n = B.shape[0]
    tr = float(np.trace(B))
    s = tr / n if tr != 0.0 else 1.0
    return B + (reg * s) * np.eye(n)


def generalized_eigensolve(A, B, reg=0.0, num_pairs=None):
    """Solve the symmetric-definite pencil ``A v = lam (B + reg*s*I) v``.

    Parameters
    ----------
    A, B : array, square, symmetric within 1e-10 relative.
    reg : nonnegative float
        Trace-scaled Tikhonov regularization added to B.
    num_pairs : int, optional
        Return only the ``num_pairs`` smallest eigenpairs (a faster LAPACK
        path); by default all pairs are returned.

    Returns
    -------
    EigenPairs with eigenvalues ascending and unit-norm, sign-fixed
    eigenvectors.
    """
    A = check_finite(A, "A")
    B = check_finite(B, "B")
    check_symmetric(A, "A")
    check_symmetric(B, "B")
    if A.shape != B.shape:
        raise DimensionMismatch(f"A {A.shape} and B {B.shape} differ in size")
    if reg < 0:
        raise ValueError("reg must be nonnegative")

    A = 0.5 * (A + A.T)
    B = 0.5 * (B + B.T)
    Breg = regularized_rhs(B, reg)
    try:
        C = scipy.linalg.cholesky(Breg, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise SingularAfterRegularization(
            "regularized right-hand matrix is not positive definite; raise reg"
        ) from exc
    d = np.diag(C)
    if d.min() <= d.max() * 1e-150:
        raise SingularAfterRegularization(
            "regularized right-hand matrix is numerically singular; raise reg"
        )

    # C^{-1} A C^{-T}, then a standard symmetric eigensolve, then back-transform.
    Y = scipy.linalg.solve_triangular(C, A, lower=True)
    M = scipy.linalg.solve_triangular(C, Y.T, lower=True)
    M = 0.5 * (M + M.T)
    if num_pairs is not None and 0 < num_pairs < M.shape[0]:
        try:
            w, Q = scipy.linalg.eigh(
                M, subset_by_index=[0, num_pairs - 1], driver="evr"
            )
        except np.linalg.LinAlgError:
            # the RRR driver occasionally fails on tightly clustered spectra;
            # the full divide-and-conquer path is slower but dependable
            w, Q = scipy.linalg.eigh(M)
            w, Q = w[:num_pairs], Q[:, :num_pairs]
    else:
        w, Q = scipy.linalg.eigh(M)
    V = scipy.linalg.solve_triangular(C.T, Q, lower=False)
    if not np.isfinite(V).all():
        raise SingularAfterRegularization(
            "back-transform produced non-finite eigenvectors; raise reg"
        )
    return EigenPairs(eigenvalues=w, eigenvectors=_normalize_columns(V))


def pencil_residuals(A, B, reg, pairs):
    """Relative residual ||Av - lam*Breg*v|| / max(||Av||, eps) per pair."""
    A = np.asarray(A, dtype=float)
    Breg = regularized_rhs(np.asarray(B, dtype=float), reg)
    AV = A @ pairs.eigenvectors
    BV = Breg @ pairs.eigenvectors
    num = np.linalg.norm(AV - pairs.eigenvalues * BV, axis=0)
    den = np.maximum(np.linalg.norm(AV, axis=0), np.finfo(float).eps)
    return num / den


def pseudo_inverse(M, rel_tol=1e-10):
    """Moore-Penrose pseudo-inverse via SVD.

    Singular values below ``rel_tol * sigma_max`` are discarded.
    """
    M = check_finite(M, "M")
    if M.size == 0:
        raise DimensionMismatch("cannot pseudo-invert an empty matrix")
    if not (0.0 < rel_tol < 1.0):
        raise ValueError(f"rel_tol must lie in (0, 1), got {rel_tol}")
    return np.linalg.pinv(M, rcond=rel_tol)


def pairwise_sq_distances(X, Y):
    """Squared Euclidean distances between columns of X (d x n) and Y (d x m)."""
    X = check_finite(X, "X")
    Y = check_finite(Y, "Y")
    if X.ndim != 2 or Y.ndim != 2 or X.shape[0] != Y.shape[0]:
        raise DimensionMismatch(
            f"X {X.shape} and Y {Y.shape} must share their row count"
        )
    xx = np.einsum("ij,ij->j", X, X)
    yy = np.einsum("ij,ij->j", Y, Y)
    D = xx[:, None] + yy[None, :] - 2.0 * (X.T @ Y)
    np.maximum(D, 0.0, out=D)
    if X is Y or (X.shape == Y.shape and np.shares_memory(X, Y)):
        np.fill_diagonal(D, 0.0)
    return D
