"""Fixed-size 2xn matrix arithmetic and rank-one geometry.

All matrices are plain numpy arrays of shape (2, n) with n >= 2 and finite
float64 entries. Entry (i, j) in 1-based math notation is ``X[i-1, j-1]``.
The functions here are pure and never mutate their inputs.
"""

from __future__ import annotations

import enum
import itertools

import numpy as np

from .errors import NotSquareError, SingularMatrixError

# Default absolute tolerance for the relative rank-one test.
RANK_TOL = 1e-10

# Default tolerance for subspace membership: exact zeros required.
SUBSPACE_TOL = 0.0


class SubspaceTag(enum.Enum):
    """Linear subspaces of the 2xn matrices used throughout.

    FULL is the whole space. TRI requires entries (2,1)..(2,n-1) to vanish,
    so the second row is (0, ..., 0, x_2n). DIAG additionally requires
    entry (1,n) to vanish.
    """

    FULL = "full"
    TRI = "tri"
    DIAG = "diag"


def as_matrix(x) -> np.ndarray:
    """Validate and return a read-only float64 matrix of shape (2, n), n >= 2.

    Raises ValueError on wrong shape or non-finite entries.
    """
    m = np.array(x, dtype=float)
    if m.ndim != 2 or m.shape[0] != 2 or m.shape[1] < 2:
        raise ValueError(f"expected a 2xn matrix with n >= 2, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    m.setflags(write=False)
    return m


def minor_values(D: np.ndarray) -> np.ndarray:
    """All 2x2 minors of one or a batch of 2xn matrices.

    Accepts shape (2, n) or (..., 2, n) and returns the n*(n-1)/2 minors
    det([[D_1i, D_1j], [D_2i, D_2j]]) for i < j along the last axis.
    """
    D = np.asarray(D, dtype=float)
    n = D.shape[-1]
    pairs = list(itertools.combinations(range(n), 2))
    i = np.array([p[0] for p in pairs])
    j = np.array([p[1] for p in pairs])
    return D[..., 0, i] * D[..., 1, j] - D[..., 0, j] * D[..., 1, i]


def rank_le_one(D, tol: float = RANK_TOL) -> bool:
    """True iff rank(D) <= 1 tested through 2x2 minors.

    Every minor must satisfy ``|minor| <= tol * max(1, max|D_ij|^2)``, so the
    tolerance is relative to the squared magnitude of the matrix. With
    tol = 0 this is the exact rank condition whenever the minors are
    computed exactly (e.g. on small integers).
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    D = np.asarray(D, dtype=float)
    scale = max(1.0, float(np.abs(D).max()) ** 2)
    return bool(np.abs(minor_values(D)).max() <= tol * scale)


def rank_one_residual(D) -> float:
    """Largest scaled minor of D; rank_le_one(D, tol) iff residual <= tol."""
    D = np.asarray(D, dtype=float)
    scale = max(1.0, float(np.abs(D).max()) ** 2)
    return float(np.abs(minor_values(D)).max()) / scale


def in_subspace(X, tag: SubspaceTag, tol: float = SUBSPACE_TOL) -> bool:
    """Membership test for TRI/DIAG with absolute tolerance on the zeros."""
    X = np.asarray(X, dtype=float)
    if tag is SubspaceTag.FULL:
        return True
    n = X.shape[-1]
    ok = np.all(np.abs(X[..., 1, : n - 1]) <= tol)
    if tag is SubspaceTag.DIAG:
        ok = ok and np.all(np.abs(X[..., 0, n - 1]) <= tol)
    return bool(ok)


def is_tri(X, tol: float = SUBSPACE_TOL) -> bool:
    return in_subspace(X, SubspaceTag.TRI, tol)


def is_diag(X, tol: float = SUBSPACE_TOL) -> bool:
    return in_subspace(X, SubspaceTag.DIAG, tol)


def project_diag(X) -> np.ndarray:
    """Orthogonal projection onto the DIAG subspace.

    Zeroes entry (1,n) and entries (2,1)..(2,n-1); idempotent. Works on a
    single matrix or a batch with shape (..., 2, n).
    """
    X = np.asarray(X, dtype=float)
    out = X.copy()
    n = X.shape[-1]
    out[..., 0, n - 1] = 0.0
    out[..., 1, : n - 1] = 0.0
    return out


def project_k(X, k: int) -> np.ndarray:
    """The squeezed projection A_k X B_k with A_k = diag(1, k), B_k = diag(1,..,1,1/k).

    On TRI inputs this divides entry (1,n) by k and fixes everything else;
    as k grows it converges to project_diag entrywise.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    X = np.asarray(X, dtype=float)
    out = X.copy()
    n = X.shape[-1]
    out[..., 1, :] *= k          # A_k row scaling
    out[..., :, n - 1] /= k      # B_k column scaling
    return out


def conjugate(X, A, B, tol: float = SUBSPACE_TOL) -> np.ndarray:
    """The linear map X -> A X B with A 2x2 and B nxn invertible.

    Raises SingularMatrixError when |det B| <= tol. Maps rank-<=1 matrices
    to rank-<=1 matrices.
    """
    X = np.asarray(X, dtype=float)
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    n = X.shape[-1]
    if A.shape != (2, 2):
        raise ValueError(f"A must be 2x2, got {A.shape}")
    if B.shape != (n, n):
        raise ValueError(f"B must be {n}x{n} to match X, got {B.shape}")
    if abs(np.linalg.det(B)) <= tol:
        raise SingularMatrixError(f"B is singular within tolerance {tol}")
    return A @ X @ B


def det2(X) -> float:
    """Determinant of a 2x2 matrix; NotSquareError for wider shapes."""
    X = np.asarray(X, dtype=float)
    if X.shape[-1] != 2:
        raise NotSquareError(f"det2 requires n = 2, got n = {X.shape[-1]}")
    return float(X[0, 0] * X[1, 1] - X[0, 1] * X[1, 0])


def det2_batch(Xs: np.ndarray) -> np.ndarray:
    """Determinants of a batch of 2x2 matrices, shape (..., 2, 2) -> (...)."""
    Xs = np.asarray(Xs, dtype=float)
    if Xs.shape[-1] != 2:
        raise NotSquareError(f"det2_batch requires n = 2, got n = {Xs.shape[-1]}")
    return Xs[..., 0, 0] * Xs[..., 1, 1] - Xs[..., 0, 1] * Xs[..., 1, 0]
