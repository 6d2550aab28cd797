"""Dense linear algebra kernel.

Thin, validated wrappers around LAPACK (via numpy/scipy) for the handful of
factorizations the estimators need: a full SVD in ``A = L @ Lam @ R`` form,
the Moore-Penrose pseudoinverse, numerical rank, a symmetric eigensolver and
an SPD solve.

All routines use one convention for numerical rank: a singular value counts
as nonzero when it exceeds ``tol * s_max``, where ``tol`` defaults to
``max(m, n) * eps``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ContractError, NumericalError

EPS = np.finfo(float).eps


def as_matrix(a, name="matrix") -> np.ndarray:
    """Return `a` as a finite 2-D float array (scalars become 1x1)."""
    arr = np.array(a, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ContractError(f"{name}: expected a 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractError(f"{name}: entries must be finite")
    return arr


def as_vector(v, name="vector") -> np.ndarray:
    arr = np.array(v, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ContractError(f"{name}: entries must be finite")
    return arr


def default_tol(shape) -> float:
    return max(shape) * EPS if len(shape) else EPS


@dataclass(frozen=True)
class SvdFactorization:
    """Full SVD ``A = left @ lam @ right`` with orthogonal `left` and `right`.

    `lam` holds the singular values themselves on its leading diagonal (so
    ``lam @ lam.T`` restricted to the leading block is the diagonal of
    squared singular values). Values at or below the rank threshold are
    stored as exact zeros.
    """

    left: np.ndarray
    lam: np.ndarray
    right: np.ndarray
    rank: int

    @property
    def singular_values(self) -> np.ndarray:
        k = min(self.lam.shape)
        return np.diag(self.lam)[:k].copy()

    @property
    def shape(self):
        return self.lam.shape

    def reconstruct(self) -> np.ndarray:
        return self.left @ self.lam @ self.right


def svd_factor(a, tol: float = 0.0) -> SvdFactorization:
    """Full singular value decomposition with numerical rank.

    Parameters
    ----------
    a : array_like, shape (m, n)
        Finite real matrix.
    tol : float
        Relative rank threshold. ``0`` selects ``max(m, n) * eps``.

    Raises
    ------
    NumericalError
        If LAPACK fails to converge.
    """
    A = as_matrix(a)
    m, n = A.shape
    if tol < 0:
        raise ContractError("tol must be nonnegative")
    if A.size == 0:
        return SvdFactorization(np.eye(m), np.zeros((m, n)), np.eye(n), 0)
    try:
        u, s, vt = np.linalg.svd(A, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc
    if not np.all(np.isfinite(s)):
        raise NumericalError("SVD produced non-finite singular values")
    thresh = (tol or default_tol(A.shape)) * (s[0] if s.size else 0.0)
    r = int(np.sum(s > thresh))
    lam = np.zeros((m, n))
    lam[np.arange(r), np.arange(r)] = s[:r]
    return SvdFactorization(u, lam, vt, r)


def pinv(a, tol: float = 0.0) -> np.ndarray:
    """Moore-Penrose pseudoinverse; singular values below threshold are zeroed."""
    f = svd_factor(a, tol)
    m, n = f.shape
    r = f.rank
    s = f.singular_values[:r]
    # A+ = R' Lam+ L'
    return (f.right[:r].T / s) @ f.left[:, :r].T if r else np.zeros((n, m))


def rank(a, tol: float = 0.0) -> int:
    return svd_factor(a, tol).rank


def eig_sym(a):
    """Eigenpairs of a symmetric matrix, eigenvalues in non-increasing order.

    The input is symmetrized as ``(A + A.T) / 2`` first, so roundoff-level
    asymmetry is tolerated.
    """
    A = as_matrix(a)
    if A.shape[0] != A.shape[1]:
        raise ContractError(f"eig_sym needs a square matrix, got {A.shape}")
    A = 0.5 * (A + A.T)
    try:
        w, v = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigh did not converge: {exc}") from exc
    return w[::-1].copy(), v[:, ::-1].copy()


def solve_spd(a, b) -> np.ndarray:
    """Solve ``A x = b`` for symmetric positive definite `A` by Cholesky."""
    A = as_matrix(a)
    if A.shape[0] != A.shape[1]:
        raise ContractError(f"solve_spd needs a square matrix, got {A.shape}")
    B = np.asarray(b, dtype=float)
    if B.shape[0] != A.shape[0]:
        raise ContractError("right-hand side does not conform")
    try:
        c = scipy.linalg.cho_factor(0.5 * (A + A.T), check_finite=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"matrix is not positive definite: {exc}") from exc
    return scipy.linalg.cho_solve(c, B)


def is_psd(a, tol: float = 1e-10) -> bool:
    w, _ = eig_sym(a)
    scale = max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0
    return bool(w.size == 0 or w[-1] >= -tol * scale)


def is_pd(a, tol: float = 0.0) -> bool:
    A = as_matrix(a)
    if A.size == 0:
        return True
    w, _ = eig_sym(A)
    thresh = (tol or default_tol(A.shape)) * max(abs(w[0]), abs(w[-1]))
    return bool(w[-1] > thresh)
