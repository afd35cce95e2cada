"""Dense real-matrix decomposition kernels.

All higher-level solvers consume these wrappers instead of calling
numpy/scipy directly, so conventions (sign of R's diagonal, eigenvalue
ordering, rank tolerances) are fixed in one place.  Every function is pure
and safe to call concurrently.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import (
    AsymmetricMatrixError,
    DimensionError,
    NotPositiveDefiniteError,
    SingularTriangularError,
)

__all__ = [
    "QrFactors",
    "SpectralFactors",
    "CholeskyFactor",
    "CodFactors",
    "as_matrix",
    "default_rank_tol",
    "qr_decompose",
    "spectral_decompose",
    "cholesky",
    "complete_orthogonal_decompose",
    "numeric_rank",
    "solve_triangular",
    "symmetrize",
]

SYMMETRY_RTOL = 1e-10


def as_matrix(a) -> np.ndarray:
    """Coerce input to a 2-D float64 array and reject non-finite entries."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains NaN or Inf entries")
    return m


def symmetrize(a: np.ndarray) -> np.ndarray:
    """Return (a + a^T) / 2."""
    return 0.5 * (a + a.T)


def default_rank_tol(a: np.ndarray) -> float:
    """Default relative rank tolerance: 1e-10 * max(m, n).

    ``numeric_rank`` multiplies this by the largest singular value, so the
    effective absolute threshold is 1e-10 * sigma_max * max(m, n).
    """
    m, n = a.shape
    return 1e-10 * max(m, n, 1)


@dataclass(frozen=True)
class QrFactors:
    """QR factorization a = q @ r with q (m, m) orthonormal, r (m, n) upper
    triangular with nonnegative diagonal."""

    q: np.ndarray
    r: np.ndarray

    @property
    def leading_block(self) -> np.ndarray:
        """Top n-by-n block of r (nonsingular when the input has full column rank)."""
        n = self.r.shape[1]
        return self.r[:n, :]


@dataclass(frozen=True)
class SpectralFactors:
    """Eigendecomposition a = u @ diag(eigenvalues) @ u.T, eigenvalues descending."""

    u: np.ndarray
    eigenvalues: np.ndarray


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower triangular l with positive diagonal such that l @ l.T = a."""

    l: np.ndarray


@dataclass(frozen=True)
class CodFactors:
    """Complete orthogonal decomposition a = u @ [[r_block, 0], [0, 0]] @ v.T.

    u (m, m) and v (n, n) are orthonormal; r_block is rank-by-rank upper
    triangular and nonsingular.
    """

    u: np.ndarray
    r_block: np.ndarray
    v: np.ndarray
    rank: int


def qr_decompose(a) -> QrFactors:
    """QR factorization with the nonnegative-diagonal sign convention.

    Parameters
    ----------
    a : (m, n) array_like with m >= n.

    Returns
    -------
    QrFactors
        Full factors: q is m-by-m, r is m-by-n.

    Raises
    ------
    DimensionError
        If the input has fewer rows than columns.
    """
    a = as_matrix(a)
    m, n = a.shape
    if m < n:
        raise DimensionError(f"qr_decompose requires rows >= cols, got {m}x{n}")
    q, r = np.linalg.qr(a, mode="complete")
    # Fix signs so diag(r) >= 0, making the factors deterministic.
    for i in range(n):
        if r[i, i] < 0.0:
            r[i, i:] = -r[i, i:]
            q[:, i] = -q[:, i]
    return QrFactors(q=q, r=r)


def spectral_decompose(a) -> SpectralFactors:
    """Eigendecomposition of a symmetric matrix, eigenvalues sorted descending.

    The input is symmetrized as (a + a^T)/2 before decomposing; asymmetry
    beyond ``SYMMETRY_RTOL * ||a||_F`` is an error rather than a silent fix.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"spectral_decompose requires a square matrix, got {a.shape}")
    nrm = np.linalg.norm(a)
    if nrm > 0.0 and np.linalg.norm(a - a.T) > SYMMETRY_RTOL * nrm:
        raise AsymmetricMatrixError(
            "matrix is asymmetric beyond tolerance; symmetrize it explicitly first"
        )
    w, u = np.linalg.eigh(symmetrize(a))
    return SpectralFactors(u=u[:, ::-1].copy(), eigenvalues=w[::-1].copy())


def cholesky(a) -> CholeskyFactor:
    """Cholesky factor l (lower triangular) of a symmetric positive definite matrix.

    Raises
    ------
    NotPositiveDefiniteError
        If a pivot <= 0 is encountered, i.e. the input is not SPD.
    """
    a = as_matrix(a)
    try:
        l = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(f"matrix is not positive definite: {exc}") from exc
    return CholeskyFactor(l=l)


def numeric_rank(a, rank_tol: float | None = None) -> int:
    """Count singular values above ``rank_tol * sigma_max``.

    ``rank_tol`` defaults to :func:`default_rank_tol`.
    """
    a = as_matrix(a)
    if rank_tol is None:
        rank_tol = default_rank_tol(a)
    if rank_tol <= 0.0:
        raise ValueError("rank_tol must be positive")
    if min(a.shape) == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rank_tol * s[0]))


def complete_orthogonal_decompose(a, rank_tol: float | None = None) -> CodFactors:
    """Complete orthogonal decomposition a = u [[R, 0], [0, 0]] v^T.

    Built as QR with column pivoting followed by an orthogonal reduction of
    the leading rows, so R comes out upper triangular.  The rank is decided
    by :func:`numeric_rank` (singular-value test), not by the pivoted-QR
    diagonal.
    """
    a = as_matrix(a)
    m, n = a.shape
    r = numeric_rank(a, rank_tol)
    if r == 0:
        return CodFactors(u=np.eye(m), r_block=np.zeros((0, 0)), v=np.eye(n), rank=0)
    q, rr, piv = sla.qr(a, mode="full", pivoting=True)
    p = np.eye(n)[:, piv]  # a @ p = q @ rr
    top = rr[:r, :]  # full row rank r-by-n
    # Reduce [T1 T2] -> [T 0] Z^T with T upper triangular, via the flip trick:
    # QR of the row/column-reversed transpose yields the triangle in the
    # right corner.
    jt = top[::-1, :].T[::-1, :]  # reverse rows of top, transpose, reverse rows
    zt, ct = np.linalg.qr(jt, mode="complete")
    t = ct[:r, :].T[::-1, ::-1]  # upper triangular r-by-r
    z = zt[::-1, :].copy()
    z[:, :r] = z[:, :r][:, ::-1]
    # Now top = [t, 0] @ z.T and v = p @ z.
    v = p @ z
    # Deterministic signs: make diag(t) nonnegative by flipping rows of t and
    # the matching columns of u.
    u = q.copy()
    for i in range(r):
        if t[i, i] < 0.0:
            t[i, i:] = -t[i, i:]
            u[:, i] = -u[:, i]
    return CodFactors(u=u, r_block=t, v=v, rank=r)


def solve_triangular(factor, rhs, lower: bool = True, trans: bool = False) -> np.ndarray:
    """Solve factor @ x = rhs (or factor.T @ x = rhs with ``trans``).

    Raises
    ------
    SingularTriangularError
        On a zero diagonal entry.
    """
    factor = as_matrix(factor)
    rhs = np.asarray(rhs, dtype=np.float64)
    if np.any(np.diag(factor) == 0.0):
        raise SingularTriangularError("triangular factor has a zero diagonal entry")
    return sla.solve_triangular(factor, rhs, lower=lower, trans=1 if trans else 0)
