"""Dense symmetric-positive-definite kernels.

All symmetric matrices are carried as :class:`SymMatrix`, which stores only
the lower triangle so symmetry holds by construction.  The kernels target
small local blocks (clique and separator size) but are also used for the
full-matrix baselines and test oracles at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

from .errors import DimensionMismatch, NotPositiveDefinite

# Relative pivot tolerance: a Cholesky pivot <= PD_RTOL * max(diag) counts as
# not positive definite.  Relative, because absolute cutoffs break on
# financial-variance scales (~1e-4).
PD_RTOL = 1e-12


@dataclass(frozen=True)
class SymMatrix:
    """Symmetric matrix stored as the row-major lower triangle.

    Parameters
    ----------
    dim : int
        Matrix dimension (>= 1).
    tril : np.ndarray
        Lower-triangle entries in row-major order, length dim*(dim+1)//2:
        (0,0), (1,0), (1,1), (2,0), ...
    """

    dim: int
    tril: np.ndarray

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionMismatch(f"SymMatrix dim must be >= 1, got {self.dim}")
        data = np.asarray(self.tril, dtype=float)
        if data.shape != (self.dim * (self.dim + 1) // 2,):
            raise DimensionMismatch(
                f"lower triangle of dim {self.dim} needs "
                f"{self.dim * (self.dim + 1) // 2} entries, got {data.shape}"
            )
        if not np.all(np.isfinite(data)):
            raise ValueError("SymMatrix entries must be finite")
        object.__setattr__(self, "tril", data)

    @classmethod
    def from_dense(cls, a, rtol: float = 1e-8) -> "SymMatrix":
        """Build from a dense square array, verifying symmetry."""
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"expected square matrix, got shape {a.shape}")
        scale = np.max(np.abs(a)) if a.size else 0.0
        if scale > 0 and np.max(np.abs(a - a.T)) > rtol * scale:
            raise ValueError("matrix is not symmetric")
        n = a.shape[0]
        return cls(n, a[np.tril_indices(n)])

    def to_dense(self) -> np.ndarray:
        """Dense symmetric ndarray copy."""
        n = self.dim
        out = np.zeros((n, n))
        i, j = np.tril_indices(n)
        out[i, j] = self.tril
        out[j, i] = self.tril
        return out

    def submatrix(self, idx) -> "SymMatrix":
        """Restriction to the given vertex indices (in the given order)."""
        d = self.to_dense()
        idx = np.asarray(idx, dtype=int)
        return SymMatrix.from_dense(d[np.ix_(idx, idx)])

    def diagonal(self) -> np.ndarray:
        pos = np.arange(self.dim) * (np.arange(self.dim) + 3) // 2
        return self.tril[pos]

    @classmethod
    def identity(cls, dim: int) -> "SymMatrix":
        return cls.from_dense(np.eye(dim))


def _as_dense(m) -> np.ndarray:
    if isinstance(m, SymMatrix):
        return m.to_dense()
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected square matrix, got shape {a.shape}")
    return a


def cholesky_dense(a: np.ndarray, label: str | None = None) -> np.ndarray:
    """Lower Cholesky factor of a dense symmetric array.

    Raises NotPositiveDefinite with the 0-based index of the first pivot
    that is non-positive or below PD_RTOL * max(diag).
    """
    a = np.ascontiguousarray(a, dtype=float)
    n = a.shape[0]
    max_diag = float(np.max(a.diagonal())) if n else 0.0
    if max_diag <= 0.0:
        raise NotPositiveDefinite(int(np.argmax(a.diagonal() <= 0.0)), label)
    c, info = lapack.dpotrf(a, lower=1)
    if info > 0:
        raise NotPositiveDefinite(info - 1, label)
    if info < 0:
        raise ValueError(f"illegal argument {-info} to dpotrf")
    piv = c.diagonal() ** 2
    bad = piv <= PD_RTOL * max_diag
    if np.any(bad):
        raise NotPositiveDefinite(int(np.argmax(bad)), label)
    return np.tril(c)


def cholesky(m: SymMatrix) -> np.ndarray:
    """Lower triangular L with L @ L.T == m; errors if m is not PD."""
    return cholesky_dense(_as_dense(m))


def logdet_dense(a: np.ndarray, label: str | None = None) -> float:
    l = cholesky_dense(a, label)
    return float(2.0 * np.sum(np.log(l.diagonal())))


def logdet(m: SymMatrix) -> float:
    """ln det m for positive definite m, via the Cholesky factor."""
    return logdet_dense(_as_dense(m))


def invert_spd_dense(a: np.ndarray, label: str | None = None) -> np.ndarray:
    l = cholesky_dense(a, label)
    inv, info = lapack.dpotri(l, lower=1)
    if info != 0:
        raise NotPositiveDefinite(max(info - 1, 0), label)
    # dpotri fills only the lower triangle
    inv = np.tril(inv)
    return inv + np.tril(inv, -1).T


def invert_spd(m: SymMatrix) -> SymMatrix:
    """Inverse of a positive definite matrix."""
    return SymMatrix.from_dense(invert_spd_dense(_as_dense(m)))


def solve_spd_dense(a: np.ndarray, b: np.ndarray, label: str | None = None) -> np.ndarray:
    l = cholesky_dense(a, label)
    return solve_with_factor(l, b)


def solve_with_factor(l: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve (L L^T) x = b given a lower Cholesky factor."""
    b = np.asarray(b, dtype=float)
    rhs = b if b.ndim == 2 else b[:, None]
    if rhs.shape[0] != l.shape[0]:
        raise DimensionMismatch(
            f"rhs length {rhs.shape[0]} does not match dim {l.shape[0]}"
        )
    x, info = lapack.dpotrs(l, rhs, lower=1)
    if info != 0:
        raise ValueError(f"illegal argument {-info} to dpotrs")
    return x if b.ndim == 2 else x[:, 0]


def solve_spd(m: SymMatrix, b) -> np.ndarray:
    """Solve m x = b for positive definite m; b is a vector or matrix."""
    return solve_spd_dense(_as_dense(m), b)
