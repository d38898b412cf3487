"""Empirical covariance and correlation estimation from observation panels.

Covariances use the maximum-likelihood 1/q normalization (not 1/(q-1)); the
decomposed-model trace identity holds exactly only under that convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InsufficientData, ZeroVariance
from .linalg import SymMatrix


@dataclass(frozen=True)
class ObservationMatrix:
    """q x p observation panel; one column per named variable.

    Rows are time points (or generic samples), columns are variables in
    the same units as the raw data (e.g. log-returns).
    """

    names: tuple
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        names = tuple(str(n) for n in self.names)
        if data.ndim != 2:
            raise DimensionMismatch(f"observations must be 2-d, got {data.shape}")
        q, p = data.shape
        # q=1 panels are legal containers (e.g. a single synthetic draw);
        # estimation itself requires q >= 2 and guards separately.
        if q < 1 or p < 2:
            raise InsufficientData(f"need q >= 1 and p >= 2, got {q} x {p}")
        if len(names) != p:
            raise DimensionMismatch(f"{len(names)} names for {p} columns")
        if len(set(names)) != p:
            raise ValueError("variable names must be unique")
        if not np.all(np.isfinite(data)):
            raise ValueError("observations contain non-finite entries")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "names", names)

    @property
    def q(self) -> int:
        return self.data.shape[0]

    @property
    def p(self) -> int:
        return self.data.shape[1]

    def select_columns(self, idx) -> "ObservationMatrix":
        idx = np.asarray(idx, dtype=int)
        return ObservationMatrix(
            tuple(self.names[i] for i in idx), self.data[:, idx]
        )

    def select_rows(self, idx) -> "ObservationMatrix":
        idx = np.asarray(idx, dtype=int)
        return ObservationMatrix(self.names, self.data[idx, :])


@dataclass(frozen=True)
class CovariancePair:
    """Empirical covariance and correlation with their building blocks.

    ``n_obs`` records how many observations produced the estimate; the
    assembly step uses it to refuse covariance blocks that are structurally
    singular (fewer observations than clique size + 1).
    """

    cov: SymMatrix
    corr: SymMatrix
    variances: np.ndarray
    means: np.ndarray
    n_obs: int

    @property
    def p(self) -> int:
        return self.cov.dim


def estimate(obs: ObservationMatrix) -> CovariancePair:
    """Empirical covariance/correlation of an observation panel.

    cov_ij = (1/q) sum_t (x_it - mean_i)(x_jt - mean_j); the correlation is
    the diagonal rescaling of cov.  Raises ZeroVariance for constant columns.
    """
    if obs.q < 2:
        raise InsufficientData(f"estimation needs q >= 2, got {obs.q}")
    x = obs.data
    q = obs.q
    means = x.mean(axis=0)
    xc = x - means
    cov = (xc.T @ xc) / q
    variances = cov.diagonal().copy()
    for i, v in enumerate(variances):
        if v <= 0.0:
            raise ZeroVariance(i, obs.names[i])
    sd = np.sqrt(variances)
    corr = cov / np.outer(sd, sd)
    corr = np.clip(corr, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return CovariancePair(
        cov=SymMatrix.from_dense(cov),
        corr=SymMatrix.from_dense(corr),
        variances=variances,
        means=means,
        n_obs=q,
    )


def standardize_columns(obs: ObservationMatrix) -> ObservationMatrix:
    """Center each column and scale it to unit sample variance (ddof=1)."""
    if obs.q < 2:
        raise InsufficientData("standardization needs at least 2 rows")
    x = obs.data
    means = x.mean(axis=0)
    xc = x - means
    sd = xc.std(axis=0, ddof=1)
    for i, s in enumerate(sd):
        if s <= 0.0:
            raise ZeroVariance(i, obs.names[i])
    return ObservationMatrix(obs.names, xc / sd)


def shuffle_stationarize(obs: ObservationMatrix, seed: int) -> ObservationMatrix:
    """Destroy serial structure by permuting rows with a seeded uniform draw.

    The same permutation applies to every column, so contemporaneous
    (cross-sectional) dependence is preserved.
    """
    if obs.q < 2:
        raise InsufficientData(f"shuffling needs q >= 2, got {obs.q}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(obs.q)
    return ObservationMatrix(obs.names, obs.data[perm, :])
