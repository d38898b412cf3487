"""Reference precision models: dense inverse, diagonal, ridge, MAX oracle.

These are the comparison points for the sparse decomposable models: the
dense inverse covariance (computable only when q > p), the fully
disconnected diagonal model, an l2-shrunk inverse selected by cross
validation, and the in-sample optimum obtained from the test set's own
inverse covariance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import LN_2PI, LikelihoodReport, SparsePrecision
from .errors import InsufficientData, ZeroVariance
from .estimators import CovariancePair, ObservationMatrix, estimate
from .linalg import invert_spd_dense, logdet_dense


@dataclass(frozen=True)
class RidgeConfig:
    """Shrinkage grid and fold count for cross-validated ridge inversion.

    ``lambda_grid`` must be strictly increasing; ties in the validation
    score resolve toward the smaller penalty.  ``fold_seed`` fixes the
    row-to-fold assignment so the selected penalty is reproducible.
    """

    lambda_grid: tuple
    folds: int = 2
    fold_seed: int = 0

    def __post_init__(self):
        grid = tuple(float(v) for v in self.lambda_grid)
        if not grid:
            raise ValueError("lambda grid is empty")
        if any(v <= 0 for v in grid):
            raise ValueError("lambda grid entries must be positive")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("lambda grid must be strictly increasing")
        if self.folds < 2:
            raise ValueError("need at least 2 folds")
        object.__setattr__(self, "lambda_grid", grid)


def default_ridge_config(variances, n_points: int = 20) -> RidgeConfig:
    """Log-spaced grid spanning [1e-4, 10] times the mean variance."""
    scale = float(np.mean(variances))
    grid = np.geomspace(1e-4 * scale, 10.0 * scale, n_points)
    return RidgeConfig(lambda_grid=tuple(grid))


def _full_lower(p: int):
    rows, cols = np.tril_indices(p)
    return rows, cols


def dense_precision(cov: CovariancePair) -> SparsePrecision:
    """J = inverse of the sample covariance; fails whenever it is singular.

    With the 1/q covariance convention this requires q > p, which is why
    the dense model drops out of comparisons at short windows.
    """
    j = invert_spd_dense(cov.cov.to_dense(), label="sample covariance")
    rows, cols = _full_lower(cov.p)
    return SparsePrecision(
        p=cov.p, mean=cov.means, rows=rows, cols=cols, vals=j[rows, cols],
        structure="dense",
    )


def null_precision(cov: CovariancePair) -> SparsePrecision:
    """Fully disconnected model: J = diag(1 / variance)."""
    if np.any(cov.variances <= 0):
        bad = int(np.argmax(cov.variances <= 0))
        raise ZeroVariance(bad)
    idx = np.arange(cov.p)
    return SparsePrecision(
        p=cov.p, mean=cov.means, rows=idx, cols=idx, vals=1.0 / cov.variances,
        structure="diagonal",
    )


def _penalized_score(cov_fit: np.ndarray, lam: float, cov_val: np.ndarray) -> float:
    """Validation per-observation log-likelihood of J = (cov_fit + lam I)^-1."""
    p = cov_fit.shape[0]
    shrunk = cov_fit + lam * np.eye(p)
    j = invert_spd_dense(shrunk, label="ridge-shrunk covariance")
    logdet_j = -logdet_dense(shrunk, label="ridge-shrunk covariance")
    trace = float(np.sum(cov_val * j))
    return 0.5 * (logdet_j - trace - p * LN_2PI)


def ridge_precision(train: ObservationMatrix, cfg: RidgeConfig) -> SparsePrecision:
    """J = (Sigma + lambda I)^-1 with lambda chosen by k-fold cross validation.

    Each fold scores every grid point by off-sample per-observation
    log-likelihood; the penalty with the best summed score wins, smaller
    lambda on ties.  Always computable, even at q < p.
    """
    if train.q < cfg.folds:
        raise InsufficientData(
            f"{train.q} observations cannot form {cfg.folds} folds"
        )
    perm = np.random.default_rng(cfg.fold_seed).permutation(train.q)
    folds = np.array_split(perm, cfg.folds)

    scores = np.zeros(len(cfg.lambda_grid))
    for fold in folds:
        mask = np.ones(train.q, dtype=bool)
        mask[fold] = False
        cov_fit = estimate(train.select_rows(np.flatnonzero(mask))).cov.to_dense()
        cov_val = estimate(train.select_rows(fold)).cov.to_dense()
        for gi, lam in enumerate(cfg.lambda_grid):
            scores[gi] += _penalized_score(cov_fit, lam, cov_val)

    best = float(cfg.lambda_grid[int(np.argmax(scores))])
    pair = estimate(train)
    j = invert_spd_dense(
        pair.cov.to_dense() + best * np.eye(pair.p), label="ridge-shrunk covariance"
    )
    rows, cols = _full_lower(pair.p)
    return SparsePrecision(
        p=pair.p, mean=pair.means, rows=rows, cols=cols, vals=j[rows, cols],
        structure="dense",
    )


def max_reference(test: CovariancePair, q_test: int | None = None) -> LikelihoodReport:
    """In-sample optimum: score the test set with its own inverse covariance.

    No model can beat this on the same test covariance; it is undefined
    (singular) whenever q_test <= p.
    """
    if q_test is None:
        q_test = test.n_obs
    logdet_sigma = logdet_dense(test.cov.to_dense(), label="test covariance")
    p = test.p
    per_obs = 0.5 * (-logdet_sigma - p - p * LN_2PI)
    return LikelihoodReport(
        per_obs_loglik=per_obs,
        logdet=-logdet_sigma,
        trace_term=float(p),
        n_params=p * (p + 1) // 2,
        total=per_obs * q_test,
    )


__all__ = [
    "RidgeConfig",
    "default_ridge_config",
    "dense_precision",
    "null_precision",
    "ridge_precision",
    "max_reference",
]
