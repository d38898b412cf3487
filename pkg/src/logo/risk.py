"""Conditioning on linear constraints: loss allocation and stress scenarios.

Given a fitted precision model and hard constraints A X = z (for example a
fixed portfolio loss w.X = L), the conditional mean allocates the
constraint value across variables and the conditional covariance
quantifies the residual uncertainty.  Products with the implied
covariance are always computed as solves against J, never by inverting it
for the mean path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SparsePrecision
from .errors import (
    DimensionMismatch,
    NotPositiveDefinite,
    RankDeficientConstraint,
)
from .estimators import CovariancePair
from .graphs import CliqueTree
from .linalg import SymMatrix, cholesky_dense, invert_spd_dense, solve_with_factor


@dataclass(frozen=True)
class LinearConstraint:
    """k hard linear restrictions A X = z, with k much smaller than p.

    The single-row case is a portfolio: A = holdings, z = observed loss.
    """

    a: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a, dtype=float))
        z = np.atleast_1d(np.asarray(self.z, dtype=float))
        if a.ndim != 2:
            raise DimensionMismatch(f"constraint matrix must be 2-d, got {a.shape}")
        if z.shape != (a.shape[0],):
            raise DimensionMismatch(
                f"{a.shape[0]} constraint rows but {z.shape} values"
            )
        if a.shape[0] < 1:
            raise ValueError("need at least one constraint row")
        if a.shape[0] > a.shape[1]:
            raise RankDeficientConstraint(
                f"{a.shape[0]} constraints on {a.shape[1]} variables"
            )
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(z))):
            raise ValueError("constraint contains non-finite entries")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "z", z)

    @property
    def k(self) -> int:
        return self.a.shape[0]

    @property
    def p(self) -> int:
        return self.a.shape[1]

    @classmethod
    def portfolio(cls, weights, loss: float) -> "LinearConstraint":
        """k=1 shorthand: holdings vector and observed portfolio value."""
        return cls(a=np.asarray(weights, dtype=float).reshape(1, -1),
                   z=np.array([float(loss)]))

    @classmethod
    def from_dict(cls, d: dict) -> "LinearConstraint":
        """Accepts {"A": [[...]], "z": [...]} or {"weights": [...], "loss": L}."""
        if "weights" in d:
            return cls.portfolio(d["weights"], d["loss"])
        return cls(a=np.asarray(d["A"], dtype=float),
                   z=np.asarray(d["z"], dtype=float))


@dataclass(frozen=True)
class ScenarioResult:
    """Conditional distribution under the constraints.

    ``cond_cov`` has rank at most p - k: the constraint directions carry
    no residual variance and A cond_mean = z exactly.
    """

    cond_mean: np.ndarray
    cond_cov: SymMatrix

    def to_dict(self) -> dict:
        return {
            "cond_mean": self.cond_mean.tolist(),
            "cond_cov": self.cond_cov.to_dense().tolist(),
        }


def _sigma_at(model: SparsePrecision, constraint: LinearConstraint):
    """Sigma A^T via k solves against J, and the k x k Gram matrix A Sigma A^T."""
    if constraint.p != model.p:
        raise DimensionMismatch(
            f"constraint is over {constraint.p} variables, model has {model.p}"
        )
    l = cholesky_dense(model.to_dense(), label="precision")
    sigma_at = solve_with_factor(l, constraint.a.T)
    if sigma_at.ndim == 1:
        sigma_at = sigma_at.reshape(model.p, 1)
    gram = constraint.a @ sigma_at
    gram = 0.5 * (gram + gram.T)
    return sigma_at, gram


def _gram_factor(gram: np.ndarray):
    try:
        return cholesky_dense(gram, label="constraint Gram matrix")
    except NotPositiveDefinite as err:
        raise RankDeficientConstraint(
            "constraint rows are linearly dependent"
        ) from err


def constrained_mean(
    model: SparsePrecision, constraint: LinearConstraint
) -> np.ndarray:
    """Zero-mean conditional expectation Sigma A^T (A Sigma A^T)^-1 z.

    Uses the centered-variable convention: for a model with nonzero mean,
    condition A (X - mu) = z - A mu and add mu back (see run_scenario).
    """
    sigma_at, gram = _sigma_at(model, constraint)
    lg = _gram_factor(gram)
    return sigma_at @ solve_with_factor(lg, constraint.z)


def constrained_covariance(
    model: SparsePrecision, constraint: LinearConstraint
) -> SymMatrix:
    """Conditional covariance Sigma - Sigma A^T (A Sigma A^T)^-1 A Sigma."""
    sigma_at, gram = _sigma_at(model, constraint)
    lg = _gram_factor(gram)
    sigma = invert_spd_dense(model.to_dense(), label="precision")
    reduction = sigma_at @ solve_with_factor(lg, sigma_at.T)
    return SymMatrix.from_dense(sigma - reduction, rtol=1e-7)


def run_scenario(
    model: SparsePrecision, constraint: LinearConstraint
) -> ScenarioResult:
    """Full conditional distribution with the model mean restored.

    cond_mean = mu + Sigma A^T (A Sigma A^T)^-1 (z - A mu).
    """
    centered = LinearConstraint(
        a=constraint.a, z=constraint.z - constraint.a @ model.mean
    )
    mean = model.mean + constrained_mean(model, centered)
    cov = constrained_covariance(model, constraint)
    return ScenarioResult(cond_mean=mean, cond_cov=cov)


def portfolio_moments(model: SparsePrecision, weights) -> tuple:
    """(mean, variance) of w.X without materializing the covariance.

    The variance w Sigma w is one solve against J.
    """
    w = np.asarray(weights, dtype=float)
    if w.shape != (model.p,):
        raise DimensionMismatch(f"weights have shape {w.shape}, expected ({model.p},)")
    l = cholesky_dense(model.to_dense(), label="precision")
    variance = float(w @ solve_with_factor(l, w))
    return float(w @ model.mean), variance


def decomposed_matvec(tree: CliqueTree, cov: CovariancePair, v) -> np.ndarray:
    """J v accumulated block-wise, without assembling J.

    Adds each clique contribution (Sigma_C^-1 v_C scattered at the clique
    positions) and subtracts (k-1)-weighted separator contributions, in
    the same deterministic order as the assembly, so the result matches
    the assembled mat-vec to machine precision.
    """
    from .core import _check_observation_count

    v = np.asarray(v, dtype=float)
    if cov.p != tree.p:
        raise DimensionMismatch(f"covariance is {cov.p}-dim, tree is {tree.p}-dim")
    if v.shape != (tree.p,):
        raise DimensionMismatch(f"vector has shape {v.shape}, expected ({tree.p},)")
    _check_observation_count(tree, cov)
    dense_cov = cov.cov.to_dense()
    out = np.zeros(tree.p)
    for c in tree.cliques:
        idx = list(c)
        block = invert_spd_dense(dense_cov[np.ix_(idx, idx)], label=f"clique {c}")
        out[idx] += block @ v[idx]
    for s, k in tree.separators:
        idx = list(s)
        block = invert_spd_dense(dense_cov[np.ix_(idx, idx)], label=f"separator {s}")
        out[idx] -= (k - 1.0) * (block @ v[idx])
    return out
