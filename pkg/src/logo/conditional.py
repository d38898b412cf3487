"""Regression and conditional statistics from a fitted precision matrix.

Splitting the variables into an observed block X1 ("past") and a block to
infer X2 ("future"), the precision matrix gives the regression
coefficients beta = -J22^-1 J21 and the conditional covariance J22^-1
directly; with a sparse J only the variables adjacent to the future block
enter the prediction.  Variables outside both blocks are marginalized out
first, which leaves bipartite splits (the common case) untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SparsePrecision
from .errors import DimensionMismatch
from .linalg import (
    SymMatrix,
    cholesky_dense,
    invert_spd_dense,
    logdet_dense,
    solve_with_factor,
)


@dataclass(frozen=True)
class BlockSplit:
    """Disjoint index sets for conditioning: observed past, inferred future.

    ``past`` may be empty (pure marginalization onto the future block);
    regression fitting additionally requires it to be nonempty.
    """

    past: tuple
    future: tuple

    def __post_init__(self):
        past = tuple(int(v) for v in self.past)
        future = tuple(int(v) for v in self.future)
        if not future:
            raise ValueError("future block is empty")
        if len(set(past)) != len(past) or len(set(future)) != len(future):
            raise ValueError("duplicate indices within a block")
        if set(past) & set(future):
            raise ValueError("past and future blocks overlap")
        if min((*past, *future)) < 0:
            raise DimensionMismatch("negative variable index")
        object.__setattr__(self, "past", past)
        object.__setattr__(self, "future", future)

    def validate_against(self, p: int):
        if max((*self.past, *self.future)) >= p:
            raise DimensionMismatch(f"split indexes beyond {p} variables")


@dataclass(frozen=True)
class RegressionModel:
    """Linear predictor of the future block from the past block.

    ``beta`` is |future| x |past|; ``j22`` is the future-block precision
    after marginalizing unused variables, so J22 beta = -J21 and the
    conditional covariance is its inverse.
    """

    beta: np.ndarray
    split: BlockSplit
    j22: SymMatrix


def _marginal_precision(model: SparsePrecision, keep) -> np.ndarray:
    """Precision of the marginal distribution on ``keep``, in keep order.

    Schur complement J_kk - J_ko J_oo^-1 J_ok; a no-op when ``keep``
    covers all variables.
    """
    dense = model.to_dense()
    keep = np.asarray(keep, dtype=int)
    if keep.size == model.p:
        return dense[np.ix_(keep, keep)]
    out = np.setdiff1d(np.arange(model.p), keep)
    j_kk = dense[np.ix_(keep, keep)]
    j_ko = dense[np.ix_(keep, out)]
    l_oo = cholesky_dense(dense[np.ix_(out, out)], label="marginalized block")
    return j_kk - j_ko @ solve_with_factor(l_oo, j_ko.T)


def fit_regression(model: SparsePrecision, split: BlockSplit) -> RegressionModel:
    """Solve J22 beta = -J21 column-wise for the predictive coefficients."""
    split.validate_against(model.p)
    if not split.past:
        raise ValueError("regression needs a nonempty past block")
    keep = (*split.past, *split.future)
    jm = _marginal_precision(model, keep)
    p1 = len(split.past)
    j21 = jm[p1:, :p1]
    j22 = jm[p1:, p1:]
    l22 = cholesky_dense(j22, label="future-block precision")
    beta = -solve_with_factor(l22, j21)
    if beta.ndim == 1:
        beta = beta.reshape(len(split.future), p1)
    return RegressionModel(beta=beta, split=split, j22=SymMatrix.from_dense(j22))


def predict(reg: RegressionModel, x1, means) -> np.ndarray:
    """Conditional mean of the future block given observed past values.

    mu_2 + beta (x1 - mu_1), with the block means looked up from the full
    ``means`` vector.
    """
    x1 = np.asarray(x1, dtype=float)
    means = np.asarray(means, dtype=float)
    if x1.shape != (len(reg.split.past),):
        raise DimensionMismatch(
            f"x1 has shape {x1.shape}, expected ({len(reg.split.past)},)"
        )
    mu1 = means[list(reg.split.past)]
    mu2 = means[list(reg.split.future)]
    return mu2 + reg.beta @ (x1 - mu1)


def conditional_covariance(model: SparsePrecision, split: BlockSplit) -> SymMatrix:
    """Covariance of the future block given the past block: J22^-1.

    With an empty past block this is the marginal covariance of the
    future variables (for the full variable set, the model covariance).
    """
    split.validate_against(model.p)
    keep = (*split.past, *split.future)
    jm = _marginal_precision(model, keep)
    p1 = len(split.past)
    j22 = jm[p1:, p1:]
    return SymMatrix.from_dense(
        invert_spd_dense(j22, label="future-block precision")
    )


def explained_logdet_gain(
    model: SparsePrecision, future, base_past, extra_past
) -> float:
    """Log-determinant reduction of the conditional covariance when the
    conditioning set grows from base_past to base_past + extra_past.

    ln det Cov(future | base) - ln det Cov(future | base + extra); zero
    when the extra variables carry no additional information.
    """
    base = BlockSplit(past=tuple(base_past), future=tuple(future))
    wide = BlockSplit(
        past=tuple(base_past) + tuple(extra_past), future=tuple(future)
    )
    cov_base = conditional_covariance(model, base)
    cov_wide = conditional_covariance(model, wide)
    return logdet_dense(cov_base.to_dense(), label="conditional covariance") - logdet_dense(cov_wide.to_dense(), label="conditional covariance")
