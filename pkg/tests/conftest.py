import numpy as np
import pytest

from logo.estimators import CovariancePair, ObservationMatrix, estimate
from logo.linalg import SymMatrix


def pair_from_dense(cov, n_obs=1000):
    """Wrap a dense covariance as a CovariancePair without touching data."""
    cov = np.asarray(cov, dtype=float)
    variances = np.diag(cov).copy()
    d = 1.0 / np.sqrt(variances)
    corr = cov * np.outer(d, d)
    np.fill_diagonal(corr, 1.0)
    return CovariancePair(
        cov=SymMatrix.from_dense(cov),
        corr=SymMatrix.from_dense(corr),
        variances=variances,
        means=np.zeros(cov.shape[0]),
        n_obs=n_obs,
    )


def random_obs(rng, p, q, n_factors=3):
    b = rng.standard_normal((p, n_factors))
    x = rng.standard_normal((q, n_factors)) @ b.T + rng.standard_normal((q, p))
    names = tuple(f"v{i:03d}" for i in range(p))
    return ObservationMatrix(names, x)


def random_pair(rng, p, q, n_factors=3):
    return estimate(random_obs(rng, p, q, n_factors))


@pytest.fixture
def chain_pair():
    """AR(1)-style 3-variable chain with lag-one correlation 0.5.

    The precision of the 0-1-2 path model has a hand-checkable closed form:
    J = [[4/3, -2/3, 0], [-2/3, 5/3, -2/3], [0, -2/3, 4/3]].
    """
    cov = np.array([[1.0, 0.5, 0.25], [0.5, 1.0, 0.5], [0.25, 0.5, 1.0]])
    return pair_from_dense(cov)


@pytest.fixture
def two_clique_pair():
    """Population covariance of a decomposable model with cliques
    {0,1,2,3} and {1,2,3,4} glued on separator {1,2,3} (within-corr 0.6)."""
    r = np.full((5, 5), 0.6)
    np.fill_diagonal(r, 1.0)
    r[0, 4] = r[4, 0] = 0.36 * 3 / (1 + 2 * 0.6)
    return pair_from_dense(r)
