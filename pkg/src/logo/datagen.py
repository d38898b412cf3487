"""Synthetic observation panels: factor models and GMRF sampling.

All randomness flows through counter-based Philox generators keyed by a
seed plus an integer path, so Monte Carlo cells can draw from independent
streams in any order (or in parallel) and still reproduce bit-identically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .core import SparsePrecision
from .errors import InsufficientData
from .estimators import ObservationMatrix, standardize_columns
from .linalg import cholesky_dense


def derive_rng(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for the stream addressed by (seed, path)."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(v) for v in path))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, *path: int) -> int:
    """Stable integer sub-seed for components that take a seed, not a stream."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(v) for v in path))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _column_names(p: int) -> tuple:
    width = max(3, len(str(p - 1)))
    return tuple(f"v{i:0{width}d}" for i in range(p))


@dataclass(frozen=True)
class FactorModelSpec:
    """Linear factor panel: X_t = B f_t + eps_t.

    B is p x n_factors with standard-normal entries scaled by
    loading_scale; factors and noise are independent standard normals,
    noise scaled to the requested variance.  With ``standardize`` set the
    columns are rescaled to unit sample variance, which anchors the
    disconnected-model likelihood at -(p/2)(1 + ln 2pi).
    """

    p: int
    n_factors: int
    loading_scale: float = 1.0
    noise_variance: float = 1.0
    standardize: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.p < 2:
            raise ValueError(f"need p >= 2, got {self.p}")
        if self.n_factors < 1:
            raise ValueError(f"need at least one factor, got {self.n_factors}")
        if self.noise_variance <= 0:
            raise ValueError("noise variance must be positive")


def gen_factor_model(spec: FactorModelSpec, q: int) -> ObservationMatrix:
    """Draw q rows from the factor model; bit-identical under (spec, q)."""
    if q < 2:
        raise InsufficientData(f"need q >= 2 rows, got {q}")
    rng = derive_rng(spec.seed)
    loadings = spec.loading_scale * rng.standard_normal((spec.p, spec.n_factors))
    factors = rng.standard_normal((q, spec.n_factors))
    noise = np.sqrt(spec.noise_variance) * rng.standard_normal((q, spec.p))
    obs = ObservationMatrix(_column_names(spec.p), factors @ loadings.T + noise)
    if spec.standardize:
        obs = standardize_columns(obs)
    return obs


def sample_gmrf(model: SparsePrecision, q: int, seed: int) -> ObservationMatrix:
    """q independent draws from N(mean, J^-1).

    Uses the Cholesky factor of J: solving L^T x = u with standard-normal
    u gives Cov(x) = J^-1 exactly.
    """
    if q < 1:
        raise InsufficientData(f"need q >= 1 rows, got {q}")
    l = cholesky_dense(model.to_dense(), label="precision")
    rng = derive_rng(seed)
    u = rng.standard_normal((model.p, q))
    x = solve_triangular(l.T, u, lower=False)
    return ObservationMatrix(_column_names(model.p), x.T + model.mean)
