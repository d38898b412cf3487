"""Parsimonious Gaussian graphical models from information filtering networks.

Build a sparse decomposable dependency structure (spanning tree or
triangulated maximally filtered graph) from observed data, invert it
locally clique by clique into a global sparse precision matrix, and use
the result for likelihood scoring, forecasting, stress scenarios and
synthetic sampling.
"""

__version__ = "0.1.0"

from .baselines import (
    RidgeConfig,
    default_ridge_config,
    dense_precision,
    max_reference,
    null_precision,
    ridge_precision,
)
from .conditional import (
    BlockSplit,
    RegressionModel,
    conditional_covariance,
    explained_logdet_gain,
    fit_regression,
    predict,
)
from .core import (
    LikelihoodReport,
    SparsePrecision,
    assemble_precision,
    log_likelihood,
    logdet_decomposed,
    mst_logdet_closed_form,
    partial_update,
    trace_product,
)
from .datagen import FactorModelSpec, derive_rng, derive_seed, gen_factor_model, sample_gmrf
from .errors import (
    DimensionMismatch,
    InsufficientData,
    LogoError,
    NotPositiveDefinite,
    RankDeficientConstraint,
    ZeroVariance,
)
from .estimators import (
    CovariancePair,
    ObservationMatrix,
    estimate,
    shuffle_stationarize,
    standardize_columns,
)
from .graphs import CliqueTree, build_mst, build_tmfg, seed_clique_search, validate_chordal
from .harness import (
    CsvSource,
    ExperimentPlan,
    FitReport,
    render_report,
    run_experiment,
    split_train_test,
)
from .io import read_observations, write_observations
from .linalg import SymMatrix, cholesky, invert_spd, logdet, solve_spd
from .risk import (
    LinearConstraint,
    ScenarioResult,
    constrained_covariance,
    constrained_mean,
    decomposed_matvec,
    portfolio_moments,
    run_scenario,
)

__all__ = [
    "__version__",
    "BlockSplit",
    "CliqueTree",
    "CovariancePair",
    "CsvSource",
    "DimensionMismatch",
    "ExperimentPlan",
    "FactorModelSpec",
    "FitReport",
    "InsufficientData",
    "LikelihoodReport",
    "LinearConstraint",
    "LogoError",
    "NotPositiveDefinite",
    "ObservationMatrix",
    "RankDeficientConstraint",
    "RegressionModel",
    "RidgeConfig",
    "ScenarioResult",
    "SparsePrecision",
    "SymMatrix",
    "ZeroVariance",
    "assemble_precision",
    "build_mst",
    "build_tmfg",
    "cholesky",
    "conditional_covariance",
    "constrained_covariance",
    "constrained_mean",
    "decomposed_matvec",
    "default_ridge_config",
    "dense_precision",
    "derive_rng",
    "derive_seed",
    "estimate",
    "explained_logdet_gain",
    "fit_regression",
    "gen_factor_model",
    "invert_spd",
    "log_likelihood",
    "logdet",
    "logdet_decomposed",
    "max_reference",
    "mst_logdet_closed_form",
    "null_precision",
    "partial_update",
    "portfolio_moments",
    "predict",
    "read_observations",
    "render_report",
    "ridge_precision",
    "run_experiment",
    "run_scenario",
    "sample_gmrf",
    "seed_clique_search",
    "shuffle_stationarize",
    "solve_spd",
    "split_train_test",
    "standardize_columns",
    "trace_product",
    "validate_chordal",
    "write_observations",
]
