"""Monte Carlo benchmark harness: protocol, aggregation, report CSV.

Each (window length, sample) cell draws a variable subset and disjoint
train/test windows, fits every requested model on the training window and
scores the per-observation log-likelihood on the test window.  Cells use
independent derived random streams, so the report is identical for any
worker count, and failures (singular models at short windows) are counted
per cell rather than aborting the sweep.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import baselines
from .core import assemble_precision, log_likelihood
from .datagen import FactorModelSpec, derive_rng, derive_seed, gen_factor_model
from .errors import InsufficientData, LogoError
from .estimators import ObservationMatrix, estimate, standardize_columns
from .graphs import build_mst, build_tmfg
from .io import read_observations

KNOWN_MODELS = ("tmfg", "mst", "dense", "null", "ridge", "max")


@dataclass(frozen=True)
class CsvSource:
    """Observation panel loaded from CSV.

    ``mode`` selects the split protocol: "shuffled" destroys serial
    structure before windowing, "sequential" keeps time order with the
    training window immediately preceding the test window.
    """

    path: str
    mode: str = "shuffled"
    standardize: bool = False

    def __post_init__(self):
        if self.mode not in ("shuffled", "sequential"):
            raise ValueError(f"unknown split mode {self.mode!r}")


@dataclass(frozen=True)
class ExperimentPlan:
    """Full description of one benchmark sweep.

    The plan seed drives every random choice (data generation, variable
    subsets, window placement, ridge folds) through derived streams; a
    FactorModelSpec generator has its own seed field replaced per cell.
    ``measure_time`` turns wall-clock timing off so two runs of the same
    plan produce byte-identical reports.
    """

    generator: object
    p_subset: int
    q_list: tuple
    n_samples: int = 100
    models: tuple = KNOWN_MODELS
    seed: int = 0
    measure_time: bool = True
    ridge_grid_points: int = 20

    def __post_init__(self):
        q_list = tuple(int(q) for q in self.q_list)
        if not q_list:
            raise ValueError("q_list is empty")
        if any(b <= a for a, b in zip(q_list, q_list[1:])):
            raise ValueError("q_list must be strictly ascending")
        if self.n_samples < 1:
            raise ValueError("need at least one sample")
        models = tuple(self.models)
        for name in models:
            if name not in KNOWN_MODELS and not name.startswith("external:"):
                raise ValueError(f"unknown model {name!r}")
        if not isinstance(self.generator, (FactorModelSpec, CsvSource)):
            raise ValueError("generator must be a FactorModelSpec or CsvSource")
        object.__setattr__(self, "q_list", q_list)
        object.__setattr__(self, "models", models)


@dataclass(frozen=True)
class FitReport:
    """Aggregated per-(model, window length) results.

    Statistics are over successful samples only; ``failures`` counts the
    model-and-data errors.  All-failed cells leave the statistics None.
    """

    model: str
    q: int
    mean_loglik: float | None
    std_loglik: float | None
    q05: float | None
    q95: float | None
    mean_nnz: float | None
    mean_seconds: float | None
    failures: int


def split_train_test(obs: ObservationMatrix, q: int, mode: str, seed: int):
    """Two disjoint q-row windows: (train, test).

    Shuffled mode permutes rows first (stationarization) and takes the
    first two blocks of the permutation; sequential mode picks a seeded
    test window and uses the q rows before it for training.
    """
    if 2 * q > obs.q:
        raise InsufficientData(f"need 2q = {2 * q} rows, panel has {obs.q}")
    rng = np.random.default_rng(seed)
    if mode == "shuffled":
        perm = rng.permutation(obs.q)
        return obs.select_rows(perm[:q]), obs.select_rows(perm[q : 2 * q])
    if mode == "sequential":
        start = int(rng.integers(q, obs.q - q + 1))
        train = obs.select_rows(np.arange(start - q, start))
        test = obs.select_rows(np.arange(start, start + q))
        return train, test
    raise ValueError(f"unknown split mode {mode!r}")


def _score_model(name: str, train_obs, train_pair, test_pair, ridge_cfg, external):
    """(per_obs_loglik, nnz) for one model on one cell."""
    if name == "tmfg":
        prec = assemble_precision(build_tmfg(train_pair.corr), train_pair)
    elif name == "mst":
        prec = assemble_precision(
            build_mst(train_pair.corr, train_pair.variances), train_pair
        )
    elif name == "dense":
        prec = baselines.dense_precision(train_pair)
    elif name == "null":
        prec = baselines.null_precision(train_pair)
    elif name == "ridge":
        prec = baselines.ridge_precision(train_obs, ridge_cfg)
    elif name == "max":
        report = baselines.max_reference(test_pair)
        return report.per_obs_loglik, test_pair.p * (test_pair.p - 1) / 2
    else:
        prec = external[name]
    report = log_likelihood(prec, test_pair)
    return report.per_obs_loglik, float(prec.n_offdiag)


def _run_cell(plan: ExperimentPlan, qi: int, si: int, panel, external):
    """Fit and score every model on one (q, sample) cell."""
    q = plan.q_list[qi]
    if isinstance(plan.generator, FactorModelSpec):
        spec = replace(plan.generator, seed=derive_seed(plan.seed, qi, si, 0))
        obs = gen_factor_model(spec, 2 * q)
    else:
        obs = panel

    if obs.p > plan.p_subset:
        subset_rng = derive_rng(plan.seed, qi, si, 1)
        cols = np.sort(subset_rng.choice(obs.p, plan.p_subset, replace=False))
        obs = obs.select_columns(cols)

    results = {}
    try:
        mode = plan.generator.mode if isinstance(plan.generator, CsvSource) else "shuffled"
        train_obs, test_obs = split_train_test(
            obs, q, mode, derive_seed(plan.seed, qi, si, 2)
        )
        train_pair = estimate(train_obs)
        test_pair = estimate(test_obs)
    except LogoError as err:
        for name in plan.models:
            results[name] = ("failure", str(err))
        return results

    ridge_cfg = baselines.default_ridge_config(
        train_pair.variances, n_points=plan.ridge_grid_points
    )
    ridge_cfg = replace(ridge_cfg, fold_seed=derive_seed(plan.seed, qi, si, 3))

    for name in plan.models:
        started = time.perf_counter() if plan.measure_time else 0.0
        try:
            loglik, nnz = _score_model(
                name, train_obs, train_pair, test_pair, ridge_cfg, external
            )
        except LogoError as err:
            results[name] = ("failure", str(err))
            continue
        seconds = time.perf_counter() - started if plan.measure_time else 0.0
        results[name] = ("ok", loglik, nnz, seconds)
    return results


def _aggregate(plan: ExperimentPlan, cells) -> list:
    reports = []
    for qi, q in enumerate(plan.q_list):
        for name in plan.models:
            logliks, nnzs, secs, failures = [], [], [], 0
            for si in range(plan.n_samples):
                outcome = cells[(qi, si)][name]
                if outcome[0] == "failure":
                    failures += 1
                else:
                    _, loglik, nnz, seconds = outcome
                    logliks.append(loglik)
                    nnzs.append(nnz)
                    secs.append(seconds)
            if logliks:
                arr = np.array(logliks)
                reports.append(FitReport(
                    model=name,
                    q=q,
                    mean_loglik=float(arr.mean()),
                    std_loglik=float(arr.std(ddof=1)) if arr.size > 1 else 0.0,
                    q05=float(np.percentile(arr, 5)),
                    q95=float(np.percentile(arr, 95)),
                    mean_nnz=float(np.mean(nnzs)),
                    mean_seconds=float(np.mean(secs)),
                    failures=failures,
                ))
            else:
                reports.append(FitReport(
                    model=name, q=q, mean_loglik=None, std_loglik=None,
                    q05=None, q95=None, mean_nnz=None, mean_seconds=None,
                    failures=failures,
                ))
    return reports


def _load_external(plan: ExperimentPlan) -> dict:
    import json

    from .core import SparsePrecision

    external = {}
    for name in plan.models:
        if name.startswith("external:"):
            with open(name[len("external:"):], "r") as fh:
                external[name] = SparsePrecision.from_dict(json.load(fh))
    return external


def run_experiment(plan: ExperimentPlan, workers: int = 1) -> list:
    """Execute the sweep and aggregate; deterministic for any worker count."""
    external = _load_external(plan)
    panel = None
    if isinstance(plan.generator, CsvSource):
        panel = read_observations(plan.generator.path)
        if plan.generator.standardize:
            panel = standardize_columns(panel)

    cell_ids = [
        (qi, si)
        for qi in range(len(plan.q_list))
        for si in range(plan.n_samples)
    ]
    if workers <= 1:
        cells = {
            cid: _run_cell(plan, cid[0], cid[1], panel, external)
            for cid in cell_ids
        }
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {
                cid: pool.submit(_run_cell, plan, cid[0], cid[1], panel, external)
                for cid in cell_ids
            }
            cells = {cid: fut.result() for cid, fut in futures.items()}
    return _aggregate(plan, cells)


REPORT_COLUMNS = ("model", "q", "mean", "std", "q05", "q95", "nnz", "seconds", "failures")


def render_report(reports) -> str:
    """Plot-ready CSV; floats in shortest round-trip form, blanks for
    all-failed cells, so equal results render to identical bytes."""

    def cell(v):
        if v is None:
            return ""
        if isinstance(v, float):
            return repr(v)
        return str(v)

    lines = [",".join(REPORT_COLUMNS)]
    for r in reports:
        lines.append(",".join([
            r.model, str(r.q), cell(r.mean_loglik), cell(r.std_loglik),
            cell(r.q05), cell(r.q95), cell(r.mean_nnz), cell(r.mean_seconds),
            str(r.failures),
        ]))
    return "\n".join(lines) + "\n"
