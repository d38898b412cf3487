"""HTTP service exposing estimation, scoring, conditioning and benchmarks.

Model and data errors surface as HTTP 400 with the error message in
``detail``; malformed payloads get FastAPI's standard 422.
"""

from __future__ import annotations

import io
from dataclasses import replace

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..baselines import (
    default_ridge_config,
    dense_precision,
    null_precision,
    ridge_precision,
)
from ..conditional import BlockSplit, fit_regression, predict
from ..core import assemble_precision, log_likelihood
from ..datagen import FactorModelSpec, sample_gmrf
from ..errors import LogoError
from ..estimators import estimate, standardize_columns
from ..graphs import build_mst, build_tmfg
from ..harness import CsvSource, ExperimentPlan, render_report, run_experiment
from ..io import format_observations, parse_observations
from ..risk import LinearConstraint, portfolio_moments, run_scenario
from . import schemas


def _fit(request: schemas.EstimateRequest):
    obs = parse_observations(io.StringIO(request.csv))
    if request.standardize:
        obs = standardize_columns(obs)
    pair = estimate(obs)
    if request.method == "tmfg":
        tree = build_tmfg(pair.corr)
        return assemble_precision(tree, pair), tree
    if request.method == "mst":
        tree = build_mst(pair.corr, pair.variances)
        return assemble_precision(tree, pair), tree
    if request.method == "dense":
        return dense_precision(pair), None
    if request.method == "null":
        return null_precision(pair), None
    cfg = replace(default_ridge_config(pair.variances), fold_seed=request.seed)
    return ridge_precision(obs, cfg), None


def create_app() -> FastAPI:
    app = FastAPI(title="logo-gmrf", version=__version__)

    @app.exception_handler(LogoError)
    async def _logo_error(_: Request, err: LogoError):
        return JSONResponse(status_code=400, content={"detail": str(err)})

    @app.exception_handler(ValueError)
    async def _value_error(_: Request, err: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(err)})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/estimate", response_model=schemas.EstimateResponse)
    def estimate_endpoint(request: schemas.EstimateRequest):
        prec, tree = _fit(request)
        return schemas.EstimateResponse(
            precision=schemas.PrecisionModel.from_core(prec),
            n_edges=prec.n_offdiag,
            n_cliques=len(tree.cliques) if tree is not None else None,
            n_separators=len(tree.separators) if tree is not None else None,
        )

    @app.post("/likelihood", response_model=schemas.LikelihoodResponse)
    def likelihood_endpoint(request: schemas.LikelihoodRequest):
        prec = request.precision.to_core()
        test = estimate(parse_observations(io.StringIO(request.test_csv)))
        return schemas.LikelihoodResponse.from_core(log_likelihood(prec, test))

    @app.post("/predict", response_model=schemas.PredictResponse)
    def predict_endpoint(request: schemas.PredictRequest):
        prec = request.precision.to_core()
        split = BlockSplit(past=tuple(request.past), future=tuple(request.future))
        reg = fit_regression(prec, split)
        mean = predict(reg, request.x1, prec.mean)
        return schemas.PredictResponse(
            mean=mean.tolist(), beta=reg.beta.tolist()
        )

    @app.post("/condition", response_model=schemas.ConditionResponse)
    def condition_endpoint(request: schemas.ConditionRequest):
        prec = request.precision.to_core()
        constraint = LinearConstraint.from_dict(request.scenario.to_dict())
        result = run_scenario(prec, constraint)
        d = result.to_dict()
        return schemas.ConditionResponse(
            cond_mean=d["cond_mean"], cond_cov=d["cond_cov"]
        )

    @app.post("/allocate", response_model=schemas.AllocateResponse)
    def allocate_endpoint(request: schemas.AllocateRequest):
        prec = request.precision.to_core()
        constraint = LinearConstraint.portfolio(request.weights, request.loss)
        result = run_scenario(prec, constraint)
        pmean, pvar = portfolio_moments(prec, request.weights)
        return schemas.AllocateResponse(
            cond_mean=result.cond_mean.tolist(),
            cond_var_diag=result.cond_cov.diagonal().tolist(),
            portfolio_mean=pmean,
            portfolio_variance=pvar,
        )

    @app.post("/sample", response_model=schemas.SampleResponse)
    def sample_endpoint(request: schemas.SampleRequest):
        obs = sample_gmrf(request.precision.to_core(), request.n, request.seed)
        return schemas.SampleResponse(csv=format_observations(obs))

    @app.post("/graph-export", response_model=schemas.GraphExportResponse)
    def graph_export_endpoint(request: schemas.GraphExportRequest):
        if request.precision is not None:
            prec = request.precision.to_core()
            tree = prec.structure
            if not hasattr(tree, "to_dict"):
                raise LogoError(
                    f"model has no clique-tree structure (tag {tree!r})"
                )
        else:
            obs = parse_observations(io.StringIO(request.csv))
            if request.standardize:
                obs = standardize_columns(obs)
            pair = estimate(obs)
            if request.method == "tmfg":
                tree = build_tmfg(pair.corr)
            else:
                tree = build_mst(pair.corr, pair.variances)
        if request.format == "json":
            return schemas.GraphExportResponse(structure=tree.to_dict())
        return schemas.GraphExportResponse(edges=tree.to_edge_list())

    @app.post("/benchmark", response_model=schemas.BenchmarkResponse)
    def benchmark_endpoint(request: schemas.BenchmarkRequest):
        gen = request.generator
        if gen.type == "factor":
            generator = FactorModelSpec(
                p=gen.p, n_factors=gen.n_factors,
                loading_scale=gen.loading_scale,
                noise_variance=gen.noise_variance,
                standardize=gen.standardize,
            )
        else:
            generator = CsvSource(
                path=gen.path, mode=gen.mode, standardize=gen.standardize
            )
        plan = ExperimentPlan(
            generator=generator,
            p_subset=request.p_subset,
            q_list=tuple(request.q_list),
            n_samples=request.n_samples,
            models=tuple(request.models),
            seed=request.seed,
            measure_time=request.measure_time,
        )
        reports = run_experiment(plan, workers=request.workers)
        rows = [
            schemas.BenchmarkRow(
                model=r.model, q=r.q, mean=r.mean_loglik, std=r.std_loglik,
                q05=r.q05, q95=r.q95, nnz=r.mean_nnz, seconds=r.mean_seconds,
                failures=r.failures,
            )
            for r in reports
        ]
        return schemas.BenchmarkResponse(
            report_csv=render_report(reports), rows=rows
        )

    return app


app = create_app()
