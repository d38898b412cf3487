"""Pydantic request/response models for the HTTP service.

Observation panels travel as CSV text (header row of names), precision
models as their JSON dict form, so every endpoint is self-contained and
the CLI can stay a thin client.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from ..core import LikelihoodReport, SparsePrecision


class PrecisionModel(BaseModel):
    """Wire form of a precision matrix: lower-triangle entries plus mean."""

    p: int
    mean: list[float]
    entries: list[tuple[int, int, float]]
    structure: dict | str | None = "dense"

    @classmethod
    def from_core(cls, prec: SparsePrecision) -> "PrecisionModel":
        d = prec.to_dict()
        return cls(p=d["p"], mean=d["mean"],
                   entries=[tuple(e) for e in d["entries"]],
                   structure=d["structure"])

    def to_core(self) -> SparsePrecision:
        return SparsePrecision.from_dict({
            "p": self.p,
            "mean": self.mean,
            "entries": [list(e) for e in self.entries],
            "structure": self.structure,
        })


class EstimateRequest(BaseModel):
    csv: str
    method: Literal["tmfg", "mst", "dense", "null", "ridge"] = "tmfg"
    standardize: bool = False
    seed: int = 0


class EstimateResponse(BaseModel):
    precision: PrecisionModel
    n_edges: int
    n_cliques: Optional[int] = None
    n_separators: Optional[int] = None


class LikelihoodRequest(BaseModel):
    precision: PrecisionModel
    test_csv: str


class LikelihoodResponse(BaseModel):
    per_obs_loglik: float
    logdet: float
    trace_term: float
    n_params: int
    total: float

    @classmethod
    def from_core(cls, report: LikelihoodReport) -> "LikelihoodResponse":
        return cls(**report.to_dict())


class PredictRequest(BaseModel):
    precision: PrecisionModel
    past: list[int]
    future: list[int]
    x1: list[float]


class PredictResponse(BaseModel):
    mean: list[float]
    beta: list[list[float]]


class ScenarioSpec(BaseModel):
    """Either a full constraint set {A, z} or the portfolio shorthand."""

    A: Optional[list[list[float]]] = None
    z: Optional[list[float]] = None
    weights: Optional[list[float]] = None
    loss: Optional[float] = None

    @model_validator(mode="after")
    def _one_form(self):
        full = self.A is not None and self.z is not None
        short = self.weights is not None and self.loss is not None
        if full == short:
            raise ValueError("provide either A and z, or weights and loss")
        return self

    def to_dict(self) -> dict:
        if self.weights is not None:
            return {"weights": self.weights, "loss": self.loss}
        return {"A": self.A, "z": self.z}


class ConditionRequest(BaseModel):
    precision: PrecisionModel
    scenario: ScenarioSpec


class ConditionResponse(BaseModel):
    cond_mean: list[float]
    cond_cov: list[list[float]]


class AllocateRequest(BaseModel):
    precision: PrecisionModel
    weights: list[float]
    loss: float


class AllocateResponse(BaseModel):
    cond_mean: list[float]
    cond_var_diag: list[float]
    portfolio_mean: float
    portfolio_variance: float


class SampleRequest(BaseModel):
    precision: PrecisionModel
    n: int = Field(ge=1)
    seed: int = 0


class SampleResponse(BaseModel):
    csv: str


class GraphExportRequest(BaseModel):
    precision: Optional[PrecisionModel] = None
    csv: Optional[str] = None
    method: Literal["tmfg", "mst"] = "tmfg"
    format: Literal["json", "edges"] = "json"
    standardize: bool = False

    @model_validator(mode="after")
    def _one_source(self):
        if (self.precision is None) == (self.csv is None):
            raise ValueError("provide either a fitted precision or CSV data")
        return self


class GraphExportResponse(BaseModel):
    structure: Optional[dict] = None
    edges: Optional[str] = None


class FactorGenerator(BaseModel):
    type: Literal["factor"] = "factor"
    p: int
    n_factors: int
    loading_scale: float = 1.0
    noise_variance: float = 1.0
    standardize: bool = True


class CsvGenerator(BaseModel):
    type: Literal["csv"] = "csv"
    path: str
    mode: Literal["shuffled", "sequential"] = "shuffled"
    standardize: bool = False


class BenchmarkRequest(BaseModel):
    generator: FactorGenerator | CsvGenerator = Field(discriminator="type")
    p_subset: int
    q_list: list[int]
    n_samples: int = 100
    models: list[str] = ["tmfg", "mst", "dense", "null", "ridge", "max"]
    seed: int = 0
    measure_time: bool = True
    workers: int = 1


class BenchmarkRow(BaseModel):
    model: str
    q: int
    mean: Optional[float] = None
    std: Optional[float] = None
    q05: Optional[float] = None
    q95: Optional[float] = None
    nnz: Optional[float] = None
    seconds: Optional[float] = None
    failures: int


class BenchmarkResponse(BaseModel):
    report_csv: str
    rows: list[BenchmarkRow]


class HealthResponse(BaseModel):
    status: str
    version: str
