"""Request and response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field

Matrix = list[list[float]]


class HealthResponse(BaseModel):
    status: str
    version: str


class TableRowModel(BaseModel):
    kind: str
    d_AB: float
    d_BC: float
    reversed: bool


class TableResponse(BaseModel):
    rows: list[TableRowModel]
    note: str


class DistanceRequest(BaseModel):
    kind: str
    matrix_a: Matrix
    matrix_b: Matrix


class DistanceResponse(BaseModel):
    kind: str
    value: float


class PairwiseRequest(BaseModel):
    kind: str
    correlations: list[Matrix]
    labels: list[str] | None = None


class PairwiseResponse(BaseModel):
    kind: str
    labels: list[str]
    values: list[list[float]]


class HistogramPayload(BaseModel):
    dim: int = Field(ge=1)
    bins_per_axis: int = Field(ge=2)
    mass: list[float]


class PlanMove(BaseModel):
    source: int
    target: int
    mass: float


class EmdRequest(BaseModel):
    histogram_a: HistogramPayload
    histogram_b: HistogramPayload
    ground: str = "euclidean"
    include_plan: bool = False


class EmdResponse(BaseModel):
    value: float
    plan_moves: list[PlanMove] | None = None


class SweepRequest(BaseModel):
    kind: str = "fisher-rao"
    grid_size: int = Field(default=50, ge=2)
    hi: float = 0.995


class SweepResponse(BaseModel):
    kind: str
    rhos: list[float]
    values: list[list[float]]


class FitRequest(BaseModel):
    series: list[list[float]]
    method: str = "normal-scores"


class FitResponse(BaseModel):
    correlation: Matrix
    fit_method: str
    sample_size: int


class SampleRequest(BaseModel):
    correlation: Matrix
    n_samples: int = Field(ge=1)
    seed: int = 0


class SampleResponse(BaseModel):
    observations: list[list[float]]


class MergeModel(BaseModel):
    left: int
    right: int
    height: float
    size: int


class ClusterRequest(BaseModel):
    distances: Matrix
    labels: list[str] | None = None
    k: int = Field(ge=1)


class ClusterResponse(BaseModel):
    labels: list[str]
    k: int
    assignment: list[int]
    merges: list[MergeModel]
    monotone: bool


class SeriesObject(BaseModel):
    label: str
    series: list[list[float]]


class PipelineRequest(BaseModel):
    objects: list[SeriesObject]
    kind: str = "fisher-rao"
    fit_method: str = "normal-scores"
    k: int = Field(default=3, ge=1)
    bins: int = Field(default=16, ge=2)


class PipelineResponse(BaseModel):
    labels: list[str]
    k: int
    assignment: list[int]
    merges: list[MergeModel]
    distances: list[list[float]]


class CrlbResponse(BaseModel):
    rho: float
    value: float


class ErrorResponse(BaseModel):
    error: str
    detail: str
