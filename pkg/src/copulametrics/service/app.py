"""FastAPI application wrapping the library.

Every endpoint is a stateless call into the core modules. Domain errors
surface as 422 responses carrying the exception class name, so clients
can tell a singular matrix from a malformed payload.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, distances, experiments
from ..clustering import cut, ward_linkage
from ..copula import (
    CorrelationMatrix,
    EmpiricalCopulaHistogram,
    GaussianCopulaModel,
    fit_gaussian_copula,
    pseudo_observations,
    sample_gaussian_copula,
)
from ..errors import CopulaMetricsError
from . import schemas


def _histogram(payload: schemas.HistogramPayload) -> EmpiricalCopulaHistogram:
    return EmpiricalCopulaHistogram(
        dim=payload.dim,
        bins_per_axis=payload.bins_per_axis,
        mass=np.asarray(payload.mass, dtype=float),
    )


def _merges(tree) -> list[schemas.MergeModel]:
    return [
        schemas.MergeModel(left=m.left, right=m.right, height=m.height, size=m.size)
        for m in tree.merges
    ]


def create_app() -> FastAPI:
    app = FastAPI(title="copulametrics", version=__version__)

    @app.exception_handler(CopulaMetricsError)
    async def domain_error_handler(request: Request, exc: CopulaMetricsError):
        return JSONResponse(
            status_code=422,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.get("/table", response_model=schemas.TableResponse)
    def table():
        result = experiments.closed_form_table()
        rows = [
            schemas.TableRowModel(
                kind=row.kind,
                d_AB=row.d_ab,
                d_BC=row.d_bc,
                reversed=row.reversed_order,
            )
            for row in result.rows
        ]
        return schemas.TableResponse(rows=rows, note=result.note)

    @app.post("/distance", response_model=schemas.DistanceResponse)
    def distance(req: schemas.DistanceRequest):
        value = distances.closed_form_distance(
            req.kind, np.asarray(req.matrix_a), np.asarray(req.matrix_b)
        )
        return schemas.DistanceResponse(kind=req.kind, value=value)

    @app.post("/pairwise", response_model=schemas.PairwiseResponse)
    def pairwise(req: schemas.PairwiseRequest):
        models = [CorrelationMatrix(np.asarray(m, dtype=float)) for m in req.correlations]
        dm = distances.pairwise_matrix(models, kind=req.kind, labels=req.labels)
        return schemas.PairwiseResponse(
            kind=req.kind, labels=list(dm.labels), values=dm.values.tolist()
        )

    @app.post("/emd", response_model=schemas.EmdResponse)
    def emd(req: schemas.EmdRequest):
        value, plan = distances.emd(
            _histogram(req.histogram_a), _histogram(req.histogram_b), ground=req.ground
        )
        moves = None
        if req.include_plan:
            moves = [
                schemas.PlanMove(source=s, target=t, mass=m) for s, t, m in plan.moves
            ]
        return schemas.EmdResponse(value=value, plan_moves=moves)

    @app.post("/sweep", response_model=schemas.SweepResponse)
    def sweep(req: schemas.SweepRequest):
        grid = experiments.sweep(req.kind, grid_size=req.grid_size, hi=req.hi)
        return schemas.SweepResponse(
            kind=grid.kind, rhos=grid.rhos.tolist(), values=grid.values.tolist()
        )

    @app.post("/fit", response_model=schemas.FitResponse)
    def fit(req: schemas.FitRequest):
        u = pseudo_observations(np.asarray(req.series, dtype=float))
        model = fit_gaussian_copula(u, method=req.method)
        return schemas.FitResponse(
            correlation=model.correlation.values.tolist(),
            fit_method=model.fit_method,
            sample_size=model.sample_size,
        )

    @app.post("/sample", response_model=schemas.SampleResponse)
    def sample(req: schemas.SampleRequest):
        model = GaussianCopulaModel(CorrelationMatrix(np.asarray(req.correlation)))
        draws = sample_gaussian_copula(model, req.n_samples, req.seed)
        return schemas.SampleResponse(observations=draws.tolist())

    @app.post("/cluster", response_model=schemas.ClusterResponse)
    def cluster(req: schemas.ClusterRequest):
        arr = np.asarray(req.distances, dtype=float)
        labels = req.labels or [str(i) for i in range(arr.shape[0] if arr.ndim == 2 else 0)]
        dm = distances.DistanceMatrix(labels=tuple(labels), values=arr)
        tree = ward_linkage(dm)
        part = cut(tree, req.k)
        return schemas.ClusterResponse(
            labels=list(dm.labels),
            k=part.k,
            assignment=list(part.assignment),
            merges=_merges(tree),
            monotone=tree.monotone,
        )

    @app.post("/pipeline", response_model=schemas.PipelineResponse)
    def pipeline(req: schemas.PipelineRequest):
        data = [(obj.label, np.asarray(obj.series, dtype=float)) for obj in req.objects]
        result = experiments.run_pipeline(
            data, kind=req.kind, fit_method=req.fit_method, k=req.k, bins=req.bins
        )
        return schemas.PipelineResponse(
            labels=list(result.labels),
            k=result.partition.k,
            assignment=list(result.partition.assignment),
            merges=_merges(result.dendrogram),
            distances=result.distance_matrix.values.tolist(),
        )

    @app.get("/crlb", response_model=schemas.CrlbResponse)
    def crlb(rho: float):
        return schemas.CrlbResponse(rho=rho, value=distances.cramer_rao_bound(rho))

    return app
