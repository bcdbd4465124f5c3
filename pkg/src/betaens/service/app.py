"""HTTP service exposing the samplers, moment formulas, distance
estimators, CLT harnesses, and regime scans.

Parameter violations map to 400; internal consistency and estimator
failures map to 500.  All handlers are synchronous CPU-bound functions.
"""

from __future__ import annotations

from fastapi import APIRouter, FastAPI, Request
from fastapi.responses import JSONResponse

from ..distances import CltReport, Estimate, clt_harness, kl_estimate, quadratic_clt_check, tv_estimate
from ..ensembles import EnsembleParams, SpectrumKind, sample_spectrum
from ..moments import jacobi_moment_estimates, laguerre_exact_stats
from ..numerics import ConsistencyError, EstimatorError, ParameterError, RngStream
from ..regimes import make_schedule, scan
from .schemas import (
    CltRequest,
    CltResponse,
    DistanceRequest,
    EnsembleParamsModel,
    EstimateModel,
    HealthResponse,
    MomentsRequest,
    MomentsResponse,
    SampleRequest,
    SampleResponse,
    ScanPointModel,
    ScanRequest,
    ScanResponse,
)

__all__ = ["app", "create_app"]

router = APIRouter()

_STATISTIC_NAMES = {"u": "u", "log-ratio": "log_lm_prime"}


def _params_model(params: EnsembleParams) -> EnsembleParamsModel:
    return EnsembleParamsModel(beta=params.beta, m=params.m, a1=params.a1, a2=params.a2)


def _estimate_model(est: Estimate, params: EnsembleParams) -> EstimateModel:
    return EstimateModel(
        metric=est.metric,
        value=est.value,
        std_error=est.std_error,
        n=est.n_samples,
        seed=est.seed,
        shards=est.shards,
        n_clamped=est.n_clamped if est.metric == "kl" else None,
        params=_params_model(params),
    )


def _clt_model(report: CltReport, statistic: str, seed: int, params: EnsembleParams) -> CltResponse:
    stats = report.statistic_samples
    return CltResponse(
        regime=report.regime,
        statistic=statistic,
        replicates=report.replicates,
        mean=stats.mean,
        variance=stats.variance,
        mean_std_error=stats.std_error,
        target_mean=report.target_mean,
        target_variance=report.target_variance,
        ks_statistic=report.ks.statistic_d,
        ks_p_value=report.ks.p_value,
        seed=seed,
        params=_params_model(params),
    )


@router.get("/healthz", response_model=HealthResponse)
def healthz() -> HealthResponse:
    return HealthResponse(status="ok")


@router.post("/sample", response_model=SampleResponse, response_model_exclude_none=True)
def sample(req: SampleRequest) -> SampleResponse:
    params = EnsembleParams(beta=req.beta, m=req.m, a1=req.a1, a2=req.a2)
    kind = SpectrumKind(req.ensemble)
    gen = RngStream(req.seed).generator()
    draws = [sample_spectrum(kind, params, gen).values.tolist() for _ in range(req.n)]
    return SampleResponse(
        ensemble=req.ensemble, params=_params_model(params), n=req.n, seed=req.seed, draws=draws
    )


@router.post("/moments", response_model=MomentsResponse, response_model_exclude_none=True)
def moments(req: MomentsRequest) -> MomentsResponse:
    params = EnsembleParams(beta=req.beta, m=req.m, a1=req.a1, a2=req.a2)
    stats = laguerre_exact_stats(params)
    payload = {
        "var_sum": stats.var_sum,
        "e_sq": stats.e_sq,
        "var_sq": stats.var_sq,
        "cov_lin_sq": stats.cov_lin_sq,
        "e_cube": stats.e_cube,
    }
    if params.has_a2:
        jacobi = jacobi_moment_estimates(params)
        payload.update(s1=jacobi.s1, s2=jacobi.s2, s3=jacobi.s3)
    return MomentsResponse(params=_params_model(params), **payload)


@router.post("/distance", response_model=EstimateModel, response_model_exclude_none=True)
def distance(req: DistanceRequest) -> EstimateModel:
    params = EnsembleParams(beta=req.beta, m=req.m, a1=req.a1, a2=req.a2)
    stream = RngStream(req.seed)
    estimator = tv_estimate if req.metric == "tv" else kl_estimate
    est = estimator(params, req.n, stream, shards=req.shards)
    return _estimate_model(est, params)


@router.post("/clt", response_model=CltResponse, response_model_exclude_none=True)
def clt(req: CltRequest) -> CltResponse:
    params = EnsembleParams(beta=req.beta, m=req.m, a1=req.a1, a2=req.a2)
    stream = RngStream(req.seed)
    if req.statistic == "quadratic":
        if req.regime != "A3":
            raise ParameterError("the quadratic statistic check requires regime A3")
        report = quadratic_clt_check(params, req.replicates, stream)
    else:
        report = clt_harness(
            params, req.regime, req.replicates, stream, statistic=_STATISTIC_NAMES[req.statistic]
        )
    return _clt_model(report, req.statistic, req.seed, params)


@router.post("/scan", response_model=ScanResponse, response_model_exclude_none=True)
def run_scan(req: ScanRequest) -> ScanResponse:
    schedule = make_schedule(
        req.kind,
        req.steps,
        (req.a2_low, req.a2_high),
        req.beta,
        rho=req.rho,
        sigma=req.sigma,
        x=req.x,
        y=req.y,
        m=req.m,
        a1=req.a1,
    )
    results = scan(schedule, req.metric, req.n, RngStream(req.seed), shards=req.shards)
    points = []
    for res in results:
        point_params = res.point.params
        if res.error is not None:
            points.append(ScanPointModel(params=_params_model(point_params), error=res.error))
        elif res.report is not None:
            points.append(
                ScanPointModel(
                    params=_params_model(point_params),
                    clt=_clt_model(res.report, "u", req.seed, point_params),
                )
            )
        else:
            points.append(
                ScanPointModel(
                    params=_params_model(point_params),
                    estimate=_estimate_model(res.estimate, point_params),
                )
            )
    return ScanResponse(
        kind=schedule.kind,
        metric=req.metric,
        n=req.n,
        seed=req.seed,
        shards=req.shards,
        points=points,
    )


def _error_handler(status_code: int):
    def handle(request: Request, exc: Exception) -> JSONResponse:
        return JSONResponse(status_code=status_code, content={"detail": str(exc)})

    return handle


def create_app() -> FastAPI:
    """Build the application with routes and error mapping installed."""
    application = FastAPI(title="betaens")
    application.include_router(router)
    application.add_exception_handler(ParameterError, _error_handler(400))
    application.add_exception_handler(ConsistencyError, _error_handler(500))
    application.add_exception_handler(EstimatorError, _error_handler(500))
    return application


app = create_app()
