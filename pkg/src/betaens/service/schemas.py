"""Request and response models for the HTTP service.

Estimate payloads always carry ``value``, ``std_error``, ``n``, ``seed``,
``shards``, and a ``params`` echo; optional fields are omitted from the
serialized output rather than sent as null.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

__all__ = [
    "EnsembleParamsModel",
    "SampleRequest",
    "SampleResponse",
    "MomentsRequest",
    "MomentsResponse",
    "DistanceRequest",
    "EstimateModel",
    "CltRequest",
    "CltResponse",
    "ScanRequest",
    "ScanPointModel",
    "ScanResponse",
    "HealthResponse",
]


class _Request(BaseModel):
    model_config = ConfigDict(extra="forbid")


class EnsembleParamsModel(BaseModel):
    """Echo of the matrix-size and weight-exponent parameters."""

    beta: float
    m: int
    a1: float
    a2: float | None = None


class SampleRequest(_Request):
    ensemble: Literal["laguerre", "jacobi", "jacobi-scaled"]
    beta: float
    m: int = Field(ge=1)
    a1: float
    a2: float | None = None
    n: int = Field(ge=1)
    seed: int = Field(ge=0, lt=1 << 64)


class SampleResponse(BaseModel):
    ensemble: str
    params: EnsembleParamsModel
    n: int
    seed: int
    draws: list[list[float]]


class MomentsRequest(_Request):
    beta: float
    m: int = Field(ge=1)
    a1: float
    a2: float | None = None


class MomentsResponse(BaseModel):
    """Closed-form spectral statistics; unit-interval first moments appear
    only when ``a2`` is supplied."""

    var_sum: float
    e_sq: float
    var_sq: float
    cov_lin_sq: float
    e_cube: float
    s1: float | None = None
    s2: float | None = None
    s3: float | None = None
    params: EnsembleParamsModel


class DistanceRequest(_Request):
    metric: Literal["tv", "kl"]
    beta: float
    m: int = Field(ge=1)
    a1: float
    a2: float
    n: int = Field(ge=1)
    seed: int = Field(ge=0, lt=1 << 64)
    shards: int = Field(default=1, ge=1)


class EstimateModel(BaseModel):
    metric: str
    value: float
    std_error: float
    n: int
    seed: int
    shards: int
    n_clamped: int | None = None
    params: EnsembleParamsModel


class CltRequest(_Request):
    regime: Literal["A2", "A3"]
    statistic: Literal["u", "log-ratio", "quadratic"] = "u"
    beta: float
    m: int = Field(ge=1)
    a1: float
    a2: float
    replicates: int = Field(ge=1)
    seed: int = Field(ge=0, lt=1 << 64)


class CltResponse(BaseModel):
    regime: str
    statistic: str
    replicates: int
    mean: float
    variance: float
    mean_std_error: float
    target_mean: float
    target_variance: float
    ks_statistic: float
    ks_p_value: float
    seed: int
    params: EnsembleParamsModel


class ScanRequest(_Request):
    kind: Literal["A1", "A2", "A3", "vanishing"]
    steps: int = Field(ge=3)
    a2_low: float
    a2_high: float
    beta: float
    rho: float | None = None
    sigma: float | None = None
    x: float | None = None
    y: float | None = None
    m: int | None = None
    a1: float | None = None
    metric: Literal["tv", "kl", "clt"]
    n: int = Field(ge=1)
    seed: int = Field(ge=0, lt=1 << 64)
    shards: int = Field(default=1, ge=1)


class ScanPointModel(BaseModel):
    params: EnsembleParamsModel
    estimate: EstimateModel | None = None
    clt: CltResponse | None = None
    error: str | None = None


class ScanResponse(BaseModel):
    kind: str
    metric: str
    n: int
    seed: int
    shards: int
    points: list[ScanPointModel]


class HealthResponse(BaseModel):
    status: str
