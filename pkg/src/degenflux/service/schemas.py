"""Request and response bodies for the service endpoints."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from ..config import ExperimentConfig


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ForwardRequest(_Strict):
    config: ExperimentConfig
    nx: int = Field(default=101, ge=2)
    times: Optional[list[float]] = None


class ProfileResponse(_Strict):
    xs: list[float]
    ts: list[float]
    u: list[list[float]]
    v: list[list[float]]


class MeasureRequest(_Strict):
    config: ExperimentConfig


class SampleModel(_Strict):
    t: float
    side: int
    du: float
    dv: float


class MeasurementResponse(_Strict):
    samples: list[SampleModel]


class ScanRequest(_Strict):
    config: ExperimentConfig
    a_min: float = 0.1
    a_max: float = 0.8
    count: int = Field(default=141, ge=2)
    threads: int = Field(default=1, ge=1)


class ScanModel(_Strict):
    t: float
    a_values: list[float]
    d_values: list[float]
    summary: dict


class ScanResponse(_Strict):
    scans: list[ScanModel]


class ReconstructRequest(_Strict):
    config: ExperimentConfig


class ReconstructResponse(_Strict):
    result: dict


class NoiseStudyRequest(_Strict):
    config: ExperimentConfig
    threads: int = Field(default=1, ge=1)


class NoiseRow(_Strict):
    percent: float
    cost: float
    iterations: int
    a_c: float


class NoiseStudyResponse(_Strict):
    rows: list[NoiseRow]


class SelftestRequest(_Strict):
    inject_zero_fault: bool = False


class CheckModel(_Strict):
    name: str
    passed: bool
    detail: str


class SelftestResponse(_Strict):
    passed: bool
    elapsed: float
    checks: list[CheckModel]
