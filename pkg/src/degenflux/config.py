"""Experiment configuration: TOML files validated into typed sections.

A config file describes one experiment end to end: the forward problem
(used as ground truth when generating synthetic records), the series
controls, the measurement schedule, and optionally the inverse setup.
Unknown keys anywhere are rejected so a typo cannot silently fall back
to a default.
"""

from __future__ import annotations

from typing import Literal, Optional

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .forward import MODES_DEFAULT, SERIES_TOL_DEFAULT, ProblemConfig, time_grid
from .inverse import PARAM_COUNTS, AdmissibleBox, ObjectiveSpec
from .quadrature import InitialData


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class InitialSection(_Strict):
    kind: Literal["constant", "piecewise", "tabulated"]
    cu: Optional[float] = None
    cv: Optional[float] = None
    u_left: Optional[float] = None
    u_right: Optional[float] = None
    v_left: Optional[float] = None
    v_right: Optional[float] = None
    xs: Optional[list[float]] = None
    us: Optional[list[float]] = None
    vs: Optional[list[float]] = None

    @model_validator(mode="after")
    def _check_fields(self):
        wanted = {
            "constant": ("cu", "cv"),
            "piecewise": ("u_left", "u_right", "v_left", "v_right"),
            "tabulated": ("xs", "us", "vs"),
        }[self.kind]
        for name in wanted:
            if getattr(self, name) is None:
                raise ValueError(f"initial kind {self.kind!r} needs {name}")
        all_fields = ("cu", "cv", "u_left", "u_right", "v_left", "v_right", "xs", "us", "vs")
        for name in all_fields:
            if name not in wanted and getattr(self, name) is not None:
                raise ValueError(f"initial kind {self.kind!r} does not take {name}")
        return self

    def build(self) -> InitialData:
        if self.kind == "constant":
            return InitialData.constant(self.cu, self.cv)
        if self.kind == "piecewise":
            return InitialData.piecewise(self.u_left, self.u_right, self.v_left, self.v_right)
        return InitialData.tabulated(self.xs, self.us, self.vs)


class ProblemSection(_Strict):
    theta: float = Field(ge=1.0, lt=2.0)
    a: float = Field(gt=0.0, lt=1.0)
    alpha: float
    beta: float
    initial: InitialSection


class SeriesSection(_Strict):
    modes: int = Field(default=MODES_DEFAULT, ge=1)
    tol: float = Field(default=SERIES_TOL_DEFAULT, gt=0.0, lt=1.0)
    quad_order: int = Field(default=200, ge=1, le=512)


class MeasurementSection(_Strict):
    sides: list[Literal[0, 1]] = Field(default=[1], min_length=1)
    t_star: Optional[float] = None
    t1: Optional[float] = None
    t2: Optional[float] = None
    samples: Optional[int] = Field(default=None, ge=2)
    noise_percent: float = Field(default=0.0, ge=0.0)
    seed: int = 0

    @model_validator(mode="after")
    def _one_schedule(self):
        single = self.t_star is not None
        ranged = [self.t1 is not None, self.t2 is not None, self.samples is not None]
        if single and any(ranged):
            raise ValueError("give either t_star or the (t1, t2, samples) triple, not both")
        if not single and not all(ranged):
            raise ValueError("measurement schedule needs t_star or all of t1, t2, samples")
        if len(set(self.sides)) != len(self.sides):
            raise ValueError("sides must not repeat")
        return self

    def times(self) -> np.ndarray:
        if self.t_star is not None:
            return np.array([self.t_star], dtype=float)
        return time_grid(self.t1, self.t2, self.samples)


class InverseSection(_Strict):
    kind: Literal["point", "interval-u", "interval-uv", "two-sided", "one-sided", "fixed-left"]
    init: list[float]
    lower: list[float]
    upper: list[float]
    optimizer: Literal["nelder-mead", "quasi-newton"] = "nelder-mead"
    max_evals: int = Field(default=400, ge=1)
    u_left: Optional[float] = None
    noise_percents: list[float] = Field(default=[])

    @model_validator(mode="after")
    def _check_lengths(self):
        n = PARAM_COUNTS[self.kind]
        for name in ("init", "lower", "upper"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{self.kind} takes {n} parameters, {name} has {len(getattr(self, name))}")
        if self.kind == "fixed-left" and self.u_left is None:
            raise ValueError("fixed-left needs u_left")
        if self.kind != "fixed-left" and self.u_left is not None:
            raise ValueError(f"{self.kind} does not take u_left")
        return self


class OutputSection(_Strict):
    dir: str = "."


class ExperimentConfig(_Strict):
    problem: ProblemSection
    series: SeriesSection = SeriesSection()
    measurement: MeasurementSection
    inverse: Optional[InverseSection] = None
    output: OutputSection = OutputSection()

    def problem_config(self) -> ProblemConfig:
        return ProblemConfig(
            theta=self.problem.theta,
            a=self.problem.a,
            alpha=self.problem.alpha,
            beta=self.problem.beta,
            initial=self.problem.initial.build(),
            modes=self.series.modes,
            series_tol=self.series.tol,
            quad_order=self.series.quad_order,
        )

    def admissible_box(self) -> AdmissibleBox:
        if self.inverse is None:
            raise ValueError("config has no inverse section")
        return AdmissibleBox(lower=tuple(self.inverse.lower), upper=tuple(self.inverse.upper))

    def objective_spec(self, measurement) -> ObjectiveSpec:
        if self.inverse is None:
            raise ValueError("config has no inverse section")
        known = None
        if self.inverse.kind in ("point", "interval-u"):
            known = self.problem.initial.build()
        return ObjectiveSpec(
            kind=self.inverse.kind,
            measurement=measurement,
            theta=self.problem.theta,
            alpha=self.problem.alpha,
            beta=self.problem.beta,
            modes=self.series.modes,
            series_tol=self.series.tol,
            quad_order=self.series.quad_order,
            initial=known,
            u_left=self.inverse.u_left,
        )


def parse_config(text: str) -> ExperimentConfig:
    return ExperimentConfig.model_validate(tomllib.loads(text))


def load_config(path) -> ExperimentConfig:
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    return ExperimentConfig.model_validate(data)
