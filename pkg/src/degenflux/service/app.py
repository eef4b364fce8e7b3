"""In-process service exposing the toolkit over typed endpoints.

Config-shape problems surface as 422 (request validation) so clients
can distinguish them from computational failures, which surface as 500
with the originating message.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

import numpy as np
from fastapi import FastAPI, HTTPException

from ..config import ExperimentConfig
from ..forward import ProblemConfig, measure, solve_profile
from ..inverse import noise_study, reconstruct
from ..selftest import run_selftest
from ..stability import ScanResult, flux_sensitivity, scan_flag, scan_summary
from . import schemas

app = FastAPI(title="degenflux service")


@contextmanager
def _core_errors():
    try:
        yield
    except ValueError as exc:
        raise HTTPException(status_code=500, detail=str(exc)) from exc


def _require_inverse(config: ExperimentConfig):
    if config.inverse is None:
        raise HTTPException(status_code=422, detail="config has no [inverse] section")


@app.post("/forward", response_model=schemas.ProfileResponse)
def forward_endpoint(req: schemas.ForwardRequest) -> schemas.ProfileResponse:
    with _core_errors():
        problem = req.config.problem_config()
        ts = np.asarray(req.times, dtype=float) if req.times else req.config.measurement.times()
        xs = np.linspace(0.0, 1.0, req.nx)
        u, v = solve_profile(problem, xs, ts)
    return schemas.ProfileResponse(
        xs=xs.tolist(), ts=ts.tolist(), u=u.tolist(), v=v.tolist()
    )


@app.post("/measure", response_model=schemas.MeasurementResponse)
def measure_endpoint(req: schemas.MeasureRequest) -> schemas.MeasurementResponse:
    with _core_errors():
        section = req.config.measurement
        record = measure(
            req.config.problem_config(),
            section.times(),
            sides=tuple(section.sides),
            noise_percent=section.noise_percent,
            seed=section.seed,
        )
    return schemas.MeasurementResponse(
        samples=[
            schemas.SampleModel(t=s.t, side=s.side, du=s.du, dv=s.dv) for s in record.samples
        ]
    )


def _scan_at(problem: ProblemConfig, t: float, a_values: np.ndarray, threads: int) -> ScanResult:
    def one(a: float) -> float:
        local = ProblemConfig(
            theta=problem.theta,
            a=float(a),
            alpha=problem.alpha,
            beta=problem.beta,
            initial=problem.initial,
            modes=problem.modes,
            series_tol=problem.series_tol,
            quad_order=problem.quad_order,
        )
        return flux_sensitivity(local, t)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            d_values = list(pool.map(one, a_values))
    else:
        d_values = [one(a) for a in a_values]
    return ScanResult(
        theta=problem.theta,
        alpha=problem.alpha,
        beta=problem.beta,
        t=t,
        a_values=tuple(float(a) for a in a_values),
        d_values=tuple(d_values),
    )


@app.post("/scan-stability", response_model=schemas.ScanResponse)
def scan_endpoint(req: schemas.ScanRequest) -> schemas.ScanResponse:
    if not req.a_min < req.a_max:
        raise HTTPException(status_code=422, detail="need a_min < a_max")
    with _core_errors():
        problem = req.config.problem_config()
        a_values = np.linspace(req.a_min, req.a_max, req.count)
        ts = req.config.measurement.times()
        scans = []
        for t in ts:
            result = _scan_at(problem, float(t), a_values, req.threads)
            summary = scan_summary(result)
            summary["max"] = result.maximum
            summary["flag"] = scan_flag(result)
            scans.append(
                schemas.ScanModel(
                    t=float(t),
                    a_values=list(result.a_values),
                    d_values=list(result.d_values),
                    summary=summary,
                )
            )
    return schemas.ScanResponse(scans=scans)


@app.post("/reconstruct", response_model=schemas.ReconstructResponse)
def reconstruct_endpoint(req: schemas.ReconstructRequest) -> schemas.ReconstructResponse:
    _require_inverse(req.config)
    with _core_errors():
        cfg = req.config
        section = cfg.measurement
        record = measure(
            cfg.problem_config(),
            section.times(),
            sides=tuple(section.sides),
            noise_percent=section.noise_percent,
            seed=section.seed,
        )
        result = reconstruct(
            cfg.objective_spec(record),
            cfg.admissible_box(),
            cfg.inverse.init,
            optimizer=cfg.inverse.optimizer,
            max_evals=cfg.inverse.max_evals,
        )
    return schemas.ReconstructResponse(result=result.to_dict())


@app.post("/noise-study", response_model=schemas.NoiseStudyResponse)
def noise_study_endpoint(req: schemas.NoiseStudyRequest) -> schemas.NoiseStudyResponse:
    _require_inverse(req.config)
    if not req.config.inverse.noise_percents:
        raise HTTPException(status_code=422, detail="inverse.noise_percents is empty")
    with _core_errors():
        cfg = req.config
        known = None
        if cfg.inverse.kind in ("point", "interval-u"):
            known = cfg.problem.initial.build()
        rows = noise_study(
            cfg.problem_config(),
            cfg.inverse.kind,
            cfg.measurement.times(),
            tuple(cfg.measurement.sides),
            cfg.admissible_box(),
            cfg.inverse.init,
            cfg.inverse.noise_percents,
            base_seed=cfg.measurement.seed,
            optimizer=cfg.inverse.optimizer,
            known_initial=known,
            u_left=cfg.inverse.u_left,
            max_evals=cfg.inverse.max_evals,
        )
    return schemas.NoiseStudyResponse(
        rows=[
            schemas.NoiseRow(percent=p, cost=c, iterations=i, a_c=a) for p, c, i, a in rows
        ]
    )


@app.post("/selftest", response_model=schemas.SelftestResponse)
def selftest_endpoint(req: schemas.SelftestRequest) -> schemas.SelftestResponse:
    report = run_selftest(inject_zero_fault=req.inject_zero_fault)
    return schemas.SelftestResponse(
        passed=report.passed,
        elapsed=report.elapsed,
        checks=[
            schemas.CheckModel(name=c.name, passed=c.passed, detail=c.detail)
            for c in report.checks
        ],
    )
