"""Reconstruction of the degeneracy point and initial data from flux records.

Six misfit kinds cover the supported measurement layouts. Unknown
parameter vectors are ordered with the degeneracy point first:

    point        (a,)            one time, both flux components at x = 1
    interval-u   (a,)            time integral, u component only, x = 1
    interval-uv  (a, cu, cv)     time integral, both components, x = 1;
                                 constant initial data (cu, cv) unknown
    two-sided    (a, u01, u02)   both boundaries, both components;
                                 u0 piecewise constant across a, v0 = 0
    one-sided    (a, u01, u02)   as two-sided but x = 1 data only
    fixed-left   (a, u02)        as one-sided with u01 pinned

All misfits are half the squared residual, integrated over the record's
time grid by the trapezoid rule for the interval kinds. The default
optimiser is a box-clipped Nelder-Mead simplex restarted at decreasing
scales; a projected quasi-Newton (L-BFGS-B on central finite
differences) is available as an alternative. After optimisation each
parameter gets a curvature probe: if the quadratic model puts the
confidence half-width above 10% of its box width the direction is
reported as flat rather than silently returned as a number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .forward import Measurement, ProblemConfig, flux_profile, measure
from .quadrature import InitialData

DELTA_HAT = 0.02
MAX_EVALS_DEFAULT = 400
_STEP_TOL = 1e-12
_NM_SCALES = (0.10, 0.02, 0.004)

PARAM_COUNTS = {
    "point": 1,
    "interval-u": 1,
    "interval-uv": 3,
    "two-sided": 3,
    "one-sided": 3,
    "fixed-left": 2,
}

_trapz = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True)
class AdmissibleBox:
    """Box constraints; the first coordinate is the degeneracy point."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        if len(self.lower) != len(self.upper) or not self.lower:
            raise ValueError("box bounds must be nonempty and of equal length")
        for lo, hi in zip(self.lower, self.upper):
            if not lo < hi:
                raise ValueError(f"box bound [{lo}, {hi}] is empty")
        if self.lower[0] < DELTA_HAT or self.upper[0] > 1.0 - DELTA_HAT:
            raise ValueError(
                f"degeneracy bounds must stay inside [{DELTA_HAT}, {1.0 - DELTA_HAT}]"
            )

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def widths(self) -> np.ndarray:
        return np.array(self.upper) - np.array(self.lower)

    def clip(self, params) -> np.ndarray:
        return np.clip(np.asarray(params, dtype=float), self.lower, self.upper)


@dataclass(frozen=True)
class ObjectiveSpec:
    """Everything needed to evaluate one misfit kind against a record."""

    kind: str
    measurement: Measurement
    theta: float
    alpha: float
    beta: float
    modes: int = 40
    series_tol: float = 1e-14
    quad_order: int = 200
    initial: InitialData | None = None  # known data for the single-unknown kinds
    u_left: float | None = None  # pinned left value for fixed-left

    def __post_init__(self):
        if self.kind not in PARAM_COUNTS:
            raise ValueError(f"unknown objective kind {self.kind!r}")
        sides = self.measurement.sides
        if self.kind == "two-sided":
            if sides != (0, 1):
                raise ValueError("two-sided misfit needs records at both boundaries")
        elif sides != (1,):
            raise ValueError(f"{self.kind} misfit needs records at x = 1 only")
        if self.kind in ("point", "interval-u") and self.initial is None:
            raise ValueError(f"{self.kind} misfit needs the known initial data")
        if self.kind == "fixed-left" and self.u_left is None:
            raise ValueError("fixed-left misfit needs the pinned left value")
        if self.kind == "point" and len(self.measurement.samples) != 1:
            raise ValueError("point misfit expects exactly one sample")

    @property
    def param_count(self) -> int:
        return PARAM_COUNTS[self.kind]

    def config_for(self, params) -> ProblemConfig:
        params = np.asarray(params, dtype=float)
        if params.shape != (self.param_count,):
            raise ValueError(
                f"{self.kind} misfit takes {self.param_count} parameters, got {params.shape}"
            )
        a = float(params[0])
        if self.kind in ("point", "interval-u"):
            initial = self.initial
        elif self.kind == "interval-uv":
            initial = InitialData.constant(params[1], params[2])
        elif self.kind == "fixed-left":
            initial = InitialData.piecewise(self.u_left, params[1], 0.0, 0.0)
        else:
            initial = InitialData.piecewise(params[1], params[2], 0.0, 0.0)
        return ProblemConfig(
            theta=self.theta,
            a=a,
            alpha=self.alpha,
            beta=self.beta,
            initial=initial,
            modes=self.modes,
            series_tol=self.series_tol,
            quad_order=self.quad_order,
        )


def make_objective(spec: ObjectiveSpec):
    """Misfit as a plain callable on the parameter vector."""
    record = [
        (side, spec.measurement.times(side), *spec.measurement.values(side))
        for side in spec.measurement.sides
    ]
    use_v = spec.kind != "interval-u"

    def cost(params) -> float:
        config = spec.config_for(params)
        total = 0.0
        for side, ts, mdu, mdv in record:
            du, dv = flux_profile(config, side, ts)
            ru = du - mdu
            rv = dv - mdv
            if spec.kind == "point":
                total += 0.5 * (ru[0] ** 2 + rv[0] ** 2)
            else:
                total += 0.5 * float(_trapz(ru * ru, ts))
                if use_v:
                    total += 0.5 * float(_trapz(rv * rv, ts))
        return total

    return cost


def objective_eval(spec: ObjectiveSpec, params) -> float:
    return make_objective(spec)(params)


class _BudgetExhausted(Exception):
    pass


class _Tracker:
    """Counts objective evaluations, keeps the incumbent and its history."""

    def __init__(self, fun, limit: int):
        self.fun = fun
        self.limit = limit
        self.count = 0
        self.best_params: np.ndarray | None = None
        self.best_cost = math.inf
        self.trace: list[tuple[int, tuple[float, ...], float]] = []

    def __call__(self, params) -> float:
        if self.count >= self.limit:
            raise _BudgetExhausted
        self.count += 1
        c = self.fun(params)
        better = c < self.best_cost or (
            c == self.best_cost
            and self.best_params is not None
            and params[0] < self.best_params[0]
        )
        if better:
            self.best_params = np.array(params, dtype=float)
            self.best_cost = c
            self.trace.append((self.count, tuple(float(p) for p in params), c))
        return c


def _nelder_mead(tracker: _Tracker, box: AdmissibleBox, x0: np.ndarray, scale: float) -> bool:
    """One simplex run; returns True when the simplex collapsed below tolerance."""
    n = box.dim
    widths = box.widths
    verts = [box.clip(x0)]
    for i in range(n):
        v = verts[0].copy()
        step = scale * widths[i]
        v[i] = v[i] + step if v[i] + step <= box.upper[i] else v[i] - step
        verts.append(box.clip(v))
    costs = [tracker(v) for v in verts]
    for _ in range(10000):
        order = np.argsort(costs, kind="stable")
        verts = [verts[i] for i in order]
        costs = [costs[i] for i in order]
        spread = max(float(np.max(np.abs(v - verts[0]))) for v in verts[1:])
        if spread <= _STEP_TOL:
            return True
        centroid = np.mean(verts[:-1], axis=0)
        worst = verts[-1]
        reflected = box.clip(centroid + (centroid - worst))
        fr = tracker(reflected)
        if fr < costs[0]:
            expanded = box.clip(centroid + 2.0 * (centroid - worst))
            fe = tracker(expanded)
            if fe < fr:
                verts[-1], costs[-1] = expanded, fe
            else:
                verts[-1], costs[-1] = reflected, fr
        elif fr < costs[-2]:
            verts[-1], costs[-1] = reflected, fr
        else:
            if fr < costs[-1]:
                verts[-1], costs[-1] = reflected, fr
            contracted = box.clip(centroid + 0.5 * (verts[-1] - centroid))
            fc = tracker(contracted)
            if fc < costs[-1]:
                verts[-1], costs[-1] = contracted, fc
            else:
                for i in range(1, n + 1):
                    verts[i] = box.clip(verts[0] + 0.5 * (verts[i] - verts[0]))
                    costs[i] = tracker(verts[i])
    return False


def _quasi_newton(tracker: _Tracker, box: AdmissibleBox, x0: np.ndarray) -> bool:
    widths = box.widths
    steps = 1e-7 * widths

    def grad(params):
        params = np.asarray(params, dtype=float)
        g = np.zeros_like(params)
        for i in range(len(params)):
            xp = params.copy()
            xm = params.copy()
            xp[i] = min(params[i] + steps[i], box.upper[i])
            xm[i] = max(params[i] - steps[i], box.lower[i])
            denom = xp[i] - xm[i]
            g[i] = (tracker(xp) - tracker(xm)) / denom if denom > 0.0 else 0.0
        return g

    res = minimize(
        tracker,
        box.clip(x0),
        jac=grad,
        method="L-BFGS-B",
        bounds=list(zip(box.lower, box.upper)),
        options={"maxiter": 500, "ftol": 1e-18, "gtol": 1e-12},
    )
    return bool(res.success)


def _flat_directions(fun, box: AdmissibleBox, params: np.ndarray, cost0: float) -> tuple[int, ...]:
    """Curvature probe; indices whose confidence half-width exceeds 10% of the box."""
    widths = box.widths
    flagged = []
    dc = 1e-9 * (1.0 + abs(cost0))
    for i in range(box.dim):
        h = 0.01 * widths[i]
        xp = params.copy()
        xm = params.copy()
        xp[i] = min(params[i] + h, box.upper[i])
        xm[i] = max(params[i] - h, box.lower[i])
        curvature = (fun(xp) - 2.0 * cost0 + fun(xm)) / (h * h)
        half_width = math.inf if curvature <= 0.0 else math.sqrt(2.0 * dc / curvature)
        if half_width > 0.1 * widths[i]:
            flagged.append(i)
    return tuple(flagged)


@dataclass(frozen=True)
class ReconstructionResult:
    kind: str
    params: tuple[float, ...]
    cost: float
    iterations: int
    status: str
    flat_directions: tuple[int, ...] = ()
    trace: tuple[tuple[int, tuple[float, ...], float], ...] = field(default=())

    def to_dict(self, include_trace: bool = True) -> dict:
        out = {
            "kind": self.kind,
            "params": list(self.params),
            "cost": self.cost,
            "iterations": self.iterations,
            "status": self.status,
        }
        if include_trace:
            out["trace"] = [
                {"eval": i, "params": list(p), "cost": c} for i, p, c in self.trace
            ]
        return out


def reconstruct(
    spec: ObjectiveSpec,
    box: AdmissibleBox,
    init,
    optimizer: str = "nelder-mead",
    max_evals: int = MAX_EVALS_DEFAULT,
) -> ReconstructionResult:
    """Minimise the misfit over the box from the given starting point."""
    if box.dim != spec.param_count:
        raise ValueError(
            f"box dimension {box.dim} does not match {spec.kind} parameter count {spec.param_count}"
        )
    init = np.asarray(init, dtype=float)
    if init.shape != (box.dim,):
        raise ValueError(f"init must have shape ({box.dim},), got {init.shape}")
    if np.any(init < box.lower) or np.any(init > box.upper):
        raise ValueError(f"init {init.tolist()} lies outside the box")
    if optimizer not in ("nelder-mead", "quasi-newton"):
        raise ValueError(f"unknown optimizer {optimizer!r}")
    fun = make_objective(spec)
    tracker = _Tracker(fun, max_evals)
    converged = False
    try:
        if optimizer == "nelder-mead":
            x = box.clip(init)
            for scale in _NM_SCALES:
                converged = _nelder_mead(tracker, box, x, scale)
                x = tracker.best_params
        else:
            converged = _quasi_newton(tracker, box, init)
    except _BudgetExhausted:
        converged = False
    params = tracker.best_params if tracker.best_params is not None else box.clip(init)
    cost = tracker.best_cost if math.isfinite(tracker.best_cost) else fun(params)
    flat = _flat_directions(fun, box, params, cost)
    if flat:
        status = "flat-direction(" + ",".join(str(i) for i in flat) + ")"
    elif converged:
        status = "converged"
    else:
        status = "iteration-cap"
    return ReconstructionResult(
        kind=spec.kind,
        params=tuple(float(p) for p in params),
        cost=float(cost),
        iterations=tracker.count,
        status=status,
        flat_directions=flat,
        trace=tuple(tracker.trace),
    )


def noise_study(
    truth: ProblemConfig,
    kind: str,
    times,
    sides,
    box: AdmissibleBox,
    init,
    percents,
    base_seed: int = 0,
    optimizer: str = "nelder-mead",
    known_initial: InitialData | None = None,
    u_left: float | None = None,
    max_evals: int = MAX_EVALS_DEFAULT,
) -> tuple[tuple[float, float, int, float], ...]:
    """Reconstruction quality per noise level; one fresh record per row.

    Rows carry (percent, cost, iterations, recovered a); row r uses seed
    base_seed + r so records are independent across levels.
    """
    rows = []
    for r, percent in enumerate(percents):
        record = measure(truth, times, sides, noise_percent=percent, seed=base_seed + r)
        spec = ObjectiveSpec(
            kind=kind,
            measurement=record,
            theta=truth.theta,
            alpha=truth.alpha,
            beta=truth.beta,
            modes=truth.modes,
            series_tol=truth.series_tol,
            quad_order=truth.quad_order,
            initial=known_initial,
            u_left=u_left,
        )
        result = reconstruct(spec, box, init, optimizer=optimizer, max_evals=max_evals)
        rows.append((float(percent), result.cost, result.iterations, result.params[0]))
    return tuple(rows)


def write_noise_csv(path, rows) -> None:
    with open(path, "w") as fh:
        fh.write("percent,cost,iterations,a_c\n")
        for percent, cost, iterations, a_c in rows:
            fh.write(f"{percent:.17g},{cost:.17g},{iterations},{a_c:.17g}\n")
