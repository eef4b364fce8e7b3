"""Forward solver: exact series solution and boundary-flux measurements.

With complex zero-order coefficient c = alpha + i beta, the pair
(u, v) = Re, Im of the solution factors as

    (u, v)(x, t) = e^{alpha t} R(beta t) (u~, v~)(x, t),

where R is the plane rotation and (u~, v~) solve the c = 0 problem with
the same initial data. On each half of the interval the c = 0 solution
is a Bessel series; its boundary flux at the outer endpoint reduces to

    right: (d_x u~, d_x v~)(1, t) = sum_n 2k e^{-lambda_n t} / ((1-a) d_n) (U_n, V_n)
    left:  (d_x u~, d_x v~)(0, t) = -sum_n 2k e^{-lambda_n t} / (a d_n) (Ul_n, Vl_n)

with d_n = J'_nu(j_n) j_n^{nu+1} and (U_n, V_n) the weighted Bessel
coefficients of the initial data on that half.

Measurements carry multiplicative Gaussian noise, y -> y (1 + (p/100) xi)
with xi standard normal, drawn from a counter-based generator so a seed
pins the whole record. Evaluation times below T_MIN are rejected: the
series is exact for any t > 0 but measurement schedules should not probe
the initial layer.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .quadrature import InitialData, modal_coefficients
from .spectral import SpectralBasis, build_basis, shape_function

T_MIN = 1e-3
MODES_DEFAULT = 40
SERIES_TOL_DEFAULT = 1e-14
_CONSECUTIVE_SMALL = 3


@dataclass(frozen=True)
class ProblemConfig:
    """Full specification of one forward problem."""

    theta: float
    a: float
    alpha: float
    beta: float
    initial: InitialData
    modes: int = MODES_DEFAULT
    series_tol: float = SERIES_TOL_DEFAULT
    quad_order: int = 200

    def __post_init__(self):
        if not (1.0 <= self.theta < 2.0):
            raise ValueError(f"theta must lie in [1, 2), got {self.theta}")
        if not (0.0 < self.a < 1.0):
            raise ValueError(f"degeneracy point must lie in (0, 1), got {self.a}")
        if self.modes < 1:
            raise ValueError(f"modes must be >= 1, got {self.modes}")
        if not (0.0 < self.series_tol < 1.0):
            raise ValueError(f"series_tol must lie in (0, 1), got {self.series_tol}")


@lru_cache(maxsize=256)
def _side_data(config: ProblemConfig, side: str):
    basis = build_basis(side, config.a, config.theta, config.modes)
    u_coeff = modal_coefficients(
        basis, lambda x: config.initial.u0(x, config.a), config.quad_order
    )
    v_coeff = modal_coefficients(
        basis, lambda x: config.initial.v0(x, config.a), config.quad_order
    )
    u_coeff.setflags(write=False)
    v_coeff.setflags(write=False)
    return basis, u_coeff, v_coeff


def rotation(beta: float, t: float) -> np.ndarray:
    """Plane rotation R(beta t) = [[cos, -sin], [sin, cos]]."""
    cs = math.cos(beta * t)
    sn = math.sin(beta * t)
    return np.array([[cs, -sn], [sn, cs]])


def _rotate(alpha: float, beta: float, t, pu, pv):
    """Apply e^{alpha t} R(beta t) componentwise; t, pu, pv broadcast together."""
    ea = np.exp(alpha * np.asarray(t, dtype=float))
    cs = np.cos(beta * np.asarray(t, dtype=float))
    sn = np.sin(beta * np.asarray(t, dtype=float))
    return ea * (cs * pu - sn * pv), ea * (sn * pu + cs * pv)


def _check_time(t: float) -> None:
    if not (t >= T_MIN):
        raise ValueError(f"evaluation time must be >= {T_MIN}, got {t}")


def _truncated_sum(terms_u: np.ndarray, terms_v: np.ndarray, tol: float) -> tuple[float, float, int]:
    """Accumulate mode terms until three consecutive are negligible."""
    pu = 0.0
    pv = 0.0
    small = 0
    used = 0
    for tu, tv in zip(terms_u, terms_v):
        pu += tu
        pv += tv
        used += 1
        if math.hypot(tu, tv) <= tol * math.hypot(pu, pv):
            small += 1
            if small >= _CONSECUTIVE_SMALL:
                break
        else:
            small = 0
    return pu, pv, used


def solve_state(config: ProblemConfig, x: float, t: float) -> tuple[float, float]:
    """(u, v) at a single point; x = a resolves to the right half."""
    _check_time(t)
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"x must lie in [0, 1], got {x}")
    side = "right" if x >= config.a else "left"
    basis, u_coeff, v_coeff = _side_data(config, side)
    lam = np.array(basis.eigenvalues)
    h = np.array(basis.h_consts)
    rho = (x - config.a) / basis.length if side == "right" else (config.a - x) / basis.length
    g = np.array(
        [shape_function(basis.exponent, j_n, rho)[0] for j_n in basis.zeros]
    )
    decay = np.exp(-lam * t)
    factor = 2.0 * decay * g / h
    pu, pv, _ = _truncated_sum(factor * u_coeff, factor * v_coeff, config.series_tol)
    u, v = _rotate(config.alpha, config.beta, t, pu, pv)
    return float(u), float(v)


def solve_profile(config: ProblemConfig, xs, ts) -> tuple[np.ndarray, np.ndarray]:
    """(u, v) on a space-time grid, shapes (len(ts), len(xs)); all modes used."""
    xs = np.asarray(xs, dtype=float)
    ts = np.asarray(ts, dtype=float)
    if xs.ndim != 1 or ts.ndim != 1:
        raise ValueError("xs and ts must be 1-d")
    if np.any(xs < 0.0) or np.any(xs > 1.0):
        raise ValueError("profile points must lie in [0, 1]")
    for t in ts:
        _check_time(float(t))
    pu = np.zeros((len(ts), len(xs)))
    pv = np.zeros((len(ts), len(xs)))
    for side, mask in (("left", xs < config.a), ("right", xs >= config.a)):
        if not np.any(mask):
            continue
        basis, u_coeff, v_coeff = _side_data(config, side)
        rho = np.abs(xs[mask] - config.a) / basis.length
        g = np.stack(
            [shape_function(basis.exponent, j_n, rho) for j_n in basis.zeros]
        )  # (modes, nx_side)
        h = np.array(basis.h_consts)
        decay = np.exp(-np.outer(ts, np.array(basis.eigenvalues)))  # (nt, modes)
        pu[:, mask] = decay @ ((2.0 * u_coeff / h)[:, None] * g)
        pv[:, mask] = decay @ ((2.0 * v_coeff / h)[:, None] * g)
    u, v = _rotate(config.alpha, config.beta, ts[:, None], pu, pv)
    return u, v


def _flux_factors(config: ProblemConfig, side: int):
    if side not in (0, 1):
        raise ValueError(f"side must be 0 or 1, got {side}")
    name = "right" if side == 1 else "left"
    basis, u_coeff, v_coeff = _side_data(config, name)
    k = basis.exponent.k
    sign = 1.0 if side == 1 else -1.0
    pref = sign * 2.0 * k / (basis.length * np.array(basis.d_consts))
    return basis, pref * u_coeff, pref * v_coeff


def flux(config: ProblemConfig, side: int, t: float) -> tuple[float, float]:
    """(d_x u, d_x v) at boundary `side` (0 or 1), truncated series."""
    _check_time(t)
    basis, fu, fv = _flux_factors(config, side)
    decay = np.exp(-np.array(basis.eigenvalues) * t)
    pu, pv, _ = _truncated_sum(decay * fu, decay * fv, config.series_tol)
    du, dv = _rotate(config.alpha, config.beta, t, pu, pv)
    return float(du), float(dv)


def flux_profile(config: ProblemConfig, side: int, ts) -> tuple[np.ndarray, np.ndarray]:
    """(d_x u, d_x v) at boundary `side` for an array of times; all modes used."""
    ts = np.asarray(ts, dtype=float)
    if ts.ndim != 1:
        raise ValueError("ts must be 1-d")
    if np.any(ts < T_MIN):
        raise ValueError(f"evaluation times must be >= {T_MIN}")
    basis, fu, fv = _flux_factors(config, side)
    decay = np.exp(-np.outer(ts, np.array(basis.eigenvalues)))
    return _rotate(config.alpha, config.beta, ts, decay @ fu, decay @ fv)


def time_grid(t1: float, t2: float, samples: int) -> np.ndarray:
    """Uniform grid on [t1, t2] with entries below T_MIN dropped."""
    if samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")
    if not (t2 > t1 >= 0.0):
        raise ValueError(f"need 0 <= t1 < t2, got ({t1}, {t2})")
    ts = np.linspace(t1, t2, samples)
    ts = ts[ts >= T_MIN]
    if len(ts) == 0:
        raise ValueError(f"no grid points at or above {T_MIN} in [{t1}, {t2}]")
    return ts


@dataclass(frozen=True)
class FluxSample:
    t: float
    side: int
    du: float
    dv: float


@dataclass(frozen=True)
class Measurement:
    """Boundary-flux record, grouped by side, strictly increasing in time."""

    samples: tuple[FluxSample, ...]

    def __post_init__(self):
        prev: dict[int, float] = {}
        seen: list[int] = []
        for s in self.samples:
            if s.side not in (0, 1):
                raise ValueError(f"side must be 0 or 1, got {s.side}")
            if s.t < T_MIN:
                raise ValueError(f"sample time {s.t} below {T_MIN}")
            if s.side in prev and s.t <= prev[s.side]:
                raise ValueError(f"times must strictly increase within side {s.side}")
            if s.side not in seen:
                seen.append(s.side)
            prev[s.side] = s.t
        if seen != sorted(seen):
            raise ValueError("samples must be grouped by side, side 0 first")

    @property
    def sides(self) -> tuple[int, ...]:
        out: list[int] = []
        for s in self.samples:
            if s.side not in out:
                out.append(s.side)
        return tuple(out)

    def times(self, side: int) -> np.ndarray:
        return np.array([s.t for s in self.samples if s.side == side])

    def values(self, side: int) -> tuple[np.ndarray, np.ndarray]:
        du = np.array([s.du for s in self.samples if s.side == side])
        dv = np.array([s.dv for s in self.samples if s.side == side])
        return du, dv


def measure(
    config: ProblemConfig,
    times,
    sides=(1,),
    noise_percent: float = 0.0,
    seed: int = 0,
) -> Measurement:
    """Boundary-flux record at the given times, optionally noisy.

    Noise draws follow a fixed order (side ascending, then time, then the
    du and dv components), so a seed determines the record exactly.
    """
    ts = np.asarray(times, dtype=float)
    if noise_percent < 0.0:
        raise ValueError(f"noise level must be >= 0, got {noise_percent}")
    rng = np.random.Generator(np.random.Philox(seed))
    scale = noise_percent / 100.0
    samples: list[FluxSample] = []
    for side in sorted(set(int(s) for s in sides)):
        du, dv = flux_profile(config, side, ts)
        for i, t in enumerate(ts):
            xi = rng.standard_normal(2)
            samples.append(
                FluxSample(
                    t=float(t),
                    side=side,
                    du=float(du[i] * (1.0 + scale * xi[0])),
                    dv=float(dv[i] * (1.0 + scale * xi[1])),
                )
            )
    return Measurement(samples=tuple(samples))


def write_measurement_csv(path, measurement: Measurement) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "side", "du", "dv"])
        for s in measurement.samples:
            writer.writerow([f"{s.t:.17g}", s.side, f"{s.du:.17g}", f"{s.dv:.17g}"])


def read_measurement_csv(path) -> Measurement:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["t", "side", "du", "dv"]:
            raise ValueError(f"unexpected measurement header: {header}")
        samples = tuple(
            FluxSample(t=float(r[0]), side=int(r[1]), du=float(r[2]), dv=float(r[3]))
            for r in reader
            if r
        )
    return Measurement(samples=samples)
