"""Flux sensitivity in the degeneracy point and the waiting-time bound.

The right-boundary flux pair F(a, t) = (d_x u, d_x v)(1, t) depends on a
through the eigenvalues, the interval length and the modal coefficients.
Differentiating the series termwise,

    dF/da = e^{alpha t} R(beta t) sum_n c_n (U'_n + (1/L - lambda'_n t) U_n,
                                             V'_n + (1/L - lambda'_n t) V_n),

with L = 1 - a, c_n = 2k e^{-lambda_n t} / (L d_n) and
lambda'_n = 2k lambda_n / L. The sensitivity D(a, t) is the Euclidean
norm of that pair; the rotation drops out. Reconstruction of a from
right-boundary data is locally well posed at times where D stays away
from zero, and the waiting-time bound gives a t after which the
first-mode term dominates the tail for any admissible a.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j_prime, bessel_zeros
from .forward import ProblemConfig, _side_data
from .quadrature import modal_coefficient_derivatives
from .spectral import DegeneracyExponent


UNSTABLE_RATIO = 1e-2


@dataclass(frozen=True)
class LipschitzData:
    """Hypothesis record for the waiting-time bound.

    m1..m4 bound the initial data and its derivative (sup norms of u0,
    u0', v0, v0'); delta is the required lower bound on the first modal
    coefficient vector; margin is the target sensitivity level; (tau,
    gamma) is the admissible interval for the degeneracy point.
    """

    m1: float
    m2: float
    m3: float
    m4: float
    delta: float
    margin: float
    tau: float = 0.0
    gamma: float = 0.999

    def __post_init__(self):
        if min(self.m1, self.m2, self.m3, self.m4) < 0.0:
            raise ValueError("data bounds must be nonnegative")
        if self.delta <= 0.0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.margin <= 0.0:
            raise ValueError(f"margin must be positive, got {self.margin}")
        if not (0.0 <= self.tau < self.gamma < 1.0):
            raise ValueError(f"need 0 <= tau < gamma < 1, got ({self.tau}, {self.gamma})")


def flux_sensitivity(config: ProblemConfig, t: float) -> float:
    """|dF/da| for the right-boundary flux pair at time t."""
    if t <= 0.0:
        raise ValueError(f"time must be positive, got {t}")
    basis, u_coeff, v_coeff = _side_data(config, "right")
    du_coeff = modal_coefficient_derivatives(
        basis, lambda x: config.initial.du0(x, config.a), config.quad_order
    )
    dv_coeff = modal_coefficient_derivatives(
        basis, lambda x: config.initial.dv0(x, config.a), config.quad_order
    )
    k = basis.exponent.k
    length = basis.length
    lam = np.array(basis.eigenvalues)
    d = np.array(basis.d_consts)
    c = 2.0 * k * np.exp(-lam * t) / (length * d)
    geom = 1.0 / length - (2.0 * k * lam / length) * t
    su = float(np.sum(c * (du_coeff + geom * u_coeff)))
    sv = float(np.sum(c * (dv_coeff + geom * v_coeff)))
    return math.exp(config.alpha * t) * math.hypot(su, sv)


@dataclass(frozen=True)
class ScanResult:
    """Sensitivity D over a grid of candidate degeneracy points at fixed t."""

    theta: float
    alpha: float
    beta: float
    t: float
    a_values: tuple[float, ...]
    d_values: tuple[float, ...]

    @property
    def minimum(self) -> float:
        return min(self.d_values)

    @property
    def argmin(self) -> float:
        return self.a_values[self.d_values.index(self.minimum)]

    @property
    def maximum(self) -> float:
        return max(self.d_values)


def stability_scan(config: ProblemConfig, t: float, a_values) -> ScanResult:
    """D(a, t) for each a in a_values, holding everything else from config."""
    a_values = [float(a) for a in a_values]
    d_values = []
    for a in a_values:
        local = ProblemConfig(
            theta=config.theta,
            a=a,
            alpha=config.alpha,
            beta=config.beta,
            initial=config.initial,
            modes=config.modes,
            series_tol=config.series_tol,
            quad_order=config.quad_order,
        )
        d_values.append(flux_sensitivity(local, t))
    return ScanResult(
        theta=config.theta,
        alpha=config.alpha,
        beta=config.beta,
        t=t,
        a_values=tuple(a_values),
        d_values=tuple(d_values),
    )


def scan_summary(result: ScanResult) -> dict:
    return {
        "min": result.minimum,
        "argmin": result.argmin,
        "t": result.t,
        "theta": result.theta,
        "alpha": result.alpha,
        "beta": result.beta,
    }


def scan_flag(result: ScanResult) -> str:
    """Near-vanishing verdict: UNSTABLE when min D dips below 1e-2 of max D."""
    if result.maximum == 0.0:
        return "UNSTABLE"
    return "UNSTABLE" if result.minimum <= UNSTABLE_RATIO * result.maximum else "STABLE"


def write_scan_csv(path, result: ScanResult) -> None:
    with open(path, "w") as fh:
        fh.write("a,D\n")
        for a, d in zip(result.a_values, result.d_values):
            fh.write(f"{a:.17g},{d:.17g}\n")


def write_scan_summary(path, result: ScanResult) -> None:
    with open(path, "w") as fh:
        json.dump(scan_summary(result), fh, indent=2)
        fh.write("\n")


def waiting_time_bound(lip: LipschitzData, theta: float) -> float:
    """Time after which the first-mode flux term dominates, for any admissible a.

    Closed form: (1 / (sqrt(2) k^3 j_1^2 delta)) *
    sqrt(margin^2 + j_1^(2(nu+1)) J'_nu(j_1)^2 (m2^2 + m4^2)).
    """
    exp = DegeneracyExponent.from_theta(theta)
    j1 = bessel_zeros(exp.nu, 1).zeros[0]
    dj1 = bessel_j_prime(exp.nu, j1)
    prefactor = 1.0 / (math.sqrt(2.0) * exp.k**3 * j1 * j1 * lip.delta)
    tail = j1 ** (2.0 * (exp.nu + 1.0)) * dj1 * dj1 * (lip.m2 * lip.m2 + lip.m4 * lip.m4)
    return prefactor * math.sqrt(lip.margin * lip.margin + tail)
