"""Fast self-contained invariant checks, runnable in the field.

Each check exercises one load-bearing property of the toolkit with no
reference data beyond closed-form values. The optional fault injection
perturbs a copy of a zero table before validation; a healthy build must
then report the zero checks as failed, which demonstrates that the
validation actually bites.
"""

from __future__ import annotations

import math
import os
import tempfile
import time
from dataclasses import dataclass

import numpy as np

from .bessel import ZeroTable, bessel_j, bessel_zeros, check_zero_bounds
from .forward import ProblemConfig, flux, measure, read_measurement_csv, write_measurement_csv
from .inverse import ObjectiveSpec, objective_eval
from .quadrature import InitialData, gauss_legendre
from .spectral import DegeneracyExponent, build_basis, eigenfunction

_ZERO_MENU = (0.0, 3.0 / 7.0, 0.5, 1.0, 3.0, 9.0)


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    passed: bool
    detail: str

    def __post_init__(self):
        # comparisons on numpy scalars yield np.bool_; keep the field plain
        object.__setattr__(self, "passed", bool(self.passed))


@dataclass(frozen=True)
class SelftestReport:
    passed: bool
    elapsed: float
    checks: tuple[CheckOutcome, ...]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "elapsed": self.elapsed,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks
            ],
        }


def _check_zero_tables(inject_zero_fault: bool) -> CheckOutcome:
    worst = 0.0
    violations: list[str] = []
    for nu in _ZERO_MENU:
        table = bessel_zeros(nu, 30)
        if inject_zero_fault and nu == 0.5:
            table = ZeroTable(nu=nu, zeros=tuple(z + 2e-2 for z in table.zeros))
        worst = max(worst, max(abs(bessel_j(nu, z)) for z in table.zeros))
        violations.extend(check_zero_bounds(table))
    passed = worst <= 1e-12 and not violations
    detail = f"max residual {worst:.3e}, {len(violations)} bound violations"
    return CheckOutcome(name="zero-tables", passed=passed, detail=detail)


def _check_half_order_zeros() -> CheckOutcome:
    zs = bessel_zeros(0.5, 20).zeros
    err = max(abs(z - (n + 1) * math.pi) for n, z in enumerate(zs))
    return CheckOutcome(
        name="half-order-zeros", passed=err <= 1e-12, detail=f"max |j - n pi| = {err:.3e}"
    )


def _check_quadrature() -> CheckOutcome:
    rule = gauss_legendre(16)
    worst = abs(float(np.sum(rule.weights)) - 2.0)
    for d in range(32):
        exact = 0.0 if d % 2 else 2.0 / (d + 1.0)
        got = float(np.sum(rule.weights * rule.nodes**d))
        worst = max(worst, abs(got - exact))
    return CheckOutcome(
        name="quadrature-exactness", passed=worst <= 1e-13, detail=f"max defect {worst:.3e}"
    )


def _check_exponent_identity() -> CheckOutcome:
    worst = 0.0
    for theta in (1.0, 1.3, 1.5, 1.9):
        exp = DegeneracyExponent.from_theta(theta)
        worst = max(worst, abs(1.0 / (2.0 * exp.k) - (exp.nu + 1.0)))
    return CheckOutcome(
        name="exponent-identity", passed=worst <= 1e-14, detail=f"max drift {worst:.3e}"
    )


def _check_orthonormality() -> CheckOutcome:
    # Integrate in sigma with x = a + L sigma^(1/k): the weight sigma^(1/k-1)
    # absorbs the |x-a| kink, leaving a smooth integrand Gauss handles exactly.
    basis = build_basis("right", 0.37, 1.5, 4)
    k = basis.exponent.k
    rule = gauss_legendre(80)
    sigma = (rule.nodes + 1.0) / 2.0
    xs = basis.a + basis.length * sigma ** (1.0 / k)
    ws = rule.weights / 2.0 * (basis.length / k) * sigma ** (1.0 / k - 1.0)
    worst = 0.0
    for n in range(1, 5):
        fn = eigenfunction(basis, n, xs)
        for m in range(n, 5):
            fm = fn if m == n else eigenfunction(basis, m, xs)
            got = float(np.sum(ws * fn * fm))
            worst = max(worst, abs(got - (1.0 if m == n else 0.0)))
    return CheckOutcome(
        name="orthonormality", passed=worst <= 1e-12, detail=f"max Gram defect {worst:.3e}"
    )


def _check_decoupling() -> CheckOutcome:
    data = InitialData.tabulated(
        xs=(0.0, 0.4, 0.41, 1.0), us=(0.0, 0.0, 1.0, 1.0), vs=(0.0, 0.0, 0.5, 0.5)
    )
    config = ProblemConfig(theta=1.3, a=0.4, alpha=0.7, beta=0.3, initial=data, modes=20)
    du, dv = flux(config, 0, 0.8)
    worst = max(abs(du), abs(dv))
    return CheckOutcome(
        name="decoupling", passed=worst == 0.0, detail=f"left flux for right-supported data {worst:.3e}"
    )


def _check_rotation() -> CheckOutcome:
    data = InitialData.constant(1.0, 0.5)
    base = dict(theta=1.5, a=0.45, initial=data, modes=25)
    full = ProblemConfig(alpha=0.8, beta=1.2, **base)
    plain = ProblemConfig(alpha=0.0, beta=0.0, **base)
    worst = 0.0
    for t in (0.2, 1.0, 2.5):
        du, dv = flux(full, 1, t)
        pu, pv = flux(plain, 1, t)
        ea = math.exp(0.8 * t)
        cs, sn = math.cos(1.2 * t), math.sin(1.2 * t)
        worst = max(worst, abs(du - ea * (cs * pu - sn * pv)), abs(dv - ea * (sn * pu + cs * pv)))
    return CheckOutcome(
        name="rotation-factorization", passed=worst <= 1e-12, detail=f"max defect {worst:.3e}"
    )


def _check_measurement_roundtrip() -> CheckOutcome:
    config = ProblemConfig(
        theta=1.5, a=0.5, alpha=1.0, beta=1.0, initial=InitialData.constant(1.0, 1.0), modes=15
    )
    record = measure(config, np.linspace(0.5, 2.0, 7), sides=(0, 1), noise_percent=1.0, seed=11)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "record.csv")
        write_measurement_csv(path, record)
        back = read_measurement_csv(path)
    passed = back == record
    return CheckOutcome(name="measurement-roundtrip", passed=passed, detail=f"identical: {passed}")


def _check_noise_determinism() -> CheckOutcome:
    config = ProblemConfig(
        theta=1.3, a=0.4, alpha=0.5, beta=0.5, initial=InitialData.constant(1.0, 0.0), modes=15
    )
    ts = np.linspace(0.5, 1.5, 5)
    one = measure(config, ts, sides=(1,), noise_percent=2.0, seed=7)
    two = measure(config, ts, sides=(1,), noise_percent=2.0, seed=7)
    other = measure(config, ts, sides=(1,), noise_percent=2.0, seed=8)
    passed = one == two and one != other
    return CheckOutcome(
        name="noise-determinism", passed=passed, detail=f"repeatable and seed-sensitive: {passed}"
    )


def _check_objective_at_truth() -> CheckOutcome:
    config = ProblemConfig(
        theta=1.5, a=0.5, alpha=1.0, beta=1.0, initial=InitialData.constant(1.0, 1.0), modes=20
    )
    record = measure(config, np.array([1.99]), sides=(1,))
    spec = ObjectiveSpec(
        kind="point",
        measurement=record,
        theta=1.5,
        alpha=1.0,
        beta=1.0,
        modes=20,
        initial=InitialData.constant(1.0, 1.0),
    )
    cost = objective_eval(spec, np.array([0.5]))
    return CheckOutcome(
        name="objective-at-truth", passed=cost <= 1e-20, detail=f"cost {cost:.3e}"
    )


def run_selftest(inject_zero_fault: bool = False) -> SelftestReport:
    start = time.monotonic()
    checks = (
        _check_zero_tables(inject_zero_fault),
        _check_half_order_zeros(),
        _check_quadrature(),
        _check_exponent_identity(),
        _check_orthonormality(),
        _check_decoupling(),
        _check_rotation(),
        _check_measurement_roundtrip(),
        _check_noise_determinism(),
        _check_objective_at_truth(),
    )
    elapsed = time.monotonic() - start
    return SelftestReport(passed=all(c.passed for c in checks), elapsed=elapsed, checks=checks)
