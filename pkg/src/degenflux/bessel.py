"""Bessel functions of the first kind for real nonnegative order.

Provides J_nu(z), its derivative, and tables of positive zeros to near
machine precision. Three evaluation regimes:

  * power series, accumulated in 80-bit extended precision, for z <= 14
    or whenever nu >= z (the series is well conditioned there);
  * the large-argument cosine expansion for z > 14 at orders nu <= 2
    (optimally truncated; its smallest term scales like e^{-2z}, which
    is why the switch sits at 14 rather than lower);
  * for nu > 2 at z > 14 the expansion is evaluated at a fractional
    seed order f in (1,2] and raised by the three-term recurrence
    J_{m+1}(z) = (2m/z) J_m(z) - J_{m-1}(z), which is stable while the
    order stays below z (always true on this branch).

Zeros are found by Newton's method seeded with the McMahon expansion,
safeguarded by bisection inside a bracket known to contain exactly one
zero. For nu > 3.5 the per-index brackets overlap, so zeros are located
by scanning for sign changes instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_SERIES_RADIUS = 14.0
_SERIES_TERM_CAP = 60
_Z_MAX = 1.0e6  # beyond this the phase z - (nu/2 + 1/4)pi has lost too many digits
_NEWTON_CAP = 30

# Lanczos coefficients, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_LD = np.longdouble
_SQRT_TWO_PI_LD = np.sqrt(_LD(2) * _LD(np.pi))


def _gamma_ld(x: np.longdouble) -> np.longdouble:
    # real positive arguments only; callers guarantee x > 0
    if x < 0.5:
        # reflection keeps the small-argument tail of the contract domain honest
        return _LD(np.pi) / (np.sin(_LD(np.pi) * x) * _gamma_ld(_LD(1) - x))
    y = x - _LD(1)
    acc = _LD(_LANCZOS_C[0])
    for i in range(1, len(_LANCZOS_C)):
        acc += _LD(_LANCZOS_C[i]) / (y + _LD(i))
    t = y + _LD(_LANCZOS_G) + _LD(0.5)
    return _SQRT_TWO_PI_LD * t ** (y + _LD(0.5)) * np.exp(-t) * acc


def gamma(x: float) -> float:
    """Gamma function for real x in (0, 80]."""
    if not math.isfinite(x) or x <= 0.0:
        raise ValueError(f"gamma defined here for positive real arguments, got {x}")
    if x > 80.0:
        raise ValueError(f"gamma argument {x} outside supported range (0, 80]")
    return float(_gamma_ld(_LD(x)))


def _series_j(nu: float, z: float) -> float:
    # ascending series, extended-precision accumulation, <= 60 terms
    half = _LD(z) / 2
    term = half ** _LD(nu) / _gamma_ld(_LD(nu) + 1)
    total = term
    neg_q = -(half * half)
    small = 0
    for k in range(1, _SERIES_TERM_CAP + 1):
        term = term * neg_q / (_LD(k) * (_LD(k) + _LD(nu)))
        total += term
        if abs(term) <= _LD(1e-20) * abs(total):
            small += 1
            if small >= 2:
                break
        else:
            small = 0
    return float(total)


def _asymptotic_j(nu: float, z: float) -> float:
    # cosine expansion with optimal truncation; valid here for nu <= 3, z > 14
    mu = 4.0 * nu * nu
    p = 1.0
    q = 0.0
    term = 1.0
    prev = math.inf
    for k in range(1, 40):
        term *= (mu - (2 * k - 1) ** 2) / (8.0 * k * z)
        if abs(term) >= prev:
            break
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p += sign * term
        else:
            q += sign * term
        prev = abs(term)
        if prev < 1e-18:
            break
    omega = z - (0.5 * nu + 0.25) * math.pi
    return math.sqrt(2.0 / (math.pi * z)) * (math.cos(omega) * p - math.sin(omega) * q)


def bessel_j(nu: float, z: float) -> float:
    """J_nu(z) for nu >= 0, z >= 0."""
    if not (math.isfinite(nu) and math.isfinite(z)):
        raise ValueError(f"bessel_j needs finite arguments, got nu={nu}, z={z}")
    if nu < 0.0:
        raise ValueError(f"order must be nonnegative, got {nu}")
    if z < 0.0:
        raise ValueError(f"argument must be nonnegative, got {z}")
    if z > _Z_MAX:
        raise ValueError(f"argument {z} beyond supported range {_Z_MAX}")
    if z == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    if z <= _SERIES_RADIUS or nu >= z:
        return _series_j(nu, z)
    if nu <= 2.0:
        return _asymptotic_j(nu, z)
    # seed at fractional order f in (1, 2], then recur upward to nu
    m = math.ceil(nu) - 2
    f = nu - m
    ja = _asymptotic_j(f, z)
    jb = _asymptotic_j(f + 1.0, z)
    for i in range(1, m):
        ja, jb = jb, (2.0 * (f + i) / z) * jb - ja
    return jb


def bessel_j_prime(nu: float, z: float) -> float:
    """d/dz J_nu(z) via J'_nu = (nu/z) J_nu - J_{nu+1}."""
    if z < 0.0:
        raise ValueError(f"argument must be nonnegative, got {z}")
    if z == 0.0:
        if nu == 1.0:
            return 0.5
        if nu > 1.0:
            return 0.0
        raise ValueError(f"derivative at 0 undefined for order {nu} < 1")
    return (nu / z) * bessel_j(nu, z) - bessel_j(nu + 1.0, z)


@dataclass(frozen=True)
class ZeroTable:
    """Positive zeros j_{nu,1} < ... < j_{nu,N} of J_nu."""

    nu: float
    zeros: tuple[float, ...]

    def __post_init__(self):
        prev = 0.0
        for z in self.zeros:
            if not z > prev:
                raise ValueError("zeros must be positive and strictly increasing")
            prev = z

    def __len__(self) -> int:
        return len(self.zeros)


def zero_bracket(nu: float, n: int) -> tuple[float, float]:
    """Interval guaranteed to contain j_{nu,n} (tight only for nu <= 3.5)."""
    if nu <= 0.5:
        lo = math.pi * (n + nu / 2.0 - 0.25)
        hi = math.pi * (n + nu / 4.0 - 0.125)
    else:
        lo = math.pi * (n + nu / 4.0 - 0.125)
        hi = math.pi * (n + nu / 2.0 - 0.25)
    return lo, hi


def check_zero_bounds(table: ZeroTable) -> list[str]:
    """Violations of the zero-location bounds; empty when all hold.

    The bracket can degenerate to a point (half-integer orders), so the
    comparison allows a few ulps of slack around the exact endpoints.
    """
    bad = []
    for n, z in enumerate(table.zeros, start=1):
        lo, hi = zero_bracket(table.nu, n)
        slack = 8.0 * np.finfo(float).eps * hi
        if not (lo - slack <= z <= hi + slack):
            bad.append(f"j_({table.nu},{n}) = {z!r} outside [{lo!r}, {hi!r}]")
    return bad


def _refine_zero(nu: float, x0: float, lo: float, hi: float, n: int) -> float:
    # Newton with a sign-preserving bracket; bisection after 5 non-contracting steps
    f_lo = bessel_j(nu, lo)
    f_hi = bessel_j(nu, hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0.0:
        raise ValueError(f"no sign change for zero search: nu={nu}, n={n}, bracket=({lo}, {hi})")
    x = min(max(x0, lo), hi)
    last_step = math.inf
    bad_steps = 0
    for _ in range(_NEWTON_CAP):
        fx = bessel_j(nu, x)
        if fx == 0.0:
            return x
        # shrink the bracket around the sign change
        if fx * f_lo > 0.0:
            lo = x
        else:
            hi = x
        fpx = bessel_j_prime(nu, x)
        step = fx / fpx if fpx != 0.0 else math.inf
        x_new = x - step
        contracted = abs(step) < 0.5 * abs(last_step)
        inside = lo < x_new < hi
        if not inside or not contracted:
            bad_steps += 1
        if not inside or bad_steps >= 5:
            # bisect down to a tight bracket, then polish
            for _ in range(120):
                mid = 0.5 * (lo + hi)
                fm = bessel_j(nu, mid)
                if fm == 0.0:
                    return mid
                if fm * f_lo > 0.0:
                    lo = mid
                else:
                    hi = mid
                if hi - lo <= 1e-14 * max(1.0, hi):
                    break
            x = 0.5 * (lo + hi)
            fx = bessel_j(nu, x)
            fpx = bessel_j_prime(nu, x)
            if fpx != 0.0:
                x -= fx / fpx
            return x
        last_step = step
        x = x_new
        if abs(step) <= 1e-14 * max(1.0, abs(x)):
            # one extra polish step so the residual sits at rounding level
            fpx = bessel_j_prime(nu, x)
            if fpx != 0.0:
                x -= bessel_j(nu, x) / fpx
            return x
    raise ValueError(f"zero search stalled: nu={nu}, n={n}, bracket=({lo}, {hi})")


def _zeros_by_brackets(nu: float, count: int) -> list[float]:
    out = []
    for n in range(1, count + 1):
        lo, hi = zero_bracket(nu, n)
        # pad so roundoff at the ends cannot hide the sign change
        pad = 1e-9 * max(1.0, hi)
        beta = (n + 0.5 * nu - 0.25) * math.pi
        seed = beta - (4.0 * nu * nu - 1.0) / (8.0 * beta)
        out.append(_refine_zero(nu, seed, lo - pad, hi + pad, n))
    return out


def _zeros_by_scan(nu: float, count: int) -> list[float]:
    # consecutive zeros are more than pi/2 apart, so this step cannot skip one
    step = 0.5 * math.pi
    x = nu + 1e-3
    fx = bessel_j(nu, x)
    out: list[float] = []
    guard = 0
    while len(out) < count:
        guard += 1
        if guard > 40 * (count + 4):
            raise ValueError(f"zero scan stalled: nu={nu}, n={len(out) + 1}, last x={x}")
        x_next = x + step
        f_next = bessel_j(nu, x_next)
        if fx == 0.0:
            out.append(x)
        elif fx * f_next < 0.0:
            n = len(out) + 1
            out.append(_refine_zero(nu, 0.5 * (x + x_next), x, x_next, n))
        x, fx = x_next, f_next
    return out


_zero_cache: dict[tuple[float, int], ZeroTable] = {}


def bessel_zeros(nu: float, count: int) -> ZeroTable:
    """First `count` positive zeros of J_nu, cached per (nu, count)."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if not math.isfinite(nu) or nu < 0.0:
        raise ValueError(f"order must be finite and nonnegative, got {nu}")
    key = (nu, count)
    hit = _zero_cache.get(key)
    if hit is not None:
        return hit
    zs = _zeros_by_brackets(nu, count) if nu <= 3.5 else _zeros_by_scan(nu, count)
    for n, z in enumerate(zs, start=1):
        if abs(bessel_j(nu, z)) > 1e-12:
            raise ValueError(f"zero refinement too loose: nu={nu}, n={n}, residual at {z}")
    table = ZeroTable(nu=nu, zeros=tuple(zs))
    _zero_cache[key] = table
    return table


def min_slope_product(table: ZeroTable) -> float:
    """Empirical min of j_{nu,n} |J'_nu(j_{nu,n})| over the table."""
    return min(z * abs(bessel_j_prime(table.nu, z)) for z in table.zeros)
