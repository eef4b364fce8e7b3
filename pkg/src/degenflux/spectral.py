"""Eigenpairs of the degenerate operator d/dx(|x-a|^theta d/dx) on one side.

The interval splits at the degeneracy point a into independent halves.
On each half the operator, with a Dirichlet condition at the outer
endpoint and the natural (weighted-flux) condition at a, has the
discrete spectrum

    lambda_n = k^2 j_{nu,n}^2 / L^{2k},    L = side length,

with k = (2 - theta)/2 and nu = (theta - 1)/(2 - theta), where j_{nu,n}
are the positive zeros of J_nu. The eigenfunctions, L^2-normalised on
the half, are

    psi_n(x) = sqrt(2k/L) / |J'_nu(j_n)| * rho^{(1-theta)/2} J_nu(j_n rho^k),

with rho = (x-a)/L on the right half and (a-x)/L on the left. At x = a
the product rho^{(1-theta)/2} J_nu(j_n rho^k) has a finite limit,
(j_n/2)^nu / Gamma(nu+1), because the exponents cancel exactly; psi_n
is extended continuously by that value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j, bessel_j_prime, bessel_zeros, gamma

_IDENTITY_TOL = 1e-14


@dataclass(frozen=True)
class DegeneracyExponent:
    """Derived constants of the degeneracy exponent theta in [1, 2)."""

    theta: float
    k: float
    nu: float

    @classmethod
    def from_theta(cls, theta: float) -> "DegeneracyExponent":
        if not (1.0 <= theta < 2.0):
            raise ValueError(f"theta must lie in [1, 2), got {theta}")
        k = (2.0 - theta) / 2.0
        nu = (theta - 1.0) / (2.0 - theta)
        # 1/(2k) = nu + 1 ties the two constants together; refuse drift
        if abs(1.0 / (2.0 * k) - (nu + 1.0)) > _IDENTITY_TOL * (nu + 1.0):
            raise ValueError(f"inconsistent exponent constants for theta={theta}")
        return cls(theta=theta, k=k, nu=nu)


# J'_nu at the first `modes` zeros; a-independent, reused across candidate a
_prime_cache: dict[tuple[float, int], tuple[float, ...]] = {}


def _primes_at_zeros(nu: float, modes: int) -> tuple[float, ...]:
    key = (nu, modes)
    hit = _prime_cache.get(key)
    if hit is None:
        table = bessel_zeros(nu, modes)
        hit = tuple(bessel_j_prime(nu, z) for z in table.zeros)
        _prime_cache[key] = hit
    return hit


@dataclass(frozen=True)
class SpectralBasis:
    """Eigenvalues and eigenfunction data on one side of the split."""

    side: str  # "left" for (0, a), "right" for (a, 1)
    a: float
    exponent: DegeneracyExponent
    zeros: tuple[float, ...]
    primes: tuple[float, ...]  # J'_nu(j_n)
    eigenvalues: tuple[float, ...]
    d_consts: tuple[float, ...]  # J'_nu(j_n) j_n^{nu+1}
    h_consts: tuple[float, ...]  # J'_nu(j_n)^2 j_n^{nu+2}

    @property
    def length(self) -> float:
        return self.a if self.side == "left" else 1.0 - self.a

    @property
    def modes(self) -> int:
        return len(self.zeros)


def build_basis(side: str, a: float, theta: float, modes: int) -> SpectralBasis:
    """Eigen-decomposition data for one half of (0, 1)."""
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    if not (0.0 < a < 1.0):
        raise ValueError(f"degeneracy point must lie in (0, 1), got {a}")
    if modes < 1:
        raise ValueError(f"modes must be >= 1, got {modes}")
    exp = DegeneracyExponent.from_theta(theta)
    length = a if side == "left" else 1.0 - a
    zeros = bessel_zeros(exp.nu, modes).zeros
    primes = _primes_at_zeros(exp.nu, modes)
    scale = exp.k * exp.k / length ** (2.0 * exp.k)
    eigs = tuple(scale * z * z for z in zeros)
    d_consts = tuple(dp * z ** (exp.nu + 1.0) for dp, z in zip(primes, zeros))
    h_consts = tuple(dp * dp * z ** (exp.nu + 2.0) for dp, z in zip(primes, zeros))
    return SpectralBasis(
        side=side,
        a=a,
        exponent=exp,
        zeros=zeros,
        primes=primes,
        eigenvalues=eigs,
        d_consts=d_consts,
        h_consts=h_consts,
    )


def _rho(basis: SpectralBasis, x: np.ndarray) -> np.ndarray:
    if basis.side == "right":
        return (x - basis.a) / basis.length
    return (basis.a - x) / basis.length


def shape_function(exp: DegeneracyExponent, j_n: float, rho: np.ndarray) -> np.ndarray:
    """rho^{(1-theta)/2} J_nu(j_n rho^k) on [0, 1], continuous value at 0."""
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    out = np.empty_like(rho)
    at_tip = rho <= 0.0
    out[at_tip] = (j_n / 2.0) ** exp.nu / gamma(exp.nu + 1.0)
    ri = rho[~at_tip]
    vals = np.fromiter(
        (bessel_j(exp.nu, j_n * r**exp.k) for r in ri), dtype=float, count=ri.size
    )
    out[~at_tip] = ri ** ((1.0 - exp.theta) / 2.0) * vals
    return out


def eigenfunction(basis: SpectralBasis, n: int, x) -> np.ndarray | float:
    """Normalised eigenfunction psi_n (1-based) on the closed half-interval."""
    if not (1 <= n <= basis.modes):
        raise ValueError(f"mode index {n} outside 1..{basis.modes}")
    exp = basis.exponent
    j_n = basis.zeros[n - 1]
    norm = math.sqrt(2.0 * exp.k / basis.length) / abs(basis.primes[n - 1])
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    rho = _rho(basis, xs)
    if np.any(rho < -1e-12) or np.any(rho > 1.0 + 1e-12):
        raise ValueError(f"point outside the {basis.side} half for a={basis.a}")
    rho = np.clip(rho, 0.0, 1.0)
    result = norm * shape_function(exp, j_n, rho)
    if np.ndim(x) == 0:
        return float(result[0])
    return result.reshape(np.shape(x))
