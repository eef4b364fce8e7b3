"""Gauss-Legendre quadrature and modal coefficients of initial data.

The modal coefficient of a function f against mode n on one half of the
interval is the weighted Bessel integral

    U_n = int_0^{j_n} f(x(s)) s^{nu+1} J_nu(s) ds,

where x(s) maps the integration variable back to the half: on the right
x(s) = a + (1-a) (s/j_n)^{1/k}, on the left x(s) = a - a (s/j_n)^{1/k}.
Its derivative in a is the same integral with f replaced by
f'(x(s)) (1 - (s/j_n)^{1/k}); the map satisfies dx/da = 1 - rho on both
halves.

The quadrature abscissae in the normalised variable rho = (s/j_n)^{1/k}
do not depend on the mode or on a, so the expensive Bessel evaluations
are computed once per (order, number of modes) and cached per nu.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j, bessel_zeros
from .spectral import DegeneracyExponent, SpectralBasis

MODAL_ORDER_DEFAULT = 200
_MAX_ORDER = 512


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights on [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.nodes.shape != self.weights.shape or self.nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-d arrays of equal length")
        if abs(float(np.sum(self.weights)) - 2.0) > 1e-13:
            raise ValueError("weights must sum to the interval length 2")

    @property
    def order(self) -> int:
        return len(self.nodes)


_rule_cache: dict[int, QuadratureRule] = {}


def gauss_legendre(order: int) -> QuadratureRule:
    """Gauss-Legendre rule with `order` nodes, exact through degree 2*order-1."""
    if not (1 <= order <= _MAX_ORDER):
        raise ValueError(f"order must lie in 1..{_MAX_ORDER}, got {order}")
    hit = _rule_cache.get(order)
    if hit is not None:
        return hit
    n = order
    i = np.arange(n, dtype=float)
    x = np.cos(np.pi * (4.0 * i + 3.0) / (4.0 * n + 2.0))
    for sweep in range(100):
        p_prev = np.ones_like(x)
        p = x.copy()
        for m in range(1, n):
            p_prev, p = p, ((2.0 * m + 1.0) * x * p - m * p_prev) / (m + 1.0)
        if n == 1:
            dp = np.ones_like(x)
        else:
            dp = n * (x * p - p_prev) / (x * x - 1.0)
        step = p / dp
        x = x - step
        if np.max(np.abs(step)) < 1e-15 and sweep >= 2:
            break
    p_prev = np.ones_like(x)
    p = x.copy()
    for m in range(1, n):
        p_prev, p = p, ((2.0 * m + 1.0) * x * p - m * p_prev) / (m + 1.0)
    if n == 1:
        dp = np.ones_like(x)
        w = np.full_like(x, 2.0)
    else:
        dp = n * (x * p - p_prev) / (x * x - 1.0)
        w = 2.0 / ((1.0 - x * x) * dp * dp)
    # enforce the exact symmetry of the rule
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    order_idx = np.argsort(x)
    rule = QuadratureRule(nodes=x[order_idx], weights=w[order_idx])
    rule.nodes.setflags(write=False)
    rule.weights.setflags(write=False)
    _rule_cache[order] = rule
    return rule


@dataclass(frozen=True)
class InitialData:
    """Initial state (u0, v0) on (0, 1) in one of three parametric forms."""

    kind: str  # "constant" | "piecewise" | "tabulated"
    u_params: tuple[float, ...]
    v_params: tuple[float, ...]
    xs: tuple[float, ...] = ()

    @classmethod
    def constant(cls, cu: float, cv: float) -> "InitialData":
        return cls(kind="constant", u_params=(float(cu),), v_params=(float(cv),))

    @classmethod
    def piecewise(cls, u_left: float, u_right: float, v_left: float, v_right: float) -> "InitialData":
        """Constants on (0, a) and (a, 1); the split tracks the a in use."""
        return cls(
            kind="piecewise",
            u_params=(float(u_left), float(u_right)),
            v_params=(float(v_left), float(v_right)),
        )

    @classmethod
    def tabulated(cls, xs, us, vs) -> "InitialData":
        xs = tuple(float(x) for x in xs)
        us = tuple(float(u) for u in us)
        vs = tuple(float(v) for v in vs)
        if len(xs) < 2 or len(xs) != len(us) or len(xs) != len(vs):
            raise ValueError("tabulated data needs matching xs, us, vs with >= 2 rows")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("tabulated grid must be strictly increasing")
        if xs[0] > 0.0 or xs[-1] < 1.0:
            raise ValueError("tabulated grid must cover [0, 1]")
        return cls(kind="tabulated", u_params=us, v_params=vs, xs=xs)

    def _eval(self, params: tuple[float, ...], x: np.ndarray, a: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return np.full_like(x, params[0])
        if self.kind == "piecewise":
            return np.where(x < a, params[0], params[1])
        return np.interp(x, self.xs, params)

    def _eval_slope(self, params: tuple[float, ...], x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind in ("constant", "piecewise"):
            return np.zeros_like(x)
        grid = np.asarray(self.xs)
        vals = np.asarray(params)
        slopes = np.diff(vals) / np.diff(grid)
        seg = np.clip(np.searchsorted(grid, x, side="right") - 1, 0, len(slopes) - 1)
        return slopes[seg]

    def u0(self, x, a: float) -> np.ndarray:
        return self._eval(self.u_params, x, a)

    def v0(self, x, a: float) -> np.ndarray:
        return self._eval(self.v_params, x, a)

    def du0(self, x, a: float) -> np.ndarray:
        """Spatial derivative of u0 (zero a.e. for the piecewise kinds)."""
        return self._eval_slope(self.u_params, x)

    def dv0(self, x, a: float) -> np.ndarray:
        return self._eval_slope(self.v_params, x)


@dataclass(frozen=True)
class ModalKernel:
    """a-independent quadrature data for the weighted Bessel integrals."""

    nu: float
    order: int
    rho: np.ndarray  # (order,) abscissae in the normalised variable
    weights: np.ndarray  # (modes, order) full integrand weight per mode


_kernel_cache: dict[tuple[float, int, int], ModalKernel] = {}


def modal_kernel(exp: DegeneracyExponent, modes: int, order: int = MODAL_ORDER_DEFAULT) -> ModalKernel:
    key = (exp.nu, modes, order)
    hit = _kernel_cache.get(key)
    if hit is not None:
        return hit
    rule = gauss_legendre(order)
    zeros = np.array(bessel_zeros(exp.nu, modes).zeros)
    t = (rule.nodes + 1.0) / 2.0  # s/j_n, shared by all modes
    s = zeros[:, None] * t[None, :]
    flat = s.ravel()
    j_vals = np.fromiter(
        (bessel_j(exp.nu, z) for z in flat), dtype=float, count=flat.size
    ).reshape(s.shape)
    weights = rule.weights[None, :] * (zeros[:, None] / 2.0) * s ** (exp.nu + 1.0) * j_vals
    rho = t ** (1.0 / exp.k)
    rho.setflags(write=False)
    weights.setflags(write=False)
    kernel = ModalKernel(nu=exp.nu, order=order, rho=rho, weights=weights)
    _kernel_cache[key] = kernel
    return kernel


def _sample_points(basis: SpectralBasis, rho: np.ndarray) -> np.ndarray:
    if basis.side == "right":
        return basis.a + basis.length * rho
    return basis.a - basis.length * rho


def modal_coefficients(basis: SpectralBasis, func, order: int = MODAL_ORDER_DEFAULT) -> np.ndarray:
    """Weighted Bessel integrals of func over one half, all modes at once.

    func maps an array of x-values in the half to data values, e.g. a bound
    InitialData component.
    """
    kernel = modal_kernel(basis.exponent, basis.modes, order)
    x = _sample_points(basis, kernel.rho)
    return kernel.weights @ np.asarray(func(x), dtype=float)


def modal_coefficient_derivatives(basis: SpectralBasis, dfunc, order: int = MODAL_ORDER_DEFAULT) -> np.ndarray:
    """d/da of the modal coefficients; dfunc is the spatial derivative of the data."""
    kernel = modal_kernel(basis.exponent, basis.modes, order)
    x = _sample_points(basis, kernel.rho)
    return kernel.weights @ (np.asarray(dfunc(x), dtype=float) * (1.0 - kernel.rho))
