import math

import numpy as np
import pytest
from scipy.integrate import quad

from degenflux.bessel import (
    ZeroTable,
    bessel_j,
    bessel_j_prime,
    bessel_zeros,
    check_zero_bounds,
    gamma,
    min_slope_product,
    zero_bracket,
)
from oracles import mp_bessel_j, mp_bessel_j_prime, mp_bessel_zero, mp_gamma

# values pinned from the mpmath oracle at 30 digits
FROZEN_ZEROS = {
    (0.0, 1): 2.4048255576957729,
    (0.0, 2): 5.5200781102863106,
    (0.0, 3): 8.6537279129110125,
    (1.0, 1): 3.8317059702075125,
    (3.0 / 7.0, 1): 3.0398276771023887,
    (3.0 / 7.0, 4): 12.456824623564138,
    (9.0, 1): 13.354300477435331,
}
FROZEN_PRIMES = {
    (0.0, 2.4048255576957729): -0.51914749728946652,
    (1.0, 3.8317059702075125): -0.40275939570255265,
}


def test_half_order_zeros_are_multiples_of_pi():
    zeros = bessel_zeros(0.5, 20).zeros
    for n, z in enumerate(zeros, start=1):
        assert abs(z - n * math.pi) <= 1e-12


def test_frozen_zero_values():
    for (nu, n), ref in FROZEN_ZEROS.items():
        got = bessel_zeros(nu, n).zeros[n - 1]
        assert abs(got - ref) <= 1e-13 * ref


def test_zeros_match_mpmath():
    for nu in (0.0, 3.0 / 7.0, 1.0, 2.5, 9.0):
        zeros = bessel_zeros(nu, 20).zeros
        for n in (1, 5, 20):
            assert abs(zeros[n - 1] - mp_bessel_zero(nu, n)) <= 1e-12


def test_zero_residuals_small():
    for nu in (0.0, 0.25, 1.0, 5.0 / 3.0, 3.0, 9.0):
        for z in bessel_zeros(nu, 30).zeros:
            assert abs(bessel_j(nu, z)) <= 1e-12


def test_zero_bounds_hold_for_fifty_zeros():
    for nu in (0.0, 3.0 / 7.0, 0.5, 1.0, 3.0):
        table = bessel_zeros(nu, 50)
        assert check_zero_bounds(table) == []
        for n, z in enumerate(table.zeros, start=1):
            beta = math.pi * (n + nu / 2.0 - 0.25)
            slack = 1e-12 * beta
            if nu <= 0.5:
                assert beta <= z + slack
            if nu >= 0.5:
                assert z <= beta + slack


def test_zero_bracket_contains_reference_zero():
    for nu in (0.0, 0.3, 0.5, 1.0, 2.0):
        for n in (1, 3, 10):
            lo, hi = zero_bracket(nu, n)
            ref = mp_bessel_zero(nu, n)
            assert lo - 1e-9 <= ref <= hi + 1e-9


def test_zero_table_rejects_disorder():
    with pytest.raises(ValueError):
        ZeroTable(nu=0.0, zeros=(2.4, 2.3))


def test_zero_prefix_consistency():
    short = bessel_zeros(1.3, 10).zeros
    long = bessel_zeros(1.3, 30).zeros
    assert long[:10] == short


def test_recurrence_residual():
    zs = np.linspace(0.25, 40.0, 160)
    for nu in (1.0, 1.5, 3.0):
        for z in zs:
            lhs = bessel_j(nu - 1.0, z) + bessel_j(nu + 1.0, z)
            rhs = (2.0 * nu / z) * bessel_j(nu, z)
            assert abs(lhs - rhs) <= 1e-10


def test_small_order_values_match_mpmath():
    zs = np.linspace(0.1, 40.0, 80)
    for nu in (0.0, 0.25, 0.5):
        for z in zs:
            assert abs(bessel_j(nu, z) - mp_bessel_j(nu, float(z))) <= 1e-12


def test_values_match_mpmath_across_regimes():
    for nu in (0.0, 0.5, 2.0, 3.3, 9.0, 17.5, 30.0):
        for z in (0.05, 1.0, 5.0, 13.9, 14.1, 20.0, 50.0, 200.0, 1000.0):
            assert abs(bessel_j(nu, z) - mp_bessel_j(nu, z)) <= 1e-12


def test_boundedness():
    zs = np.concatenate([np.linspace(0.0, 80.0, 161), [1e3, 1e5, 1e6]])
    for nu in (0.0, 0.3, 0.5, 1.0, 2.7, 5.0, 9.0, 20.0, 34.0):
        for z in zs:
            assert abs(bessel_j(nu, float(z))) <= 1.0 + 1e-12


def test_derivative_identity():
    # d/dz (z^nu J_nu) = z^nu J_{nu-1}, checked by central differences
    h = 1e-6
    for nu in (1.0, 1.5, 3.0):
        for z in np.linspace(0.5, 10.0, 20):
            z = float(z)
            fd = ((z + h) ** nu * bessel_j(nu, z + h) - (z - h) ** nu * bessel_j(nu, z - h)) / (
                2.0 * h
            )
            exact = z**nu * bessel_j(nu - 1.0, z)
            assert abs(fd - exact) <= 1e-7 * max(1.0, abs(exact))


def test_derivative_values_match_mpmath():
    for nu in (0.0, 0.5, 1.0, 2.5, 9.0):
        for z in (0.3, 2.0, 7.7, 25.0):
            assert abs(bessel_j_prime(nu, z) - mp_bessel_j_prime(nu, z)) <= 1e-12


def test_derivative_frozen_values_at_zeros():
    for (nu, z), ref in FROZEN_PRIMES.items():
        assert abs(bessel_j_prime(nu, z) - ref) <= 1e-14


def test_derivative_at_origin():
    assert bessel_j_prime(1.0, 0.0) == 0.5
    assert bessel_j_prime(2.0, 0.0) == 0.0
    with pytest.raises(ValueError):
        bessel_j_prime(0.5, 0.0)


def test_weighted_integral_identity():
    # integral_0^j s^{nu+1} J_nu(s) ds = -j^{nu+1} J'_nu(j)
    for nu in (0.0, 0.5, 1.0, 5.0 / 3.0):
        zeros = bessel_zeros(nu, 10).zeros
        for n in range(1, 11):
            j = zeros[n - 1]
            val, _ = quad(lambda s: s ** (nu + 1.0) * bessel_j(nu, s), 0.0, j, limit=200)
            ref = -(j ** (nu + 1.0)) * bessel_j_prime(nu, j)
            assert abs(val - ref) <= 1e-8 * abs(ref)


def test_gamma_matches_reference():
    xs = np.concatenate([np.linspace(0.05, 5.0, 60), np.linspace(5.5, 80.0, 50)])
    for x in xs:
        x = float(x)
        ref = mp_gamma(x)
        assert abs(gamma(x) - ref) <= 1e-13 * abs(ref)


def test_gamma_domain():
    for bad in (0.0, -1.0, 80.5):
        with pytest.raises(ValueError):
            gamma(bad)


def test_input_validation():
    with pytest.raises(ValueError):
        bessel_j(-0.1, 1.0)
    with pytest.raises(ValueError):
        bessel_j(1.0, -1.0)
    with pytest.raises(ValueError):
        bessel_j(1.0, 2e6)
    assert bessel_j(0.0, 0.0) == 1.0
    assert bessel_j(2.0, 0.0) == 0.0


def test_min_slope_product_positive():
    table = bessel_zeros(0.0, 30)
    m = min_slope_product(table)
    direct = min(abs(z * bessel_j_prime(0.0, z)) for z in table.zeros)
    assert m == direct
    assert m > 0.5
