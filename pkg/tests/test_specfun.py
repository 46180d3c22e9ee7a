"""Special-function tests against independent oracles.

Bessel values are checked against a direct power-series summation (and
mpmath); the digamma offset against a 1e6-term harmonic series with tail
estimate and against mpmath.
"""
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddchain.specfun import (EULER_GAMMA, bessel_j, bessel_table, fermi,
                             re_digamma_half_offset)


def bessel_series_oracle(order, x, terms=30):
    """Independent power-series J_order(x), 30 terms."""
    order = abs(order)
    total = 0.0
    term = (x / 2.0) ** order / math.factorial(order)
    for m in range(terms):
        total += term
        term *= -(x / 2.0) ** 2 / ((m + 1) * (m + 1 + order))
    return total


def digamma_half_series_oracle():
    """psi(1/2) from the series sum_n (1/(n+1) - 1/(n+1/2)) - gamma_EM,
    1e6 terms plus the 1/(2N) tail correction."""
    n = np.arange(10**6, dtype=float)
    partial = np.sum(1.0 / (n + 1.0) - 1.0 / (n + 0.5))
    tail = -0.5 / 10**6  # sum_{n>=N} -0.5/((n+1)(n+0.5)) ~ -0.5/N
    return partial + tail - EULER_GAMMA


class TestBesselJ:
    def test_j0_at_zero(self):
        assert bessel_j(0, 0.0) == 1.0

    def test_j1_at_zero(self):
        assert bessel_j(1, 0.0) == 0.0

    def test_negative_order_symmetry_value(self):
        # J_{-1}(2) = -J_1(2) ~ -0.5767248078
        ref = -bessel_series_oracle(1, 2.0)
        assert bessel_j(-1, 2.0) == pytest.approx(ref, rel=1e-12)
        assert bessel_j(-1, 2.0) == pytest.approx(-0.5767248078, abs=1e-9)

    @pytest.mark.parametrize("order", range(0, 9))
    @pytest.mark.parametrize("x", [0.05, 0.7, 2.0, 4.0])
    def test_against_power_series(self, order, x):
        # the alternating series loses relative accuracy past x ~ 5;
        # larger arguments are covered by the mpmath comparison below
        ref = bessel_series_oracle(order, x, terms=60)
        assert bessel_j(order, x) == pytest.approx(ref, rel=1e-12, abs=1e-250)

    @pytest.mark.parametrize("order,x",
                             [(0, 11.5), (2, 11.5), (3, 700.0), (40, 13.0),
                              (150, 90.0)])
    def test_against_mpmath(self, order, x):
        ref = float(mpmath.besselj(order, x))
        assert bessel_j(order, x) == pytest.approx(ref, rel=1e-11, abs=1e-280)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            bessel_j(0, math.nan)
        with pytest.raises(ValueError):
            bessel_j(0, math.inf)
        with pytest.raises(ValueError):
            bessel_j(0, -1.0)

    @given(st.integers(-30, 30), st.floats(0.0, 50.0))
    @settings(max_examples=60, deadline=None)
    def test_reflection_identity(self, order, x):
        left = bessel_j(-order, x)
        right = (-1) ** order * bessel_j(order, x)
        assert left == pytest.approx(right, rel=1e-12, abs=1e-300)


class TestBesselTable:
    def test_zero_argument(self):
        table = bessel_table(0.0, 1e-15)
        assert table.value(0) == 1.0
        assert all(table.value(ell) == 0.0
                   for ell in range(1, table.ell_max + 1))

    def test_completeness_at_four(self):
        table = bessel_table(4.0, 1e-15)
        total = np.sum(table.values ** 2)
        assert abs(total - 1.0) < 1e-12
        assert bessel_series_oracle(0, 4.0, 60) == pytest.approx(
            table.value(0), rel=1e-12)
        assert table.value(0) == pytest.approx(-0.3971498099, abs=1e-9)

    def test_truncation_criterion(self):
        table = bessel_table(4.0, 1e-15)
        assert abs(table.value(table.ell_max)) < 1e-15
        assert table.ell_max >= 24

    @pytest.mark.parametrize("x", np.arange(0.0, 50.5, 0.5))
    def test_completeness_sweep(self, x):
        table = bessel_table(float(x), 1e-15)
        assert abs(np.sum(table.values ** 2) - 1.0) < 1e-10

    def test_symmetry_invariant(self):
        table = bessel_table(7.3, 1e-15)
        for ell in range(table.ell_max + 1):
            assert table.value(-ell) == pytest.approx(
                (-1) ** ell * table.value(ell), abs=1e-300)


class TestDigamma:
    def test_at_zero(self):
        ref = digamma_half_series_oracle()
        assert re_digamma_half_offset(0.0) == pytest.approx(ref, abs=1e-9)
        assert re_digamma_half_offset(0.0) == pytest.approx(
            -EULER_GAMMA - 2.0 * math.log(2.0), rel=1e-13)

    def test_evenness(self):
        assert re_digamma_half_offset(3.7) == re_digamma_half_offset(-3.7)

    def test_large_argument_log(self):
        assert re_digamma_half_offset(100.0) == pytest.approx(
            math.log(100.0), abs=1e-4)

    @pytest.mark.parametrize("y", [0.01, 0.5, 1.7, 9.9, 42.0, 300.0])
    def test_against_mpmath(self, y):
        ref = float(mpmath.re(mpmath.digamma(mpmath.mpc(0.5, -y))))
        assert re_digamma_half_offset(y) == pytest.approx(ref, rel=1e-12)

    @given(st.floats(-50.0, 50.0))
    @settings(max_examples=100, deadline=None)
    def test_evenness_property(self, y):
        assert abs(re_digamma_half_offset(y)
                   - re_digamma_half_offset(-y)) < 1e-13

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            re_digamma_half_offset(math.inf)


class TestFermi:
    def test_half_filling(self):
        assert fermi(0.0, 3.0) == 0.5

    def test_particle_hole(self):
        assert fermi(2.3, 10.0) + fermi(-2.3, 10.0) == pytest.approx(1.0,
                                                                     abs=1e-15)

    def test_saturation_no_overflow(self):
        assert fermi(1000.0, 10.0) < 1e-300
        assert fermi(-1000.0, 10.0) == 1.0

    def test_rejects_bad_beta(self):
        with pytest.raises(ValueError):
            fermi(1.0, 0.0)

    @given(st.floats(-600.0, 600.0), st.floats(0.01, 100.0))
    @settings(max_examples=100, deadline=None)
    def test_bounds_and_monotonic(self, energy, beta):
        val = fermi(energy, beta)
        assert 0.0 <= val <= 1.0
        assert fermi(energy + 0.5, beta) <= val
