"""Conical function, digamma and fundamental solution tests.

Expected values come from independent oracles: truncated series with
explicitly real coefficients, mpmath complex-degree Legendre evaluations,
classical digamma identities, and two-point logarithmic fits.
"""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from yukawa_sphere import (SeriesPolicy, YukawaDegree, conical_p,
                           conical_p_deriv, digamma_conjugate_sum,
                           fundamental_solution)
from yukawa_sphere.errors import DomainError, SingularityError

mp.mp.dps = 30


def mp_conical(k, x):
    tau = mp.sqrt(4 * k**2 - 1) / 2
    return float(mp.re(mp.legenp(mp.mpc(-0.5, tau), 0, mp.mpf(x))))


class TestYukawaDegree:
    @pytest.mark.parametrize("k", [0.5, 0.4, 0.0, -2.0])
    def test_rejects_small_k(self, k):
        with pytest.raises(DomainError):
            YukawaDegree(k)

    @pytest.mark.parametrize("k", [0.51, 1.0, 4.0, 64.0])
    def test_tau_identity(self, k):
        deg = YukawaDegree(k)
        assert deg.tau**2 + 0.25 == pytest.approx(k * k, rel=1e-15)
        assert deg.nu_real == -0.5
        assert deg.nu_imag == deg.tau

    @pytest.mark.parametrize("k", [0.51, 1.0, 4.0, 64.0])
    def test_ck_matches_cosh_oracle(self, k):
        deg = YukawaDegree(k)
        oracle = float(1 / (4 * mp.cosh(mp.pi / 2 * mp.sqrt(4 * k**2 - 1))))
        assert deg.c_k == pytest.approx(oracle, rel=1e-14)


class TestSeriesPolicy:
    def test_defaults_valid(self):
        pol = SeriesPolicy()
        assert pol.rel_tol == 1e-14 and pol.max_terms == 300 and pol.switch_w == 0.75

    @pytest.mark.parametrize("kw", [dict(rel_tol=0.0), dict(rel_tol=1e-9),
                                    dict(max_terms=10), dict(switch_w=0.4),
                                    dict(switch_w=1.0)])
    def test_rejects_bad_values(self, kw):
        with pytest.raises(DomainError):
            SeriesPolicy(**kw)


class TestConicalP:
    @pytest.mark.parametrize("k", [0.51, 1.0, 4.0, 64.0])
    def test_value_one_at_argument_one(self, k):
        assert abs(conical_p(YukawaDegree(k), 1.0) - 1.0) < 1e-13

    def test_small_angle_series_oracle(self):
        # P(cos t) with sin(t/2) = 0.1, k = 1: ten-term real series oracle
        deg = YukawaDegree(1.0)
        w = 0.01
        term, oracle = 1.0, 1.0
        for n in range(1, 11):
            term *= ((n - 0.5)**2 + deg.tau**2) / n**2 * w
            oracle += term
        x = 1.0 - 2 * w
        val = conical_p(deg, x)
        assert val == pytest.approx(oracle, rel=1e-13)
        # leading behaviour 1 + (4 tau^2 + 1)/4 * w = 1 + k^2 w
        assert abs(val - 1.01) < 1e-4

    def test_log_slope_near_negative_one(self):
        # slope against log(1+x) matches cosh(pi tau)/pi = -sin(nu pi)/pi
        deg = YukawaDegree(1.0)
        x1, x2 = -1.0 + 1e-4, -1.0 + 1e-6
        slope = ((conical_p(deg, x1) - conical_p(deg, x2))
                 / (math.log1p(x1) - math.log1p(x2)))
        expected = -math.cosh(math.pi * deg.tau) / math.pi
        assert slope == pytest.approx(expected, rel=1e-3)

    @pytest.mark.parametrize("x", [-1.0, -1.5, -1.0 + 1e-13, 1.0 + 1e-9])
    def test_domain_errors(self, x):
        with pytest.raises(DomainError):
            conical_p(YukawaDegree(1.0), x)

    @pytest.mark.parametrize("k", [0.51, 1.0, 4.0, 8.0, 64.0])
    def test_against_mpmath(self, k):
        deg = YukawaDegree(k)
        for x in [-0.999, -0.9, -0.51, -0.3, 0.0, 0.5, 0.97]:
            assert conical_p(deg, x) == pytest.approx(mp_conical(k, x), rel=5e-12)

    @pytest.mark.parametrize("k", [0.51, 1.0, 4.0, 64.0])
    def test_branch_overlap(self, k):
        # same arguments evaluated on the direct branch and on the
        # above-switch branch by moving switch_w across the band
        deg = YukawaDegree(k)
        lo = SeriesPolicy(switch_w=0.6)
        hi = SeriesPolicy(switch_w=0.9, max_terms=600)
        for w in np.linspace(0.65, 0.85, 9):
            x = 1.0 - 2 * w
            assert conical_p(deg, x, lo) == pytest.approx(
                conical_p(deg, x, hi), rel=1e-12)

    def test_positive_and_at_least_one(self):
        for k in [0.51, 1.0, 4.0, 64.0]:
            deg = YukawaDegree(k)
            for x in np.linspace(-0.5, 1.0, 40):
                assert conical_p(deg, x) >= 1.0 - 1e-12
            for x in [-0.999999, -0.99, -0.9, -0.6]:
                assert conical_p(deg, x) > 0.0

    def test_legendre_ode_residual(self):
        # (1-x^2) P'' - 2x P' - (tau^2 + 1/4) P = 0 with P'' from the
        # fourth-order central difference of conical_p_deriv at step 1e-4
        # (the second-order stencil cannot reach 1e-6 near the log endpoint)
        h = 1e-4
        for k in [0.51, 1.0]:
            deg = YukawaDegree(k)
            for x in np.linspace(-0.95, 0.95, 21):
                d2 = (-conical_p_deriv(deg, x + 2 * h)
                      + 8 * conical_p_deriv(deg, x + h)
                      - 8 * conical_p_deriv(deg, x - h)
                      + conical_p_deriv(deg, x - 2 * h)) / (12 * h)
                res = ((1 - x * x) * d2 - 2 * x * conical_p_deriv(deg, x)
                       - (deg.tau**2 + 0.25) * conical_p(deg, x))
                assert abs(res) < 1e-6


class TestConicalPDeriv:
    def test_limit_at_one(self):
        # derivative tends to -k^2/2 = nu(nu+1)/2 at the right endpoint
        for k in [1.0, 2.0]:
            deg = YukawaDegree(k)
            assert conical_p_deriv(deg, 1.0 - 1e-10) == pytest.approx(
                -k * k / 2.0, rel=1e-7)

    def test_finite_difference_oracle(self):
        deg = YukawaDegree(2.0)
        h = 1e-5
        fd = (conical_p(deg, h) - conical_p(deg, -h)) / (2 * h)
        assert conical_p_deriv(deg, 0.0) == pytest.approx(fd, rel=1e-8)

    def test_fd_match_across_interval(self):
        h = 1e-5
        for k in [0.51, 1.0, 4.0]:
            deg = YukawaDegree(k)
            for x in np.linspace(-0.9, 0.9, 19):
                fd = (conical_p(deg, x + h) - conical_p(deg, x - h)) / (2 * h)
                assert conical_p_deriv(deg, x) == pytest.approx(fd, rel=1e-7)

    def test_domain_errors(self):
        deg = YukawaDegree(1.0)
        with pytest.raises(DomainError):
            conical_p_deriv(deg, -1.0 + 1e-13)
        with pytest.raises(DomainError):
            conical_p_deriv(deg, 1.0)


class TestDigammaConjugateSum:
    def test_classical_half_value(self):
        # psi(1/2) = -gamma - 2 log 2
        gamma = 0.5772156649015328606
        assert digamma_conjugate_sum(0.0, 0) == pytest.approx(
            -gamma - 2 * math.log(2), abs=1e-13)

    def test_asymptotic_log_growth(self):
        n = 100000
        assert abs(digamma_conjugate_sum(2.0, n) - math.log(n)) < 1.0 / n

    def test_defining_series_oracle(self):
        # Re[-gamma + sum_m (1/(m+1) - 1/(m+1/2+i tau))] with midpoint tail
        tau = math.sqrt(3) / 2
        a = complex(0.5, tau)
        big = 1_000_000
        m = np.arange(big)
        series = np.sum(1.0 / (m + 1) - (1.0 / (m + a)).real)
        c = big - 0.5
        tail = (np.log(complex(c + a.real, a.imag)) - np.log(c + 1)).real
        gamma = 0.5772156649015328606
        oracle = -gamma + series + tail
        assert digamma_conjugate_sum(tau, 0) == pytest.approx(oracle, abs=1e-12)

    def test_matches_scipy(self):
        from scipy.special import digamma as scipy_digamma
        for tau in [0.1, 0.866, 5.0, 63.998]:
            for n in [0, 1, 7, 40]:
                ref = float(scipy_digamma(complex(0.5 + n, tau)).real)
                assert digamma_conjugate_sum(tau, n) == pytest.approx(ref, rel=1e-13)

    def test_rejects_negative_n(self):
        with pytest.raises(DomainError):
            digamma_conjugate_sum(1.0, -1)


class TestFundamentalSolution:
    def test_antipodal_value_is_ck(self):
        # c = -1: G = C_k P(1) = C_k = 1/(4 cosh(pi sqrt(3)/2)) for k = 1
        deg = YukawaDegree(1.0)
        oracle = float(1 / (4 * mp.cosh(mp.pi * mp.sqrt(3) / 2)))
        assert fundamental_solution(deg, -1.0) == pytest.approx(oracle, rel=1e-13)

    def test_log_singularity_slope(self):
        # G ~ -(1/2 pi) log r as points merge; two-point fit in log r
        deg = YukawaDegree(1.0)
        r1, r2 = 1e-3, 1e-5
        c1, c2 = 1.0 - r1**2 / 2, 1.0 - r2**2 / 2
        slope = ((fundamental_solution(deg, c1) - fundamental_solution(deg, c2))
                 / (math.log(r1) - math.log(r2)))
        assert slope == pytest.approx(-1.0 / (2 * math.pi), rel=1e-3)

    def test_positive_and_single_signed(self):
        deg = YukawaDegree(4.0)
        vals = [fundamental_solution(deg, c) for c in np.linspace(-1.0, 0.999, 60)]
        assert all(v > 0 for v in vals)

    def test_coincident_points_rejected(self):
        deg = YukawaDegree(1.0)
        with pytest.raises(SingularityError):
            fundamental_solution(deg, 1.0)
        with pytest.raises(SingularityError):
            fundamental_solution(deg, 1.0 - 1e-13)


@settings(max_examples=60, deadline=None)
@given(k=st.floats(min_value=0.51, max_value=32.0),
       x=st.floats(min_value=-0.999, max_value=1.0))
def test_conical_p_decreasing_property(k, x):
    # every series coefficient is positive, so P decreases in x
    deg = YukawaDegree(k)
    if x < 1.0:
        assert conical_p_deriv(deg, x) < 0.0
    assert conical_p(deg, x) >= 1.0 - 1e-10 or x < -0.5
    assert conical_p(deg, x) > 0.0
