"""Constants engine: gamma accuracy, closed-form sharp constants, regimes.

Reference values were frozen from a 40-digit arbitrary-precision evaluation
of the same formulas (one-time oracle, not shipped).
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracgrad.constants import (
    CRITICAL,
    SUBCRITICAL,
    SUPERCRITICAL,
    FracParams,
    classify_regime,
    gamma,
    herbst_constant,
    herbst_constant_log,
    integer_order_constants,
    kernel_constants,
    lgamma_signed,
    morrey_constant,
    riesz_normalizer,
    sphere_area,
    twin_constants,
)
from fracgrad.errors import DomainError, RegimeError

# frozen 40-digit oracle values
GAMMA_ORACLE = {
    0.25: 3.6256099082219083,
    0.5: 1.7724538509055160,
    1.75: 0.9190625268488832,
    2.25: 1.1330030963193463,
    6.5: 287.88527781504436,
}


class TestGamma:
    @pytest.mark.parametrize("x,expected", sorted(GAMMA_ORACLE.items()))
    def test_oracle_values(self, x, expected):
        assert gamma(x) == pytest.approx(expected, rel=1e-13)

    def test_factorial(self):
        assert gamma(5) == pytest.approx(24.0, rel=1e-13)

    def test_sqrt_pi(self):
        assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)

    @pytest.mark.parametrize("x", [0.0, -1.0, -2.0, -7.0])
    def test_poles(self, x):
        with pytest.raises(DomainError):
            gamma(x)

    def test_recurrence_200_points(self):
        r = np.random.default_rng(0)
        for x in r.uniform(0.1, 20.0, size=200):
            assert gamma(x + 1.0) == pytest.approx(x * gamma(x), rel=1e-12)

    @given(st.floats(min_value=0.1, max_value=20.0))
    @settings(deadline=None, max_examples=100)
    def test_recurrence_property(self, x):
        assert abs(gamma(x + 1.0) - x * gamma(x)) <= 1e-12 * abs(x * gamma(x))

    def test_reflection_region(self):
        # x < 0.5 goes through the reflection formula
        assert gamma(-0.5) == pytest.approx(-2.0 * math.sqrt(math.pi), rel=1e-13)
        assert gamma(-1.5) == pytest.approx(4.0 / 3.0 * math.sqrt(math.pi), rel=1e-13)

    def test_stdlib_cross_check(self):
        for x in np.linspace(0.1, 30.0, 77):
            assert gamma(x) == pytest.approx(math.gamma(x), rel=1e-13)

    def test_signed_lgamma_negative(self):
        logv, sign = lgamma_signed(-0.5)
        assert sign == -1.0
        assert math.exp(logv) == pytest.approx(2.0 * math.sqrt(math.pi), rel=1e-13)


class TestSphereArea:
    def test_n1_is_two(self):
        assert sphere_area(1) == pytest.approx(2.0, rel=1e-14)

    def test_n2(self):
        assert sphere_area(2) == pytest.approx(2.0 * math.pi, rel=1e-14)

    def test_n3(self):
        assert sphere_area(3) == pytest.approx(4.0 * math.pi, rel=1e-14)

    def test_bad_dimension(self):
        with pytest.raises(DomainError):
            sphere_area(0)


class TestKernelConstants:
    def test_n1_half_collapses(self):
        # Gamma(1/4) cancels, leaving (2 pi)^(-1/2)
        kc = kernel_constants(1, 0.5)
        assert kc.c_ns == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-13)

    def test_kappa_minus_s_oracle(self):
        assert kernel_constants(3, 0.5).kappa_minus_s == pytest.approx(
            0.09524045390136145, rel=1e-13
        )

    def test_plus_minus_oracle(self):
        kc = kernel_constants(2, 0.3)
        assert kc.c_ns_plus == pytest.approx(0.04930119091588354, rel=1e-13)
        assert kc.c_ns_minus == pytest.approx(0.13853979210529713, rel=1e-13)

    def test_plus_vanishes_as_s_to_zero(self):
        values = [kernel_constants(2, 10.0**-k).c_ns_plus for k in range(2, 7)]
        assert all(v > 0 for v in values)
        assert all(b < a for a, b in zip(values, values[1:]))
        assert values[-1] < 1e-6

    def test_all_positive(self):
        for n in (1, 2, 3):
            for s in (0.1, 0.5, 0.9):
                kc = kernel_constants(n, s)
                assert all(
                    v > 0 and math.isfinite(v)
                    for v in (kc.c_ns, kc.c_ns_plus, kc.c_ns_minus, kc.kappa_minus_s)
                )

    def test_domain(self):
        with pytest.raises(DomainError):
            kernel_constants(2, 1.0)


class TestHerbst:
    def test_collapsed_value(self):
        # Gamma(5/4) = Gamma(1/4)/4 collapses the expression to 4 sqrt(2) pi^2
        assert herbst_constant(3, 2, 1) == pytest.approx(
            4.0 * math.sqrt(2.0) * math.pi**2, rel=1e-13
        )

    def test_oracle_n2(self):
        assert herbst_constant(2, 2, 0.5) == pytest.approx(32.70407956702252, rel=1e-13)

    def test_log_domain_consistency(self):
        logv, sign = herbst_constant_log(4, 2, 1)
        assert sign == 1.0
        assert math.exp(logv) == pytest.approx(55.83091359711104, rel=1e-12)
        assert herbst_constant(4, 2, 1) == pytest.approx(math.exp(logv), rel=1e-12)

    def test_normalized_operator_factorization(self):
        # herbst * riesz normalizer equals the '+' subcritical twin constant
        for n, p, a in [(3, 2.0, 0.5), (2, 1.5, 0.4), (4, 3.0, 0.7)]:
            lhs = herbst_constant(n, p, a) * riesz_normalizer(n, a)
            rhs = twin_constants(n, p, a, "+")
            assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_regime_errors(self):
        with pytest.raises(RegimeError):
            herbst_constant(2, 3, 1.0)  # alpha p > n
        with pytest.raises(RegimeError):
            herbst_constant(3, 1.0, 0.5)  # p = 1


class TestMorreyConstant:
    def test_n1_power_of_two(self):
        assert morrey_constant(1, 2, 0.75) == pytest.approx(2.0**0.75, rel=1e-13)

    def test_n2_closed_form(self):
        assert morrey_constant(2, 3, 1) == pytest.approx(
            math.sqrt(math.pi) * 4.0 ** (2.0 / 3.0), rel=1e-13
        )

    def test_blowup_toward_critical_line(self):
        # grows монotonically as p decreases toward n/alpha
        n, alpha = 2, 1.0
        values = [morrey_constant(n, n / alpha + 10.0**-k, alpha) for k in range(1, 7)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_regime_error(self):
        with pytest.raises(RegimeError):
            morrey_constant(3, 2, 1.0)


class TestTwinConstants:
    def test_subcritical_oracles(self):
        assert twin_constants(3, 2, 0.5, "+") == pytest.approx(1.4904500894290902, rel=1e-13)
        assert twin_constants(3, 2, 0.5, "-") == pytest.approx(1.2533141373155003, rel=1e-13)
        assert twin_constants(2, 1.5, 0.4, "+") == pytest.approx(1.8748714287999377, rel=1e-13)
        assert twin_constants(2, 1.5, 0.4, "-") == pytest.approx(1.0512918648522734, rel=1e-13)

    def test_critical_plus_oracle(self):
        # (2/(2 pi))^(3/4) pi 2^(1/2) Gamma(1/4)/Gamma(3/4)
        got = twin_constants(2, 4.0, 0.5, "+")
        expected = (
            (1.0 / math.pi) ** 0.75
            * math.pi
            * math.sqrt(2.0)
            * gamma(0.25)
            / gamma(0.75)
        )
        assert got == pytest.approx(expected, rel=1e-13)
        assert got == pytest.approx(5.570571405866622, rel=1e-13)

    def test_critical_minus_is_inverse_kappa(self):
        for n, s in [(2, 0.5), (3, 0.3), (1, 0.7)]:
            got = twin_constants(n, n / s, s, "-")
            kms = kernel_constants(n, s).kappa_minus_s
            expected = (n / sphere_area(n)) ** ((n - s) / n) / kms
            assert got == pytest.approx(expected, rel=1e-13)

    def test_supercritical_factorization(self):
        n, p, s = 1, 2.0, 0.9
        kc = kernel_constants(n, s)
        got_plus = twin_constants(n, p, s, "+")
        got_minus = twin_constants(n, p, s, "-")
        assert got_plus / kc.c_ns == pytest.approx(morrey_constant(n, p, s), rel=1e-12)
        assert got_minus == pytest.approx(0.5676507927403517, rel=1e-13)

    def test_classical_hardy_limit(self):
        # '-' constant converges to p/(n-p) as s -> 1; differences shrink
        n, p = 3, 2.0
        errs = [
            abs(twin_constants(n, p, 1.0 - 10.0**-k, "-") - p / (n - p))
            for k in (3, 4, 5, 6)
        ]
        assert all(b < a for a, b in zip(errs, errs[1:]))
        assert twin_constants(n, p, 1.0 - 1e-6, "-") == pytest.approx(2.0, abs=1e-2 * 2.0)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            twin_constants(2, 2, 1.5, "+")
        with pytest.raises(DomainError):
            twin_constants(2, 0.5, 0.5, "+")
        with pytest.raises(DomainError):
            twin_constants(2, 2, 0.5, "x")
        with pytest.raises(RegimeError):
            twin_constants(2, 2.0, 0.4, "-")  # '-' subcritical needs p < n


class TestIntegerOrder:
    def test_m1_is_classical_hardy(self):
        for n, p in [(3, 2.0), (5, 2.5), (4, 1.5)]:
            got = integer_order_constants(1, n, p)
            assert got.c_mp_lt_n == pytest.approx(p / (n - p), rel=1e-12)

    def test_even_branch_collapses(self):
        # m=2, n=5, p=2: Gamma(9/4) = (5/16) Gamma(1/4) gives exactly 4/5
        got = integer_order_constants(2, 5, 2)
        assert got.c_mp_lt_n == pytest.approx(0.8, rel=1e-13)

    def test_beta_012_limit_cross_check(self):
        got = integer_order_constants(1, 2, 1.5).beta_0mn
        assert got == pytest.approx(2.0 * math.sqrt(math.pi), rel=1e-13)
        # the '-' critical constant converges to it as s -> 1 at n = 2
        approx = twin_constants(2, 2.0 / (1.0 - 1e-6), 1.0 - 1e-6, "-")
        assert approx == pytest.approx(got, abs=1e-4 * got)

    def test_domain(self):
        with pytest.raises(DomainError):
            integer_order_constants(3, 3, 1.2)
        with pytest.raises(RegimeError):
            integer_order_constants(2, 5, 3.0)  # m p > n


class TestRegimeClassification:
    def test_exact_critical(self):
        assert classify_regime(0.5, 4.0, 2) == CRITICAL
        assert classify_regime(0.5, 4.0 - 1e-6, 2) == SUBCRITICAL
        assert classify_regime(0.5, 4.0 + 1e-6, 2) == SUPERCRITICAL

    def test_tolerance_band(self):
        assert classify_regime(0.5, 4.0 * (1 + 1e-13), 2) == CRITICAL

    def test_frac_params_validation(self):
        p = FracParams(n=2, p=3.0, s=0.5, alpha=1.0, kappa=2.0)
        assert p.alpha_regime() == SUPERCRITICAL
        with pytest.raises(DomainError):
            FracParams(n=2, p=0.5)
        with pytest.raises(DomainError):
            FracParams(n=2, s=1.0)
        with pytest.raises(DomainError):
            FracParams(n=2, alpha=2.5)
        with pytest.raises(DomainError):
            FracParams(n=2, kappa=0.0)
