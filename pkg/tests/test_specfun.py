import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import beta as beta_fn

from carlemanfp.coupling import Coupling
from carlemanfp.specfun import (
    EULER_GAMMA,
    HypParams,
    digamma,
    dilog,
    hyp2f1,
    hyp2f1_1mu,
    trigamma,
    zeta_lambda,
)

# Brute-force Kahan series value for 2F1(1, 1/4; 5/4; 0.9), 2e6-term budget.
BRUTE_1MU_025_09 = 1.5077780625170767
# 1e7-term direct sum with integral tail bracket, and the trigamma identity.
ZETA_ONE_SIXTH = 1.228801173700901


class TestHyp2f1OneMu:
    def test_unit_at_zero(self):
        assert hyp2f1_1mu(0.25, 0.0) == 1.0

    def test_arctanh_closed_form(self):
        # 2F1(1, 1/2; 3/2; z) = atanh(sqrt z)/sqrt z
        assert hyp2f1_1mu(0.5, 0.25) == pytest.approx(math.log(3.0), rel=1e-14)

    def test_brute_force_series(self):
        assert hyp2f1_1mu(0.25, 0.9) == pytest.approx(BRUTE_1MU_025_09, rel=1e-10)

    @pytest.mark.parametrize("mu", [0.02, 0.1, 0.25, 0.5, 0.75, 0.97])
    def test_against_general_implementation(self, mu):
        z = np.linspace(0.0, 0.999999, 40)
        mine = hyp2f1_1mu(mu, z)
        general = hyp2f1(1.0, mu, 1.0 + mu, z)
        assert np.allclose(mine, general, rtol=5e-13)

    def test_near_unit_argument_accuracy(self):
        import mpmath as mp

        mp.mp.dps = 30
        for mu in (0.1, 0.25, 0.45):
            z = 1.0 - 1e-8
            ref = float(mp.hyp2f1(1, mu, 1 + mu, z))
            assert hyp2f1_1mu(mu, z) == pytest.approx(ref, rel=1e-12)

    @given(
        mu=st.floats(min_value=0.05, max_value=0.95),
        z1=st.floats(min_value=0.0, max_value=0.99),
        z2=st.floats(min_value=0.0, max_value=0.99),
    )
    @settings(max_examples=60, deadline=None, derandomize=True)
    def test_increasing_and_at_least_one(self, mu, z1, z2):
        lo, hi = sorted((z1, z2))
        v_lo, v_hi = hyp2f1_1mu(mu, lo), hyp2f1_1mu(mu, hi)
        assert v_lo >= 1.0
        # allow summation-order noise for nearly identical arguments
        assert v_hi >= v_lo * (1.0 - 1e-14)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            hyp2f1_1mu(0.25, 1.0)
        with pytest.raises(ValueError):
            hyp2f1_1mu(-0.5, 0.5)


class TestHyp2f1General:
    def test_unit_at_zero(self):
        assert hyp2f1(2.0, 1.25, 3.25, 0.0) == 1.0

    @pytest.mark.parametrize(
        "a,b,c,z,expected",
        [
            # printed six-digit reference products, back-solved
            (2.0, 1.25, 3.25, 2.0 / 3.0, 0.507407 * 135.0 / 32.0),
            (2.0, 1.25, 4.25, 4.0 / 13.0, 0.0458811 * 117.0**2 / 512.0),
        ],
    )
    def test_printed_reference_values(self, a, b, c, z, expected):
        assert hyp2f1(a, b, c, z) == pytest.approx(expected, rel=3e-6)

    def test_series_oracle(self):
        # plain Gauss series with compensated summation
        a, b, c, z = 2.0, 1.25, 3.25, 0.7
        total, comp, term = 0.0, 0.0, 1.0
        for k in range(2000):
            y = term - comp
            t = total + y
            comp = (t - total) - y
            total = t
            term *= (a + k) * (b + k) * z / ((c + k) * (1.0 + k))
            if term < 1e-18 * total:
                break
        assert hyp2f1(a, b, c, z) == pytest.approx(total, rel=1e-12)

    def test_hyp_params_wrapper(self):
        p = HypParams(a=2.0, b=1.25, c=3.25, z=0.5)
        assert p.value() == pytest.approx(hyp2f1(2.0, 1.25, 3.25, 0.5), rel=0)
        with pytest.raises(ValueError):
            HypParams(a=1.0, b=1.0, c=-2.0, z=0.5)
        with pytest.raises(ValueError):
            HypParams(a=1.0, b=1.0, c=2.0, z=1.0)

    def test_ponnusamy_two_sided_bound(self):
        # zero-balanced bound: for alpha=beta=mu, x in (0,1],
        # B(mu,mu) 2F1(mu,mu;2mu;1-x) + log x in
        # (-2 psi(mu) - 2 gamma, same + x log(1/x)/(1-x))
        mus = np.linspace(0.05, 0.95, 10)
        xs = np.concatenate([np.geomspace(1e-6, 0.9, 12), [1.0 - 1e-9]])
        for mu in mus:
            base = -2.0 * digamma(mu) - 2.0 * EULER_GAMMA
            for x in xs:
                val = beta_fn(mu, mu) * hyp2f1(mu, mu, 2.0 * mu, 1.0 - x) + math.log(x)
                width = x * math.log(1.0 / x) / (1.0 - x)
                assert base < val < base + width


class TestDigammaDilog:
    def test_euler_gamma(self):
        assert digamma(1.0) == pytest.approx(-EULER_GAMMA, rel=1e-14)

    def test_reflection_identity(self):
        for mu in np.arange(0.1, 0.95, 0.1):
            lhs = digamma(mu) - digamma(1.0 - mu) + math.pi / math.tan(math.pi * mu)
            assert abs(lhs) < 1e-10
        # quarter-point value: psi(1/4) - psi(3/4) = -pi cot(pi/4) = -pi
        assert digamma(0.25) - digamma(0.75) == pytest.approx(-math.pi, rel=1e-14)

    def test_recurrence_oracle(self):
        # downward recurrence anchored at the asymptotic expansion
        x, big = 10.0, 40
        y = x + big
        val = math.log(y) - 1.0 / (2.0 * y)
        y2 = 1.0 / (y * y)
        term = y2
        for n, b2n in enumerate([1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66], start=1):
            val -= b2n / (2 * n) * term
            term *= y2
        for j in range(big):
            val -= 1.0 / (x + big - 1 - j)
        assert digamma(10.0) == pytest.approx(val, rel=1e-13)

    def test_domain(self):
        with pytest.raises(ValueError):
            digamma(0.0)

    @pytest.mark.parametrize(
        "x,expected",
        [(1.0, math.pi**2 / 6.0), (0.0, 0.0), (-1.0, -math.pi**2 / 12.0)],
    )
    def test_dilog_values(self, x, expected):
        assert dilog(x) == pytest.approx(expected, abs=1e-12)

    def test_dilog_domain(self):
        with pytest.raises(ValueError):
            dilog(1.5)


class TestZetaLambda:
    def test_zero_coupling(self):
        assert zeta_lambda(Coupling(0.0)) == pytest.approx(math.pi / 3.0, abs=1e-13)

    def test_brute_force_value(self):
        assert zeta_lambda(Coupling(-1.0 / 6.0)) == pytest.approx(
            ZETA_ONE_SIXTH, abs=1e-12
        )

    def test_trigamma_oracle(self):
        for lam in (-0.02, -0.08, -1.0 / 6.0):
            c = Coupling(lam)
            ref = (trigamma(1.0 + c.abs_lambda) + trigamma(1.0 - c.lambda_r)) / math.pi
            assert zeta_lambda(c) == pytest.approx(ref, abs=1e-12)

    def test_monotone_in_coupling(self):
        lams = np.linspace(0.0, -1.0 / 6.0, 15)
        vals = [zeta_lambda(Coupling(l)) for l in lams]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert zeta_lambda(Coupling(-0.05)) > math.pi / 3.0
