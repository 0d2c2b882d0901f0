import math

import numpy as np
import pytest
from scipy import integrate

from carlemanfp.grids import (
    HARD_CUTOFF,
    QuadratureConfig,
    log_envelope_function,
    make_nodes,
    random_klambda,
    zero_function,
)
from carlemanfp.hilbert import (
    HilbertOfExp,
    SampledPVTransform,
    hilbert_of_exp,
    hilbert_power_law,
)

# Independently computed closed form 2 atanh(1/2)/pi.
POWER_LAW_HALF_AT_3 = 0.3496991525660598


def brute_pv_quotient(beta, mu, a):
    """Independent PV oracle: on the symmetric window [0, 2a] the Cauchy
    kernel integrates to zero, so the subtracted integrand is regular."""
    f = lambda x: (beta + x) ** (mu - 1.0)
    fa = f(a)
    inner = integrate.quad(
        lambda x: (f(x) - fa) / (x - a),
        0.0,
        2.0 * a,
        points=[a],
        limit=400,
        epsabs=1e-13,
        epsrel=1e-13,
    )[0]
    outer = integrate.quad(
        lambda x: f(x) / (x - a), 2.0 * a, np.inf, limit=400, epsabs=1e-13,
        epsrel=1e-13,
    )[0]
    return (inner + outer) / math.pi / (beta + a) ** (mu - 1.0)


class TestPowerLawClosedForm:
    def test_arctanh_reduction(self):
        assert hilbert_power_law(1.0, 0.5, 3.0) == pytest.approx(
            POWER_LAW_HALF_AT_3, rel=1e-13
        )
        assert hilbert_power_law(1.0, 0.5, 3.0) == pytest.approx(
            2.0 * math.atanh(0.5) / math.pi, rel=1e-13
        )

    def test_far_field_is_minus_cot(self):
        # the hypergeometric piece carries (beta/(beta+a))^mu, so the
        # quotient drifts to -cot(pi mu) like a^(-mu); for mu = 1/4 the
        # deviation is (1/(mu pi)) (1+a)^(-1/4), i.e. ~1e-3 needs a ~ 1e13
        devs = [abs(hilbert_power_law(1.0, 0.25, a) + 1.0) for a in (1e8, 1e10, 1e13)]
        assert devs == sorted(devs, reverse=True)
        assert devs[-1] < 1e-3

    @pytest.mark.parametrize(
        "beta,mu,a", [(1.0, 0.3, 1.0), (1.0, 0.25, 12.0), (1.0, 0.45, 900.0)]
    )
    def test_brute_force_pv_oracle(self, beta, mu, a):
        assert hilbert_power_law(beta, mu, a) == pytest.approx(
            brute_pv_quotient(beta, mu, a), rel=1e-7
        )

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            hilbert_power_law(0.0, 0.5, 1.0)
        with pytest.raises(ValueError):
            hilbert_power_law(1.0, 1.5, 1.0)
        with pytest.raises(ValueError):
            hilbert_power_law(1.0, 0.5, 0.0)


class TestHilbertOfExp:
    def test_constant_function_hard_cutoff(self):
        lam2 = 1e4
        cfg = QuadratureConfig(n_nodes=400, lambda2=lam2, tail_mode=HARD_CUTOFF)
        f = zero_function(make_nodes(400, lam2))
        a = np.array([0.7, 13.0, 4000.0])
        got = hilbert_of_exp(f, a, cfg)
        assert np.allclose(got, np.log((lam2 - a) / a) / math.pi, atol=1e-14)

    # includes |lam| and lambda_r of the reference coupling
    @pytest.mark.parametrize("mu", [0.1, 0.15915494, 0.23346907, 0.25, 0.45])
    def test_power_law_oracle(self, mu):
        cfg = QuadratureConfig(n_nodes=2000, lambda2=1e6)
        f = log_envelope_function(make_nodes(2000, 1e6), mu - 1.0)
        a = np.geomspace(1e-3, 1e3, 30)
        got = HilbertOfExp(f, cfg).quotient(a)
        oracle = hilbert_power_law(1.0, mu, a)
        assert np.max(np.abs(got / oracle - 1.0)) < 1e-6

    def test_adaptive_pv_oracle_single_point(self):
        mu, a = 0.3, 1.0
        cfg = QuadratureConfig(n_nodes=1500, lambda2=1e6)
        f = log_envelope_function(make_nodes(1500, 1e6), mu - 1.0)
        got = hilbert_of_exp(f, a, cfg)
        assert got == pytest.approx(brute_pv_quotient(1.0, mu, a), rel=1e-6)

    def test_prefactor_kills_origin_divergence(self, fig_coupling, rng):
        cfg = QuadratureConfig(n_nodes=500, lambda2=1e5)
        f = random_klambda(fig_coupling, make_nodes(500, 1e5), rng)
        he = HilbertOfExp(f, cfg)
        a = np.array([1e-2, 1e-4, 1e-6, 1e-8])
        vals = np.abs(a * he.quotient(a))
        assert vals[-1] < 1e-6
        assert np.all(np.diff(vals) < 0)

    def test_envelope_monotonicity(self, fig_coupling, rng):
        # random members sit between the two power-law transform quotients
        cfg = QuadratureConfig(n_nodes=800, lambda2=1e6)
        nodes = make_nodes(800, 1e6)
        a = np.geomspace(1e-2, 1e4, 25)
        lo = hilbert_power_law(1.0, fig_coupling.abs_lambda, a)
        hi = hilbert_power_law(1.0, fig_coupling.lambda_r, a)
        for _ in range(5):
            f = random_klambda(fig_coupling, nodes, rng)
            q = HilbertOfExp(f, cfg).quotient(a)
            assert np.all(q >= lo - 1e-5)
            assert np.all(q <= hi + 1e-5)

    def test_domain_errors(self):
        cfg = QuadratureConfig(n_nodes=200, lambda2=1e4)
        f = log_envelope_function(make_nodes(200, 1e4), -0.8)
        with pytest.raises(ValueError):
            hilbert_of_exp(f, 0.0, cfg)
        with pytest.raises(ValueError):
            hilbert_of_exp(f, 1e4, cfg)

    def test_slow_tail_flag(self):
        cfg = QuadratureConfig(n_nodes=200, lambda2=1e4)
        f = log_envelope_function(make_nodes(200, 1e4), -0.3)
        assert HilbertOfExp(f, cfg).slow_tail

    def test_non_decaying_tail_rejected(self):
        cfg = QuadratureConfig(n_nodes=200, lambda2=1e4)
        f = zero_function(make_nodes(200, 1e4))
        with pytest.raises(ValueError):
            HilbertOfExp(f, cfg)


class TestSampledTransformLinearity:
    def test_scaling_homogeneity(self):
        nodes = make_nodes(300, 1e4)
        vals = np.sin(np.log1p(nodes)) * np.log1p(nodes)
        one = SampledPVTransform(nodes, vals)
        three = SampledPVTransform(nodes, 3.0 * vals)
        a = np.array([0.4, 7.0, 1234.0])
        assert np.allclose(3.0 * one.at(a), three.at(a), rtol=1e-12, atol=1e-14)

    def test_additivity(self):
        nodes = make_nodes(300, 1e4)
        v1 = np.log1p(nodes)
        v2 = nodes / (1.0 + nodes)
        a = np.array([0.9, 55.0])
        got = SampledPVTransform(nodes, v1 + v2).at(a)
        parts = SampledPVTransform(nodes, v1).at(a) + SampledPVTransform(nodes, v2).at(a)
        assert np.allclose(got, parts, rtol=1e-11, atol=1e-13)

    def test_zero_point_value(self):
        nodes = make_nodes(300, 1e4)
        vals = nodes / (1.0 + nodes)  # vanishes at 0, integrand regular
        got = SampledPVTransform(nodes, vals).at_zero()
        exact = math.log1p(1e4) / math.pi
        assert got == pytest.approx(exact, rel=1e-6)
