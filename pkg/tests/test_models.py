import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from quanto_mc.errors import InvalidParameterError
from quanto_mc.models import (EPS_STATE, Case, FellerWarning, JumpParams, ModelSpec, ScModel,
                              ScParams, SerParams, SvModel, SvParams, asset_coefficients,
                              sc_coefficients, ser_coefficients, sv_coefficients)


def fd(fn, x, h=1e-6):
    return (fn(x + h, 0.0) - fn(x - h, 0.0)) / (2 * h)


class TestSv:
    def test_heston_drift_vanishes_at_long_run_level(self):
        c = sv_coefficients(SvParams("Heston", kappa=2, theta=0.04, sigma=0.3))
        assert c.m(0.04, 0.0) == 0.0

    def test_garch_substitution(self):
        c = sv_coefficients(SvParams("Garch", kappa=2, theta=0.04, sigma=0.5))
        assert c.m(0.1, 0.0) == pytest.approx(-0.12, abs=1e-15)
        assert c.s(0.1, 0.0) == pytest.approx(0.05, abs=1e-15)

    def test_three_halves_point(self):
        c = sv_coefficients(SvParams("ThreeHalves", theta=2, sigma=0.4, omega32=2))
        assert c.m(1.0, 0.0) == 0.0
        assert c.s(1.0, 0.0) == pytest.approx(0.4)
        assert c.s_prime(1.0, 0.0) == pytest.approx(0.6)
        assert abs(fd(c.s, 1.0) - 0.6) < 1e-8

    @pytest.mark.parametrize("variant", ["GarchJump", "Bates"])
    def test_jump_coefficient_is_constant_zeta(self, variant):
        p = SvParams(variant, kappa=2, theta=0.04, sigma=0.3, jump=JumpParams(1.0, 0.5, 0.2), zeta=0.07)
        c = sv_coefficients(p)
        assert np.all(c.c(np.array([0.0, 0.04, 3.0]), 0.0) == 0.07)

    def test_no_jump_variants_have_zero_c(self):
        for v in ("Heston", "Garch"):
            assert sv_coefficients(SvParams(v)).c(0.2, 0.0) == 0.0

    def test_s_prime_floors_zero_variance(self):
        c = sv_coefficients(SvParams("Heston", sigma=0.3))
        assert c.s_prime(0.0, 0.0) == pytest.approx(0.3 / (2 * math.sqrt(EPS_STATE)))

    @pytest.mark.parametrize("variant", list(SvModel))
    def test_s_prime_matches_finite_difference(self, variant):
        jump = JumpParams(1.0, 0.1, 0.1) if variant in (SvModel.GARCH_JUMP, SvModel.BATES) else None
        p = SvParams(variant, kappa=2, theta=0.04, sigma=0.3, omega32=1.5, jump=jump, zeta=0.1 if jump else 0.0)
        c = sv_coefficients(p)
        for v in np.linspace(1e-3, 1.0, 100):
            sp = c.s_prime(v, 0.0)
            assert abs(sp - fd(c.s, v)) <= 1e-6 * (1 + abs(sp))

    @given(kappa=st.floats(0.01, 10), theta=st.floats(1e-4, 1), sigma=st.floats(0, 2))
    def test_feller_flag_is_exact_predicate(self, kappa, theta, sigma):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            p = SvParams("Heston", kappa, theta, sigma)
        assert p.feller_satisfied == (2 * kappa * theta > sigma ** 2)

    def test_feller_violation_warns_but_constructs(self):
        with pytest.warns(FellerWarning):
            p = SvParams("Bates", kappa=0.5, theta=0.04, sigma=1.0, jump=JumpParams(1.0))
        assert not p.feller_satisfied

    @pytest.mark.parametrize("kwargs", [
        dict(variant="Heston", kappa=0.0), dict(variant="Heston", theta=-0.1),
        dict(variant="Heston", sigma=-0.1), dict(variant="Bates"),
        dict(variant="Heston", jump=JumpParams(1.0)), dict(variant="ThreeHalves", omega32=0.0),
    ])
    def test_invalid_parameters(self, kwargs):
        with pytest.raises(InvalidParameterError):
            SvParams(**kwargs)

    def test_unknown_tag_lists_valid_tags(self):
        with pytest.raises(InvalidParameterError) as exc:
            SvParams("Hestonish")
        for tag in ("Heston", "Garch", "GarchJump", "Bates", "ThreeHalves"):
            assert tag in str(exc.value)


class TestSc:
    def test_wright_fisher_boundary(self):
        c = sc_coefficients(ScParams("WrightFisher", kappa=1, rho_bar=0.5, sigma=0.2))
        assert c.s(1.0, 0.0) == 0.0
        assert c.s(-1.0, 0.0) == 0.0
        assert c.domain == (-1.0, 1.0)

    def test_jacobi_substitution_and_boundary(self):
        c = sc_coefficients(ScParams("Jacobi", kappa=1, rho_bar=0.0, sigma=0.2, h=0.9, f=-0.9))
        assert c.s(0.0, 0.0) == pytest.approx(0.18, abs=1e-15)
        assert c.s(0.9, 0.0) == 0.0 and c.s(-0.9, 0.0) == 0.0
        assert c.domain == (-0.9, 0.9)

    def test_mean_reverting_drift(self):
        c = sc_coefficients(ScParams("MeanReverting", kappa=2, rho_bar=0.3, sigma=0.4))
        assert c.m(0.5, 0.0) == pytest.approx(2 * (0.3 - 0.5) - 0.16 * 0.5)

    def test_constant_is_inert(self):
        c = sc_coefficients(ScParams("Constant", rho_const=0.4))
        for fn in (c.m, c.s, c.s_prime, c.c):
            assert fn(0.4, 0.0) == 0.0

    @pytest.mark.parametrize("p", [
        ScParams("WrightFisher", kappa=1, rho_bar=0.2, sigma=0.3),
        ScParams("MeanReverting", kappa=1, rho_bar=0.2, sigma=0.3),
        ScParams("Jacobi", kappa=1, rho_bar=0.2, sigma=0.3, h=0.8, f=-0.5),
    ])
    def test_analytic_s_prime_matches_finite_difference(self, p):
        c = sc_coefficients(p)
        lo, hi = c.domain
        for x in np.linspace(lo, hi, 102)[1:-1]:
            sp = c.s_prime(x, 0.0)
            assert abs(sp - fd(c.s, x)) <= 1e-6 * (1 + abs(sp))

    @pytest.mark.parametrize("kwargs", [
        dict(variant="Jacobi", rho_bar=0.95, h=0.9, f=-0.9),
        dict(variant="Jacobi", h=-0.5, f=0.5),
        dict(variant="WrightFisher", rho_bar=1.5),
        dict(variant="Weibull", k_w=0.0),
        dict(variant="Constant", rho_const=1.2),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidParameterError):
            ScParams(**kwargs)


def weibull_s_oracle(x, alpha, lam, k):
    """b1*b2 with b2 = integral_x^inf (t - mu) f(t) dt by quadrature."""
    mpmath.mp.dps = 40
    mu = lam * mpmath.gamma(1 + mpmath.mpf(1) / k)
    f = lambda t: (k / lam) * (t / lam) ** (k - 1) * mpmath.exp(-((t / lam) ** k))
    b2 = mpmath.quad(lambda t: (t - mu) * f(t), [x, x + lam, mpmath.inf])
    return float(2 * alpha / f(mpmath.mpf(x)) * b2)


class TestWeibull:
    def test_diffusion_matches_quadrature_oracle(self):
        p = ScParams("Weibull", alpha=1.0, lambda_w=0.6, k_w=2.0)
        got = float(sc_coefficients(p).s(np.array([0.5]), 0.0)[0])
        assert got == pytest.approx(weibull_s_oracle(0.5, 1.0, 0.6, 2.0), rel=1e-10)

    @pytest.mark.parametrize("x,lam,k", [(0.05, 0.5, 1.5), (0.3, 0.4, 3.0), (0.9, 0.5, 2.5), (0.99, 0.3, 2.0)])
    def test_diffusion_over_operating_range(self, x, lam, k):
        p = ScParams("Weibull", alpha=1.5, lambda_w=lam, k_w=k)
        got = float(sc_coefficients(p).s(np.array([x]), 0.0)[0])
        assert got == pytest.approx(weibull_s_oracle(x, 1.5, lam, k), rel=1e-10)

    def test_sqrt_flag(self):
        base = ScParams("Weibull", alpha=1.0, lambda_w=0.6, k_w=2.0)
        root = ScParams("Weibull", alpha=1.0, lambda_w=0.6, k_w=2.0, weibull_sqrt_diffusion=True)
        x = np.array([0.2, 0.5, 0.8])
        assert np.allclose(sc_coefficients(root).s(x, 0.0) ** 2, sc_coefficients(base).s(x, 0.0), rtol=1e-13)

    @given(lam=st.floats(0.1, 2.0), k=st.floats(0.5, 8.0))
    def test_mean_matches_quadrature(self, lam, k):
        p = ScParams("Weibull", lambda_w=lam, k_w=k)
        mpmath.mp.dps = 30
        f = lambda t: (k / lam) * (t / lam) ** (k - 1) * mpmath.exp(-((t / lam) ** k))
        ref = float(mpmath.quad(lambda t: t * f(t), [0, lam, mpmath.inf]))
        assert p.mu_w == pytest.approx(ref, rel=1e-12)

    def test_diffusion_nonnegative_on_domain(self):
        p = ScParams("Weibull", alpha=1.0, lambda_w=0.6, k_w=2.0)
        x = np.linspace(0.0, 1.0, 201)
        assert np.all(sc_coefficients(p).s(x, 0.0) >= 0)

    def test_domain(self):
        assert sc_coefficients(ScParams("Weibull")).domain == (0.0, 1.0)


class TestSer:
    def test_gbm_drift_with_equal_rates(self):
        c = ser_coefficients(SerParams("Gbm", sigma_fx=0.1, r_f=0.03, r_d=0.03))
        assert c.m(1.3, 0.0) == pytest.approx(-0.0065, abs=1e-15)
        assert c.s(1.3, 0.0) == pytest.approx(0.13)
        assert c.s_prime(1.3, 0.0) == 0.1

    def test_ou_component_vanishes_at_level(self):
        p = SerParams("Ou", sigma_fx=0.1, theta_ou=0.5, mu_ou=1.25)
        gbm = ser_coefficients(SerParams("Gbm", sigma_fx=0.1))
        assert ser_coefficients(p).m(1.25, 0.0) == pytest.approx(gbm.m(1.25, 0.0), abs=1e-16)

    def test_exp_levy_jump_coefficient_is_one(self):
        c = ser_coefficients(SerParams("ExpLevy", sigma_fx=0.1, jump=JumpParams(1.0, 0.0, 0.02)))
        assert c.c(1.3, 0.0) == 1.0

    @pytest.mark.parametrize("kwargs", [
        dict(variant="ExpLevy"), dict(variant="Ou", mu_ou=0.0), dict(variant="Ou", theta_ou=-1.0),
        dict(variant="Gbm", sigma_fx=-0.1), dict(variant="Gbm", jump=JumpParams(1.0)),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidParameterError):
            SerParams(**kwargs)


class TestAsset:
    def test_substitution(self):
        c = asset_coefficients(0.05, 0.04)
        assert c.m(100.0, 0.0) == pytest.approx(5.0)
        assert c.s(100.0, 0.0) == pytest.approx(20.0)

    def test_zero_variance_is_deterministic(self):
        c = asset_coefficients(0.05, 0.0)
        assert c.s(100.0, 0.0) == 0.0

    def test_calibrated_scale_point(self):
        c = asset_coefficients(0.0009, 0.0252)
        # independent recomputation
        assert c.m(3700.0, 0.0) == pytest.approx(3700 * 0.0009, rel=1e-14)
        assert c.s(3700.0, 0.0) == pytest.approx(587.3, abs=0.1)


@given(x=st.floats(-0.999, 0.999), kappa=st.floats(0.1, 5), rb=st.floats(-0.9, 0.9), sigma=st.floats(0, 2))
def test_bounded_models_have_nonnegative_diffusion(x, kappa, rb, sigma):
    for v in ("WrightFisher", "MeanReverting"):
        assert sc_coefficients(ScParams(v, kappa, rb, sigma)).s(x, 0.0) >= 0


def test_model_spec_shapes():
    sv, sc, ser = SvParams("Heston"), ScParams("WrightFisher"), SerParams("Gbm")
    assert ModelSpec.uniform(sv, sc, ser, "case1").case is Case.CASE1
    assert ModelSpec.uniform(sv, sc, ser, "case2").case is Case.CASE2
    with pytest.raises(InvalidParameterError):
        ModelSpec((sv, SvParams("Garch")), sc, (ser,))
    with pytest.raises(InvalidParameterError):
        ModelSpec((sv, sv), sc, (ser,), sc_eur=ScParams("Jacobi", rho_bar=0.0))
    assert ModelSpec.uniform(sv, sc, ser).sc.variant is ScModel.WRIGHT_FISHER
