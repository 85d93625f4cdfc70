import csv
import math
from dataclasses import replace

import numpy as np
import pytest

from conftest import frozen_market, frozen_model
from quanto_mc.engine import (UNIT_PATHS, MarketSnapshot, SimConfig, simulate, simulate_antithetic,
                              write_path_dump)
from quanto_mc.errors import ConfigMismatchError, InvalidParameterError, NumericalBlowupError
from quanto_mc.models import JumpParams, ModelSpec, ScParams, SerParams, SvParams
from quanto_mc.pricing import price
from quanto_mc.stochastics import Tag, standard_normals


def stochastic_model(case="case1", sc="WrightFisher", scheme_safe=True):
    sv = SvParams("Bates", kappa=2, theta=0.04, sigma=0.3, jump=JumpParams(2.0, 0.2, 0.1), zeta=0.04)
    scp = {
        "WrightFisher": ScParams("WrightFisher", 2, 0.4, 0.5),
        "Jacobi": ScParams("Jacobi", 2, 0.4, 0.8, h=0.9, f=-0.2),
        "Weibull": ScParams("Weibull", alpha=2.0, lambda_w=0.5, k_w=2.5),
    }[sc]
    ser = SerParams("ExpLevy", sigma_fx=0.1, jump=JumpParams(1.0, 0.0, 0.02))
    return ModelSpec.uniform(sv, scp, ser, case)


def market(case="case1"):
    if case == "case1":
        return MarketSnapshot("case1", (100, 80), (1.25,), (0.04, 0.05), 0.3, 0.0, (0.0,), (100, 100))
    return MarketSnapshot("case2", (100, 80, 90), (1.25, 1.1), (0.04, 0.05, 0.03), 0.3, 0.0, (0.0, 0.0),
                          (100, 100, 99))


class TestConfig:
    def test_defaults(self):
        cfg = SimConfig()
        assert cfg.n_paths == 500_000 and cfg.n_steps == 252
        assert cfg.dt * cfg.n_steps == pytest.approx(1.0, rel=1e-15)
        assert SimConfig(horizon=0.5).n_steps == 126

    @pytest.mark.parametrize("kwargs", [dict(n_paths=1), dict(antithetic=True, n_paths=11),
                                        dict(workers=0), dict(horizon=0.0), dict(n_steps=0), dict(seed=-1)])
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidParameterError):
            SimConfig(**kwargs)

    def test_snapshot_validation(self):
        with pytest.raises(InvalidParameterError):
            MarketSnapshot("case1", (100, 80, 1), (1.25,), (0.04, 0.05), 0.3, 0.0, (0.0,), (1, 1))
        with pytest.raises(InvalidParameterError):
            MarketSnapshot("case1", (100, 80), (1.25,), (0.04, 0.05), 1.3, 0.0, (0.0,), (1, 1))
        with pytest.raises(InvalidParameterError):
            MarketSnapshot("case1", (100, -80), (1.25,), (0.04, 0.05), 0.3, 0.0, (0.0,), (1, 1))

    def test_atm_strikes(self):
        assert market().atm_strikes() == (100.0, 100.0)


def test_replay_matches_independent_recurrence():
    """Frozen vols, constant rho, flat FX: terminal assets follow a plain Euler product of the streams."""
    rho, seed, n, steps = 0.35, 5, 3000, 12
    model = frozen_model(rho=rho, r_f=0.02, r_d=0.03)
    mkt = frozen_market(rho=rho, s0=(100.0, 90.0), v=0.04, r_d=0.03, r_f=(0.02,))
    sample = simulate(model, mkt, SimConfig(n_paths=n, n_steps=steps, seed=seed))
    dt = 1.0 / steps
    s_usd, s_gbp = np.full(n, 100.0), np.full(n, 90.0)
    fx = np.full(n, 1.0)
    for j in range(steps):
        zg = standard_normals(seed, Tag.Z_GBP, j, 0, n)
        zu = standard_normals(seed, Tag.Z_USD, j, 0, n)
        dw_u = math.sqrt(dt) * (rho * zg + math.sqrt(1 - rho * rho) * zu)
        s_usd = s_usd + s_usd * 0.03 * dt + s_usd * 0.2 * dw_u
        s_gbp = s_gbp + s_gbp * 0.02 * dt + s_gbp * 0.2 * math.sqrt(dt) * zg
        fx = fx + fx * (0.02 - 0.03) * dt
    assert np.allclose(sample.s_usd, s_usd, rtol=1e-12)
    assert np.allclose(sample.s_gbp, s_gbp, rtol=1e-12)
    assert np.allclose(sample.fx_gbp, fx, rtol=1e-12)


@pytest.mark.parametrize("case", ["case1", "case2"])
def test_worker_count_does_not_change_results(case):
    model, mkt = stochastic_model(case), market(case)
    cfg = SimConfig(n_paths=2 * UNIT_PATHS + 123, n_steps=8, seed=3, fingerprint=True)
    runs = [simulate(model, mkt, replace(cfg, workers=w)) for w in (1, 4, 16)]
    for r in runs[1:]:
        assert np.array_equal(r.assets, runs[0].assets)
        assert np.array_equal(r.fx, runs[0].fx)
        assert r.fingerprint == runs[0].fingerprint


def test_tiny_sample_is_deterministic():
    model, mkt = stochastic_model(), market()
    a = simulate(model, mkt, SimConfig(n_paths=4, n_steps=20, seed=9, workers=1))
    b = simulate(model, mkt, SimConfig(n_paths=4, n_steps=20, seed=9, workers=4))
    assert np.array_equal(a.assets, b.assets) and np.array_equal(a.fx, b.fx)


def test_prefix_property():
    """Path i does not depend on how many other paths are simulated."""
    model, mkt = stochastic_model(), market()
    small = simulate(model, mkt, SimConfig(n_paths=1000, n_steps=10, seed=4))
    large = simulate(model, mkt, SimConfig(n_paths=UNIT_PATHS + 7, n_steps=10, seed=4))
    assert np.array_equal(small.assets, large.assets[:1000])


class TestMartingales:
    N = 100_000

    def test_discounted_assets_and_fx(self):
        r_d, r_f, sig = 0.05, 0.03, 0.1
        model = frozen_model(rho=0.3, sigma_fx=sig, r_f=r_f, r_d=r_d)
        mkt = frozen_market(rho=0.3, s0=(100.0, 80.0), fx0=(1.25,), r_d=r_d, r_f=(r_f,))
        s = simulate(model, mkt, SimConfig(n_paths=self.N, n_steps=50, seed=17, workers=4))
        checks = [
            (np.exp(-r_d) * s.s_usd, 100.0),
            (s.s_gbp, 80.0 * math.exp(r_f)),
            (s.fx_gbp, 1.25 * math.exp(r_f - r_d - 0.5 * sig * sig)),
        ]
        for x, expected in checks:
            se = x.std(ddof=1) / math.sqrt(x.size)
            assert abs(x.mean() - expected) < 3 * se


def test_terminal_log_return_correlation():
    rho = 0.6
    s = simulate(frozen_model(rho=rho), frozen_market(rho=rho), SimConfig(n_paths=100_000, n_steps=20, seed=8, workers=4))
    corr = np.corrcoef(np.log(s.s_usd), np.log(s.s_gbp))[0, 1]
    assert abs(corr - rho) < 0.01


def test_step_doubling_changes_price_within_noise():
    model = frozen_model(rho=0.2)
    mkt = frozen_market(rho=0.2)
    p1 = price(simulate(model, mkt, SimConfig(n_paths=50_000, n_steps=32, seed=2)), mkt, SimConfig(n_steps=32))
    p2 = price(simulate(model, mkt, SimConfig(n_paths=50_000, n_steps=64, seed=2)), mkt, SimConfig(n_steps=64))
    assert abs(p1.price - p2.price) < 2 * max(p1.std_error, p2.std_error)


class TestAntithetic:
    def test_twins_mirror_log_returns(self):
        model = frozen_model(rho=0.0)
        mkt = frozen_market()
        cfg = SimConfig(n_paths=2000, n_steps=1, seed=1, antithetic=True)
        pair = simulate_antithetic(model, mkt, cfg)
        # one Euler step: S' - S0 = -(S - S0)
        assert np.allclose(pair.antithetic.s_usd - 100.0, -(pair.original.s_usd - 100.0), atol=1e-12)

    def test_pairing_uses_negated_draws(self):
        model, mkt = frozen_model(rho=0.0), frozen_market()
        cfg = SimConfig(n_paths=200, n_steps=1, seed=6, antithetic=True)
        pair = simulate_antithetic(model, mkt, cfg)
        z = standard_normals(6, Tag.Z_USD, 0, 0, 100)
        assert np.allclose(pair.original.s_usd, 100 * (1 + 0.2 * z), rtol=1e-14)
        assert np.allclose(pair.antithetic.s_usd, 100 * (1 - 0.2 * z), rtol=1e-14)

    def test_original_half_equals_plain_simulation(self):
        model, mkt = stochastic_model(), market()
        pair = simulate_antithetic(model, mkt, SimConfig(n_paths=2 * 500, n_steps=15, seed=2, antithetic=True))
        plain = simulate(model, mkt, SimConfig(n_paths=500, n_steps=15, seed=2))
        assert np.array_equal(pair.original.assets, plain.assets)

    def test_paired_terminal_values_negatively_correlated(self):
        pair = simulate_antithetic(frozen_model(), frozen_market(),
                                   SimConfig(n_paths=20_000, n_steps=50, seed=3, antithetic=True))
        assert np.corrcoef(pair.original.s_usd, pair.antithetic.s_usd)[0, 1] < 0

    def test_flag_mismatch(self):
        with pytest.raises(ConfigMismatchError):
            simulate(frozen_model(), frozen_market(), SimConfig(n_paths=10, antithetic=True))
        with pytest.raises(ConfigMismatchError):
            simulate_antithetic(frozen_model(), frozen_market(), SimConfig(n_paths=10))


@pytest.mark.parametrize("case", ["case1", "case2"])
@pytest.mark.parametrize("sc", ["WrightFisher", "Jacobi", "Weibull"])
@pytest.mark.parametrize("scheme", ["Euler", "Milstein", "RungeKutta"])
def test_bounds_hold_on_every_step(case, sc, scheme):
    s = simulate(stochastic_model(case, sc), market(case),
                 SimConfig(n_paths=3000, n_steps=30, seed=1, scheme=scheme, check_bounds=True, retain_paths=50))
    assert s.bound_violations == 0
    assert np.all(s.assets >= 0) and np.all(s.fx >= 0)
    lo, hi = stochastic_model(case, sc).sc.domain
    assert np.all((s.paths["rho"] >= lo) & (s.paths["rho"] <= hi))


def test_mismatched_case_rejected():
    with pytest.raises(ConfigMismatchError):
        simulate(stochastic_model("case2"), market("case1"), SimConfig(n_paths=10, n_steps=2))


def test_fx_rates_must_match_snapshot():
    model = frozen_model(r_f=0.01, r_d=0.0)
    with pytest.raises(ConfigMismatchError):
        simulate(model, frozen_market(), SimConfig(n_paths=10, n_steps=2))


def test_blowup_carries_context():
    sv = SvParams("Garch", kappa=1, theta=0.04, sigma=1e300)
    model = ModelSpec.uniform(sv, ScParams("Constant"), SerParams("Gbm"))
    with pytest.raises(NumericalBlowupError) as exc:
        simulate(model, frozen_market(), SimConfig(n_paths=100, n_steps=10, seed=0))
    err = exc.value
    assert err.variant == "Garch/Constant/Gbm/Euler"
    assert err.step is not None and err.path is not None and err.process.startswith("v_")


def test_separate_eur_process_with_same_parameters_is_identical():
    model, mkt = stochastic_model("case2"), market("case2")
    cfg = SimConfig(n_paths=500, n_steps=10, seed=1)
    base = simulate(model, mkt, cfg)
    split = simulate(replace(model, sc_eur=model.sc), replace(mkt, rho0_eur=mkt.rho0), cfg)
    assert np.array_equal(base.assets, split.assets)


def test_rho0_eur_requires_separate_process():
    with pytest.raises(ConfigMismatchError):
        simulate(stochastic_model("case2"), replace(market("case2"), rho0_eur=0.1), SimConfig(n_paths=10, n_steps=2))


def test_path_dump(tmp_path):
    s = simulate(stochastic_model(), market(), SimConfig(n_paths=100, n_steps=5, seed=1, retain_paths=3))
    out = tmp_path / "paths.csv"
    rows = write_path_dump(s, out)
    assert rows == 3 * 6
    with open(out) as fh:
        data = list(csv.reader(fh))
    assert data[0][:3] == ["path", "step", "t"]
    assert "rho" in data[0] and "S_USD" in data[0]
    last = data[-1]
    assert float(last[data[0].index("S_USD")]) == s.s_usd[2]
    with pytest.raises(ValueError):
        write_path_dump(simulate(stochastic_model(), market(), SimConfig(n_paths=10, n_steps=2)), out)
