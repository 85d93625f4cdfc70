"""Quanto best-of payoffs, discounting and estimator statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .engine import (MarketSnapshot, PairedSample, SimConfig, TerminalSample, simulate,
                     simulate_antithetic, variant_label)
from .errors import EmptySampleError, MisalignedPairError
from .models import Case, ModelSpec

Z_STAR = 1.96


def payoff_case1(s_usd, s_gbp, fx, k1, k2):
    """max(S_USD - K1, S_GBP * FX - K2, 0)."""
    return np.maximum(np.maximum(np.subtract(s_usd, k1), np.multiply(s_gbp, fx) - k2), 0.0)


def payoff_case2(s_usd, s_gbp, s_eur, fx_gbp, fx_eur, k1, k2, k3):
    """max(S_USD - K1, S_GBP * FX_GBP - K2, S_EUR * FX_EUR - K3, 0)."""
    legs = np.maximum(np.subtract(s_usd, k1), np.multiply(s_gbp, fx_gbp) - k2)
    return np.maximum(np.maximum(legs, np.multiply(s_eur, fx_eur) - k3), 0.0)


def sample_payoffs(sample: TerminalSample, strikes) -> np.ndarray:
    if sample.case is Case.CASE1:
        return payoff_case1(sample.s_usd, sample.s_gbp, sample.fx_gbp, *strikes[:2])
    return payoff_case2(sample.s_usd, sample.s_gbp, sample.s_eur, sample.fx_gbp, sample.fx_eur, *strikes[:3])


def mean_std(x) -> tuple[float, float]:
    """Mean and sample stdev with exactly rounded sums (order independent)."""
    x = np.asarray(x, dtype=float).ravel()
    n = x.size
    if n == 0:
        raise EmptySampleError("empty sample")
    mean = math.fsum(x) / n
    if n < 2:
        return mean, 0.0
    d = x - mean
    var = math.fsum(d * d) / (n - 1)
    return mean, math.sqrt(var)


def covariance(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    mx, my = math.fsum(x) / x.size, math.fsum(y) / y.size
    return math.fsum((x - mx) * (y - my)) / (x.size - 1)


@dataclass(frozen=True)
class PriceReport:
    price: float
    std_error: float
    ci_low: float
    ci_high: float
    payoff_stdev: float
    n_effective: int
    elapsed: float = 0.0
    pair_covariance: Optional[float] = None
    plain_variance: Optional[float] = None

    @classmethod
    def from_values(cls, discounted, elapsed=0.0, **extra):
        mean, sd = mean_std(discounted)
        n = np.asarray(discounted).size
        se = sd / math.sqrt(n)
        return cls(mean, se, mean - Z_STAR * se, mean + Z_STAR * se, sd, n, elapsed, **extra)

    @property
    def variance_ratio(self) -> Optional[float]:
        """Var(pair mean) / (Var(single payoff) / 2); below 1 means the pairing helped."""
        if self.plain_variance is None or self.plain_variance == 0:
            return None
        return self.payoff_stdev ** 2 / (0.5 * self.plain_variance)


def discount_factor(mkt: MarketSnapshot, horizon: float) -> float:
    return math.exp(-mkt.r_d * horizon)


def discounted_payoffs(sample: TerminalSample, mkt: MarketSnapshot, horizon: float) -> np.ndarray:
    if len(sample) == 0:
        raise EmptySampleError("terminal sample is empty")
    return discount_factor(mkt, horizon) * sample_payoffs(sample, mkt.strikes)


def price(sample: TerminalSample, mkt: MarketSnapshot, cfg: SimConfig) -> PriceReport:
    """Discounted mean payoff with standard error and a 95% interval."""
    disc = discounted_payoffs(sample, mkt, cfg.horizon)
    return PriceReport.from_values(disc, elapsed=sample.elapsed)


def combined_payoffs(paired: PairedSample, mkt: MarketSnapshot, horizon: float):
    """Discounted (original, twin, pair average) payoff arrays."""
    if len(paired.original) != len(paired.antithetic):
        raise MisalignedPairError(
            f"{len(paired.original)} original paths vs {len(paired.antithetic)} twins")
    x = discounted_payoffs(paired.original, mkt, horizon)
    x_twin = discounted_payoffs(paired.antithetic, mkt, horizon)
    return x, x_twin, 0.5 * (x + x_twin)


def price_antithetic(paired: PairedSample, mkt: MarketSnapshot, cfg: SimConfig) -> PriceReport:
    """Estimator over N/2 pair averages.

    Per pair, Var((X + X')/2) = (Var X + Cov(X, X')) / 2 when X and X' share a
    law, so the paired estimator beats N plain draws exactly when the
    realised covariance is negative. ``plain_variance`` pools the sample
    variances of X and X' so that identity also holds for realised values.
    """
    x, x_twin, comb = combined_payoffs(paired, mkt, cfg.horizon)
    _, sd_x = mean_std(x)
    _, sd_t = mean_std(x_twin)
    return PriceReport.from_values(
        comb,
        elapsed=paired.elapsed,
        pair_covariance=covariance(x, x_twin),
        plain_variance=0.5 * (sd_x ** 2 + sd_t ** 2),
    )


def run_and_price(model: ModelSpec, mkt: MarketSnapshot, cfg: SimConfig) -> PriceReport:
    """Simulate and price, dispatching on ``cfg.antithetic``."""
    if cfg.antithetic:
        return price_antithetic(simulate_antithetic(model, mkt, cfg), mkt, cfg)
    return price(simulate(model, mkt, cfg), mkt, cfg)


def run_discounted(model: ModelSpec, mkt: MarketSnapshot, cfg: SimConfig):
    """Per-sample discounted payoffs (pair averages when antithetic) and the raw sample."""
    if cfg.antithetic:
        paired = simulate_antithetic(model, mkt, cfg)
        return combined_payoffs(paired, mkt, cfg.horizon)[2], paired
    sample = simulate(model, mkt, cfg)
    return discounted_payoffs(sample, mkt, cfg.horizon), sample


PRICE_CSV_COLUMNS = ("variant", "sv", "sc", "ser", "scheme", "price", "stderr",
                     "ci_low", "ci_high", "status")


def price_row(model: ModelSpec, cfg: SimConfig, report: Optional[PriceReport], status="ok") -> dict:
    row = {
        "variant": variant_label(model, cfg.scheme),
        "sv": str(model.sv_variant),
        "sc": str(model.sc.variant),
        "ser": str(model.ser_variant),
        "scheme": str(cfg.scheme),
    }
    for key, attr in (("price", "price"), ("stderr", "std_error"), ("ci_low", "ci_low"), ("ci_high", "ci_high")):
        row[key] = "" if report is None else repr(getattr(report, attr))
    row["status"] = status
    return row
