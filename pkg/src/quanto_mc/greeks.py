"""Correlation sensitivities (Cora, Gora) by bump-and-revalue with common random numbers.

The chain-rule expansion of dC/drho runs through dS/drho terms that have no
closed form under stochastic correlation, so the sensitivities are
estimated by central differences instead: three full revaluations at
rho - h, rho and rho + h that reuse one seed, hence identical increment
streams. Because FX noise is independent of the correlation, only the
asset mixing changes between the legs.

Per-path differences give the standard errors directly, which is what makes
the CRN estimator tight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .engine import MarketSnapshot, SimConfig, variant_label
from .errors import DomainSaturationError, InvalidParameterError
from .models import Case, ModelSpec, ScModel, ScParams
from .pricing import PriceReport, mean_std, run_discounted

DEFAULT_H = 0.01
WIDE_H = 0.02


class BumpMode(str, Enum):
    INITIAL_ONLY = "InitialOnly"
    PARALLEL_SHIFT = "ParallelShift"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "").replace("-", "")
        if key in ("initialonly", "initial"):
            return cls.INITIAL_ONLY
        if key in ("parallelshift", "parallel"):
            return cls.PARALLEL_SHIFT
        raise InvalidParameterError(f"unknown bump mode {value!r}; valid: InitialOnly, ParallelShift")


class Pair(str, Enum):
    GBP_USD = "GBP_USD"
    EUR_USD = "EUR_USD"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().upper().replace("/", "_").replace("-", "_")
        for member in cls:
            if key in (member.value, member.value.replace("_", "")):
                return member
        raise InvalidParameterError(f"unknown pair {value!r}; valid: GBP_USD, EUR_USD")


@dataclass(frozen=True)
class CorrBumpSpec:
    h: float = DEFAULT_H
    mode: BumpMode = BumpMode.PARALLEL_SHIFT
    pair: Pair = Pair.GBP_USD
    auto_widen: bool = True

    def __post_init__(self):
        object.__setattr__(self, "mode", BumpMode.parse(self.mode))
        object.__setattr__(self, "pair", Pair.parse(self.pair))
        if not self.h > 0:
            raise InvalidParameterError("bump size h must be positive")


@dataclass(frozen=True)
class GreekReport:
    cora: float
    cora_se: float
    gora: float
    gora_se: float
    h: float
    mode: BumpMode
    pair: Pair
    base: PriceReport
    down: PriceReport
    up: PriceReport
    fingerprints: tuple = ()

    def row(self, variant: str) -> dict:
        return {
            "variant": variant, "pair": str(self.pair), "h": repr(self.h), "mode": str(self.mode),
            "cora": repr(self.cora), "cora_se": repr(self.cora_se),
            "gora": repr(self.gora), "gora_se": repr(self.gora_se),
        }


GREEK_CSV_COLUMNS = ("variant", "pair", "h", "mode", "cora", "cora_se", "gora", "gora_se")


def _shift_sc(sc: ScParams, delta: float, mode: BumpMode) -> ScParams:
    if sc.variant is ScModel.CONSTANT:
        lo, hi = sc.domain
        value = sc.rho_const + delta
        if not lo <= value <= hi:
            raise DomainSaturationError(f"constant correlation {sc.rho_const} +/- {abs(delta)} leaves [{lo}, {hi}]")
        return replace(sc, rho_const=value)
    if mode is BumpMode.INITIAL_ONLY:
        return sc
    if sc.variant is ScModel.WEIBULL:
        target = sc.mu_w + delta
        if not 0.0 < target < 1.0:
            raise DomainSaturationError(f"Weibull mean {sc.mu_w} +/- {abs(delta)} leaves (0, 1)")
        return replace(sc, lambda_w=target / math.gamma(1.0 + 1.0 / sc.k_w))
    value = sc.rho_bar + delta
    lo, hi = sc.domain
    if sc.variant is ScModel.JACOBI:
        if not lo < value < hi:
            raise DomainSaturationError(f"Jacobi rho_bar {sc.rho_bar} +/- {abs(delta)} leaves ({lo}, {hi})")
    elif not lo <= value <= hi:
        raise DomainSaturationError(f"rho_bar {sc.rho_bar} +/- {abs(delta)} leaves [{lo}, {hi}]")
    return replace(sc, rho_bar=value)


def _shift_rho0(rho0: float, sc: ScParams, delta: float) -> float:
    if sc.variant is ScModel.CONSTANT:
        return rho0
    lo, hi = sc.domain
    value = rho0 + delta
    if not lo <= value <= hi:
        raise DomainSaturationError(f"rho0 {rho0} +/- {abs(delta)} leaves [{lo}, {hi}]")
    return value


def bumped_inputs(model: ModelSpec, mkt: MarketSnapshot, delta: float, bump: CorrBumpSpec):
    """(model, market) with the targeted correlation shifted by ``delta``."""
    if model.case is Case.CASE1 or bump.pair is Pair.GBP_USD:
        if bump.pair is Pair.EUR_USD:
            raise InvalidParameterError("EUR_USD correlation only exists in case2")
        sc = _shift_sc(model.sc, delta, bump.mode)
        rho0 = _shift_rho0(mkt.rho0, model.sc, delta)
        if model.case is Case.CASE1:
            return replace(model, sc=sc), replace(mkt, rho0=rho0)
        # keep the EUR leg on the unbumped process
        sc_eur = model.sc_eur if model.sc_eur is not None else model.sc
        rho0_eur = mkt.rho0_eur if mkt.rho0_eur is not None else mkt.rho0
        return (replace(model, sc=sc, sc_eur=sc_eur),
                replace(mkt, rho0=rho0, rho0_eur=rho0_eur))
    base_sc = model.sc_eur if model.sc_eur is not None else model.sc
    base_rho0 = mkt.rho0_eur if mkt.rho0_eur is not None else mkt.rho0
    sc_eur = _shift_sc(base_sc, delta, bump.mode)
    rho0_eur = _shift_rho0(base_rho0, base_sc, delta)
    return replace(model, sc_eur=sc_eur), replace(mkt, rho0_eur=rho0_eur)


def _crn_legs(model, mkt, cfg, h, bump):
    legs = {}
    for name, delta in (("down", -h), ("base", 0.0), ("up", h)):
        m, k = bumped_inputs(model, mkt, delta, bump) if delta else (model, mkt)
        disc, sample = run_discounted(m, k, cfg)
        legs[name] = (disc, PriceReport.from_values(disc, elapsed=sample.elapsed), sample.fingerprint)
    return legs


def _estimate(model, mkt, cfg, h, bump) -> GreekReport:
    legs = _crn_legs(model, mkt, cfg, h, bump)
    down, base, up = legs["down"][0], legs["base"][0], legs["up"][0]
    cora, cora_sd = mean_std((up - down) / (2.0 * h))
    gora, gora_sd = mean_std((up - 2.0 * base + down) / (h * h))
    n = up.size
    return GreekReport(
        cora=cora, cora_se=cora_sd / math.sqrt(n),
        gora=gora, gora_se=gora_sd / math.sqrt(n),
        h=h, mode=bump.mode, pair=bump.pair,
        base=legs["base"][1], down=legs["down"][1], up=legs["up"][1],
        fingerprints=tuple(legs[k][2] for k in ("down", "base", "up")),
    )


def correlation_greeks(model: ModelSpec, mkt: MarketSnapshot, cfg: SimConfig,
                       bump: CorrBumpSpec = CorrBumpSpec()) -> GreekReport:
    """Cora and Gora from one set of three CRN revaluations.

    With ``auto_widen`` and the default h, a noise-dominated Cora
    (stderr > |Cora|) is re-estimated once with h = 0.02.
    """
    report = _estimate(model, mkt, cfg, bump.h, bump)
    if bump.auto_widen and bump.h < WIDE_H and report.cora_se > abs(report.cora):
        report = _estimate(model, mkt, cfg, WIDE_H, bump)
    return report


def cora(model, mkt, cfg, bump: CorrBumpSpec = CorrBumpSpec()) -> GreekReport:
    return correlation_greeks(model, mkt, cfg, bump)


def gora(model, mkt, cfg, bump: CorrBumpSpec = CorrBumpSpec()) -> GreekReport:
    return correlation_greeks(model, mkt, cfg, bump)


def central_differences(price_fn: Callable[[float], float], rho: float, h: float) -> tuple[float, float]:
    """First and second central differences of a scalar pricing function."""
    lo, mid, hi = price_fn(rho - h), price_fn(rho), price_fn(rho + h)
    return (hi - lo) / (2.0 * h), (hi - 2.0 * mid + lo) / (h * h)


def greek_label(model: ModelSpec, cfg: SimConfig) -> str:
    return variant_label(model, cfg.scheme)
