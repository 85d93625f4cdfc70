"""Monte Carlo pricing of quanto best-of options under stochastic volatility,
stochastic correlation and stochastic FX."""

from .engine import MarketSnapshot, SimConfig, TerminalSample, simulate, simulate_antithetic
from .greeks import BumpMode, CorrBumpSpec, GreekReport, Pair, correlation_greeks
from .models import (Case, JumpParams, ModelSpec, ScModel, ScParams, SerModel, SerParams,
                     SvModel, SvParams)
from .pricing import PriceReport, price, price_antithetic, run_and_price
from .schemes import Scheme

__version__ = "0.1.0"

__all__ = [
    "BumpMode", "Case", "CorrBumpSpec", "GreekReport", "JumpParams", "MarketSnapshot",
    "ModelSpec", "Pair", "PriceReport", "ScModel", "ScParams", "Scheme", "SerModel",
    "SerParams", "SimConfig", "SvModel", "SvParams", "TerminalSample", "correlation_greeks",
    "price", "price_antithetic", "run_and_price", "simulate", "simulate_antithetic",
]
