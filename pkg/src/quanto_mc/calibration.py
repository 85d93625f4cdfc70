"""Historical-data calibration: CSV ingestion, rolling statistics and default model parameters.

Every statistic is computed from observations dated on or before the
calibration date, on log-returns of daily closes. Series are aligned on
their common trading dates before any cross-series statistic is taken.
"""

from __future__ import annotations

import csv
import datetime as _dt
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.optimize import brentq

from .engine import TRADING_DAYS, MarketSnapshot
from .errors import (AlignmentError, DegenerateSeriesError, DuplicateDateError, EmptySeriesError,
                     InsufficientDataError, InvalidParameterError, MissingInstrumentError, ParseError)
from .models import (Case, JumpParams, ModelSpec, ScModel, ScParams, SerModel, SerParams, SvModel,
                     SvParams, parse_tag)

RATE_MAX = 50.0
KAPPA_FLOOR = 0.05
_MISSING = {"", "na", "n/a", "nan", "null", "none", "-"}
_DEGENERATE_VAR = 1e-24

CASE_INSTRUMENTS = {
    Case.CASE1: ("SP500", "FTSE100", "GBPUSD"),
    Case.CASE2: ("SP500", "FTSE100", "STOXX600", "GBPUSD", "EURUSD"),
}


@dataclass(frozen=True, eq=False)
class HistorySeries:
    instrument: str
    dates: tuple
    closes: np.ndarray
    reordered: bool = False
    dropped: int = 0

    def __post_init__(self):
        closes = np.asarray(self.closes, dtype=float)
        object.__setattr__(self, "closes", closes)
        object.__setattr__(self, "dates", tuple(self.dates))
        if len(self.dates) != closes.size:
            raise InvalidParameterError("dates and closes differ in length")
        if closes.size == 0:
            raise EmptySeriesError(f"{self.instrument}: no observations")
        if np.any(~(closes > 0)):
            raise InvalidParameterError(f"{self.instrument}: closes must be positive")
        for a, b in zip(self.dates, self.dates[1:]):
            if not a < b:
                raise InvalidParameterError(f"{self.instrument}: dates must be strictly increasing")

    def __len__(self):
        return self.closes.size

    def up_to(self, as_of: _dt.date) -> "HistorySeries":
        n = sum(1 for d in self.dates if d <= as_of)
        if n == 0:
            raise InsufficientDataError(f"{self.instrument}: no observations on or before {as_of}")
        return HistorySeries(self.instrument, self.dates[:n], self.closes[:n], self.reordered, self.dropped)

    def select(self, dates: Sequence) -> "HistorySeries":
        index = {d: i for i, d in enumerate(self.dates)}
        return HistorySeries(self.instrument, dates, self.closes[[index[d] for d in dates]],
                             self.reordered, self.dropped)

    def tail(self, n: int) -> "HistorySeries":
        return HistorySeries(self.instrument, self.dates[-n:], self.closes[-n:], self.reordered, self.dropped)

    @property
    def log_returns(self) -> np.ndarray:
        return np.diff(np.log(self.closes))


@dataclass(frozen=True)
class CalibrationWindow:
    as_of: _dt.date
    lookback: int = TRADING_DAYS
    window: int = 30

    def __post_init__(self):
        if isinstance(self.as_of, str):
            object.__setattr__(self, "as_of", _dt.date.fromisoformat(self.as_of))
        if self.window < 3:
            raise InvalidParameterError("rolling window must be >= 3")
        if self.lookback < 60:
            raise InvalidParameterError("lookback must be >= 60 trading days")

    @property
    def n_closes(self) -> int:
        """Closes needed for ``lookback`` rolling values of ``window`` returns each."""
        return self.lookback + self.window


def ingest_csv(path, instrument: Optional[str] = None) -> HistorySeries:
    """Read a ``date,close`` file into a validated, date-sorted series."""
    path = Path(path)
    name = instrument or path.stem.upper()
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptySeriesError(f"{path}: empty file") from None
        cols = [h.strip().lower() for h in header]
        if "date" not in cols or "close" not in cols:
            raise ParseError(f"{path}: header must contain 'date' and 'close', got {header}", line=1)
        i_date, i_close = cols.index("date"), cols.index("close")
        dates, closes, dropped = [], [], 0
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) <= max(i_date, i_close):
                raise ParseError(f"{path}: expected {len(cols)} fields, got {len(row)}", line=line)
            try:
                d = _dt.date.fromisoformat(row[i_date].strip())
            except ValueError:
                raise ParseError(f"{path}: bad date {row[i_date]!r}", line=line) from None
            raw = row[i_close].strip()
            if raw.lower() in _MISSING:
                dropped += 1
                continue
            try:
                c = float(raw)
            except ValueError:
                raise ParseError(f"{path}: bad close {raw!r}", line=line) from None
            if not (math.isfinite(c) and c > 0):
                raise ParseError(f"{path}: close must be positive and finite, got {raw!r}", line=line)
            dates.append(d)
            closes.append(c)
    if not dates:
        raise EmptySeriesError(f"{path}: no usable observations")
    order = sorted(range(len(dates)), key=dates.__getitem__)
    reordered = order != list(range(len(dates)))
    dates = [dates[i] for i in order]
    closes = [closes[i] for i in order]
    for a, b in zip(dates, dates[1:]):
        if a == b:
            raise DuplicateDateError(b)
    return HistorySeries(name, dates, np.array(closes), reordered=reordered, dropped=dropped)


@dataclass(frozen=True, eq=False)
class RollingSeries:
    """Rolling statistic; ``values[i]`` uses the trailing window ending on ``dates[i]``."""

    dates: tuple
    values: np.ndarray

    def __len__(self):
        return self.values.size


def _as_series(x):
    if isinstance(x, HistorySeries):
        return x
    arr = np.asarray(x, dtype=float)
    return HistorySeries("series", tuple(range(arr.size)), arr)


def rolling_volatility(series, window: int = 30) -> RollingSeries:
    """Annualised stdev of log-returns over each trailing window (population divisor)."""
    series = _as_series(series)
    if window < 2:
        raise InvalidParameterError("window must be >= 2")
    r = series.log_returns
    if r.size < window:
        raise InsufficientDataError(f"{series.instrument}: {r.size} returns, window needs {window}")
    sd = sliding_window_view(r, window).std(axis=1, ddof=0)
    return RollingSeries(series.dates[window:], sd * math.sqrt(TRADING_DAYS))


def rolling_correlation(a, b, window: int = 30) -> RollingSeries:
    """Pearson correlation of log-returns over trailing windows.

    A window where either leg has zero variance yields 0.
    """
    a, b = _as_series(a), _as_series(b)
    if window < 3:
        raise InvalidParameterError("window must be >= 3")
    if a.dates != b.dates:
        unmatched = sorted(set(a.dates).symmetric_difference(b.dates))
        raise AlignmentError(unmatched or list(a.dates)[:1])
    ra, rb = a.log_returns, b.log_returns
    if ra.size < window:
        raise InsufficientDataError(f"{ra.size} returns, window needs {window}")
    wa = sliding_window_view(ra, window)
    wb = sliding_window_view(rb, window)
    da = wa - wa.mean(axis=1, keepdims=True)
    db = wb - wb.mean(axis=1, keepdims=True)
    num = np.einsum("ij,ij->i", da, db)
    den = np.sqrt(np.einsum("ij,ij->i", da, da) * np.einsum("ij,ij->i", db, db))
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    return RollingSeries(a.dates[window:], np.clip(corr, -1.0, 1.0))


def align(*series: HistorySeries) -> list[HistorySeries]:
    """Restrict every series to the dates they all share."""
    common = set(series[0].dates)
    for s in series[1:]:
        common &= set(s.dates)
    dates = sorted(common)
    if not dates:
        raise AlignmentError(sorted(set().union(*(s.dates for s in series)))[:10])
    return [s.select(dates) for s in series]


@dataclass(frozen=True)
class MeanReversionFit:
    rate: float
    level: float
    phi: float
    capped: bool = False


def lag1_autocorrelation(x) -> float:
    x = np.asarray(x, dtype=float)
    d = x - math.fsum(x) / x.size
    return math.fsum(d[:-1] * d[1:]) / math.fsum(d * d)


def fit_mean_reversion(series, dt: float = 1.0 / TRADING_DAYS, rate_max: float = RATE_MAX) -> MeanReversionFit:
    """AR(1) proxy for an OU process: rate = -ln(phi)/dt, level = sample mean."""
    x = np.asarray(series.values if isinstance(series, RollingSeries) else
                   series.closes if isinstance(series, HistorySeries) else series, dtype=float)
    if x.size < 60:
        raise InsufficientDataError(f"mean-reversion fit needs >= 60 points, got {x.size}")
    level = math.fsum(x) / x.size
    if math.fsum((x - level) ** 2) / x.size <= _DEGENERATE_VAR * max(1.0, level * level):
        raise DegenerateSeriesError("series variance is numerically zero")
    phi = lag1_autocorrelation(x)
    if phi >= 1.0:
        return MeanReversionFit(0.0, level, phi)
    if phi <= math.exp(-rate_max * dt):
        return MeanReversionFit(rate_max, level, phi, capped=True)
    return MeanReversionFit(max(-math.log(phi) / dt, 0.0), level, phi)


def fit_weibull_moments(values) -> tuple[float, float]:
    """(lambda, k) matching the mean and variance of the positive values."""
    x = np.asarray(values, dtype=float)
    x = x[x > 0]
    if x.size < 2:
        raise DegenerateSeriesError("Weibull fit needs at least two positive values")
    mean = float(np.mean(x))
    var = float(np.var(x, ddof=1))
    if var <= 0:
        raise DegenerateSeriesError("Weibull fit needs positive variance")
    cv2 = var / mean ** 2

    def gap(k):
        g1 = math.gamma(1.0 + 1.0 / k)
        return math.gamma(1.0 + 2.0 / k) / (g1 * g1) - 1.0 - cv2

    lo, hi = 0.2, 200.0
    if gap(hi) > 0:
        k = hi
    elif gap(lo) < 0:
        k = lo
    else:
        k = brentq(gap, lo, hi, xtol=1e-12)
    return mean / math.gamma(1.0 + 1.0 / k), k


@dataclass(frozen=True)
class Rates:
    r_d: float = 0.0
    r_f: tuple = (0.0, 0.0)


@dataclass(frozen=True)
class ModelLibrary:
    """Calibrated parameters for every variant; ``spec`` assembles a ModelSpec."""

    case: Case
    sv: Mapping
    sc: Mapping
    ser: Mapping
    sc_eur: Optional[Mapping] = None

    def spec(self, sv, sc, ser) -> ModelSpec:
        sv, sc, ser = parse_tag(SvModel, sv), parse_tag(ScModel, sc), parse_tag(SerModel, ser)
        return ModelSpec(self.sv[sv], self.sc[sc], self.ser[ser],
                         sc_eur=self.sc_eur[sc] if self.sc_eur else None)


@dataclass(frozen=True, eq=False)
class Calibration:
    snapshot: MarketSnapshot
    library: ModelLibrary
    diagnostics: dict = field(default_factory=dict)
    last_date: Optional[_dt.date] = None


def _changes_vol(values: np.ndarray) -> float:
    """Annualised stdev of day-over-day changes of a rolling series."""
    return float(np.std(np.diff(values), ddof=1)) * math.sqrt(TRADING_DAYS)


def _sv_params(var_series: np.ndarray, flags: list, name: str) -> tuple[dict, float]:
    level = float(np.mean(var_series))
    fit = fit_mean_reversion(var_series)
    kappa = max(fit.rate, KAPPA_FLOOR)
    if fit.capped:
        flags.append(f"{name}: variance mean-reversion rate capped at {RATE_MAX}")
    if fit.rate < KAPPA_FLOOR:
        flags.append(f"{name}: variance mean-reversion rate floored at {KAPPA_FLOOR}")
    dv = _changes_vol(var_series)
    jump = JumpParams(lam=1.0, mu_j=0.5, sigma_j=0.25)
    out = {
        SvModel.HESTON: SvParams("Heston", kappa, level, dv / math.sqrt(level)),
        SvModel.GARCH: SvParams("Garch", kappa, level, dv / level),
        SvModel.GARCH_JUMP: SvParams("GarchJump", kappa, level, dv / level, jump=jump, zeta=level),
        SvModel.BATES: SvParams("Bates", kappa, level, dv / math.sqrt(level), jump=jump, zeta=level),
        SvModel.THREE_HALVES: SvParams("ThreeHalves", kappa, kappa / level, dv / level ** 1.5, omega32=kappa),
    }
    return out, float(var_series[-1])


def _sc_params(corr: np.ndarray, flags: list, name: str) -> dict:
    rho_bar = float(np.mean(corr))
    fit = fit_mean_reversion(corr)
    kappa = max(fit.rate, KAPPA_FLOOR)
    if fit.capped:
        flags.append(f"{name}: correlation mean-reversion rate capped at {RATE_MAX}")
    if fit.rate < KAPPA_FLOOR:
        flags.append(f"{name}: correlation mean-reversion rate floored at {KAPPA_FLOOR}")
    dr = _changes_vol(corr)
    rb = min(max(rho_bar, -0.999), 0.999)
    hi = min(float(np.max(corr)) + 0.05, 1.0)
    lo = max(float(np.min(corr)) - 0.05, -1.0)
    try:
        lam_w, k_w = fit_weibull_moments(corr)
    except DegenerateSeriesError:
        lam_w, k_w = max(rho_bar, 0.1) / math.gamma(1.5), 2.0
        flags.append(f"{name}: Weibull fit fell back to k=2")
    return {
        ScModel.WRIGHT_FISHER: ScParams("WrightFisher", kappa, rb, dr / math.sqrt(1.0 - rb * rb)),
        ScModel.JACOBI: ScParams("Jacobi", kappa, rb, dr / math.sqrt((hi - rb) * (rb - lo)), h=hi, f=lo),
        ScModel.MEAN_REVERTING: ScParams("MeanReverting", kappa, rb, dr / math.sqrt(1.0 - rb * rb)),
        ScModel.WEIBULL: ScParams("Weibull", alpha=kappa, lambda_w=lam_w, k_w=k_w),
        ScModel.CONSTANT: ScParams("Constant", rho_const=rho_bar),
    }


def _ser_params(fx: HistorySeries, window: int, lookback: int, r_f: float, r_d: float,
                flags: list) -> dict:
    sigma = float(rolling_volatility(fx, window).values[-1])
    fit = fit_mean_reversion(fx.closes[-lookback:])
    if fit.capped:
        flags.append(f"{fx.instrument}: OU rate capped at {RATE_MAX}")
    levy = JumpParams(lam=1.0, mu_j=0.0, sigma_j=0.02 * float(fx.closes[-1]))
    return {
        SerModel.GBM: SerParams("Gbm", sigma, r_f=r_f, r_d=r_d),
        SerModel.OU: SerParams("Ou", sigma, theta_ou=fit.rate, mu_ou=fit.level, r_f=r_f, r_d=r_d),
        SerModel.EXP_LEVY: SerParams("ExpLevy", sigma, jump=levy, r_f=r_f, r_d=r_d),
    }


def _per_leg(dicts: list, keys) -> dict:
    return {k: tuple(d[k] for d in dicts) for k in keys}


def build_market_snapshot(series: Mapping[str, HistorySeries], window: CalibrationWindow, case,
                          rates: Rates = Rates(), strikes: Optional[Sequence[float]] = None) -> Calibration:
    """Snapshot and per-variant defaults from data dated on or before ``window.as_of``."""
    case = Case.parse(case)
    names = CASE_INSTRUMENTS[case]
    missing = [n for n in names if n not in series]
    if missing:
        raise MissingInstrumentError(f"{case} needs {', '.join(missing)}")
    trimmed = align(*(series[n].up_to(window.as_of) for n in names))
    if len(trimmed[0]) < window.n_closes:
        raise InsufficientDataError(
            f"{len(trimmed[0])} common observations on or before {window.as_of}; "
            f"need {window.n_closes} (lookback {window.lookback} + window {window.window})")
    data = {n: s.tail(window.n_closes) for n, s in zip(names, trimmed)}
    w = window.window
    flags: list = []

    equity = ["SP500", "FTSE100"] + (["STOXX600"] if case is Case.CASE2 else [])
    fx_names = ["GBPUSD"] + (["EURUSD"] if case is Case.CASE2 else [])
    r_f = tuple(rates.r_f[: case.n_rates])
    if len(r_f) < case.n_rates:
        raise InvalidParameterError(f"{case} needs {case.n_rates} foreign rates")

    sv_dicts, v0 = [], []
    for n in equity:
        var = rolling_volatility(data[n], w).values ** 2
        params, last = _sv_params(var, flags, n)
        sv_dicts.append(params)
        v0.append(last)
    if min(v0) <= 0:
        raise DegenerateSeriesError("last rolling variance is zero")

    corr = rolling_correlation(data["SP500"], data["FTSE100"], w).values
    sc = _sc_params(corr, flags, "SP500/FTSE100")
    sc_eur, rho0_eur = None, None
    if case is Case.CASE2:
        corr_eur = rolling_correlation(data["STOXX600"], data["FTSE100"], w).values
        sc_eur = _sc_params(corr_eur, flags, "STOXX600/FTSE100")
        rho0_eur = float(corr_eur[-1])

    ser_dicts = [_ser_params(data[n], w, window.lookback, r_f[i], rates.r_d, flags)
                 for i, n in enumerate(fx_names)]

    s0 = tuple(float(data[n].closes[-1]) for n in equity)
    fx0 = tuple(float(data[n].closes[-1]) for n in fx_names)
    atm = (s0[0],) + tuple(s * x for s, x in zip(s0[1:], fx0))
    snapshot = MarketSnapshot(case, s0, fx0, tuple(v0), float(corr[-1]), rates.r_d, r_f,
                              tuple(strikes) if strikes is not None else atm, rho0_eur=rho0_eur)
    library = ModelLibrary(case, _per_leg(sv_dicts, SvModel), sc, _per_leg(ser_dicts, SerModel), sc_eur)
    diagnostics = {
        "flags": flags,
        "reordered": [n for n in names if series[n].reordered],
        "dropped_rows": {n: series[n].dropped for n in names},
        "first_date": data[names[0]].dates[0].isoformat(),
        "artifact_defaults": [
            "SV/SC sigma = annualised stdev of changes of the rolling series",
            "jump defaults lam=1, mu=0.5, sigma=0.25 (variance), FX lam=1, sigma=2% of spot",
            f"kappa floor {KAPPA_FLOOR}",
        ],
    }
    return Calibration(snapshot, library, diagnostics, last_date=data[names[0]].dates[-1])


def default_library(case, rates: Rates = Rates(), fx0: Sequence[float] = (1.25, 1.1)) -> ModelLibrary:
    """Generic parameters for every variant, used when no history is supplied."""
    case = Case.parse(case)
    jump = JumpParams(lam=1.0, mu_j=0.5, sigma_j=0.25)
    theta = 0.04
    sv = {
        SvModel.HESTON: SvParams("Heston", 2.0, theta, 0.3),
        SvModel.GARCH: SvParams("Garch", 2.0, theta, 1.0),
        SvModel.GARCH_JUMP: SvParams("GarchJump", 2.0, theta, 1.0, jump=jump, zeta=theta),
        SvModel.BATES: SvParams("Bates", 2.0, theta, 0.3, jump=jump, zeta=theta),
        SvModel.THREE_HALVES: SvParams("ThreeHalves", 2.0, 2.0 / theta, 5.0, omega32=2.0),
    }
    sc = {
        ScModel.WRIGHT_FISHER: ScParams("WrightFisher", 2.0, 0.5, 0.3),
        ScModel.JACOBI: ScParams("Jacobi", 2.0, 0.5, 0.5, h=0.95, f=0.0),
        ScModel.MEAN_REVERTING: ScParams("MeanReverting", 2.0, 0.5, 0.3),
        ScModel.WEIBULL: ScParams("Weibull", alpha=2.0, lambda_w=0.55, k_w=3.0),
        ScModel.CONSTANT: ScParams("Constant", rho_const=0.5),
    }
    r_f = tuple(rates.r_f[: case.n_rates])
    ser_legs = []
    for i in range(case.n_rates):
        ser_legs.append({
            SerModel.GBM: SerParams("Gbm", 0.1, r_f=r_f[i], r_d=rates.r_d),
            SerModel.OU: SerParams("Ou", 0.1, theta_ou=1.5, mu_ou=fx0[i], r_f=r_f[i], r_d=rates.r_d),
            SerModel.EXP_LEVY: SerParams("ExpLevy", 0.1, jump=JumpParams(1.0, 0.0, 0.02 * fx0[i]),
                                         r_f=r_f[i], r_d=rates.r_d),
        })
    sv_legs = {k: (v,) * case.n_assets for k, v in sv.items()}
    return ModelLibrary(case, sv_legs, sc, _per_leg(ser_legs, SerModel),
                        dict(sc) if case is Case.CASE2 else None)


def load_series_set(paths: Mapping[str, str]) -> dict:
    return {name: ingest_csv(p, instrument=name) for name, p in paths.items()}
