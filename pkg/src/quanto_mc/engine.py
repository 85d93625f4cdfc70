"""Path simulation for the two- and three-asset quanto set-ups.

Each time step advances, in order: the variance of every asset, the
correlation, every FX rate (all with the chosen scheme), then the assets
with Euler using the start-of-step variance and correlation. Every state is
projected back onto its domain after the step (full truncation).

Paths are processed in fixed units of :data:`UNIT_PATHS`; the unit layout
depends only on the path count, so a worker pool of any size produces
bit-identical output.
"""

from __future__ import annotations

import csv
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigMismatchError, InvalidParameterError, NumericalBlowupError
from .models import (Case, ModelSpec, ScModel, asset_coefficients, sc_coefficients,
                     ser_coefficients, sv_coefficients)
from .schemes import Scheme, StepInput, euler_step, stepper
from .stochastics import (ASSET_NOISE, BLOCK_SIZE, FX_JUMPS, FX_NOISE, VOL_JUMPS, VOL_NOISE,
                          StreamFingerprint, Tag, jump_draws, mix_correlated, standard_normals)

log = logging.getLogger(__name__)

UNIT_PATHS = 4 * BLOCK_SIZE
TRADING_DAYS = 252
ASSET_NAMES = ("USD", "GBP", "EUR")
RATE_NAMES = ("GBP", "EUR")


@dataclass(frozen=True)
class MarketSnapshot:
    """Initial state and rates. Assets are ordered (USD, GBP[, EUR]); rates (GBP[, EUR]).

    FX rates are quoted as domestic (USD) per one unit of foreign currency.
    ``rho0_eur`` overrides the starting correlation of the EUR leg only.
    """

    case: Case
    s0: tuple[float, ...]
    fx0: tuple[float, ...]
    v0: tuple[float, ...]
    rho0: float
    r_d: float
    r_f: tuple[float, ...]
    strikes: tuple[float, ...]
    rho0_eur: Optional[float] = None

    def __post_init__(self):
        case = Case.parse(self.case)
        object.__setattr__(self, "case", case)
        for name in ("s0", "fx0", "v0", "r_f", "strikes"):
            object.__setattr__(self, name, tuple(float(x) for x in getattr(self, name)))
        na, nr = case.n_assets, case.n_rates
        if len(self.s0) != na or len(self.v0) != na or len(self.strikes) != na:
            raise InvalidParameterError(f"{case} needs {na} asset prices, variances and strikes")
        if len(self.fx0) != nr or len(self.r_f) != nr:
            raise InvalidParameterError(f"{case} needs {nr} FX rates and foreign rates")
        if min(self.s0) <= 0 or min(self.fx0) <= 0 or min(self.v0) <= 0:
            raise InvalidParameterError("prices, FX rates and variances must be positive")
        if not -1.0 <= self.rho0 <= 1.0:
            raise InvalidParameterError(f"rho0 must lie in [-1, 1], got {self.rho0}")
        if self.rho0_eur is not None and not -1.0 <= self.rho0_eur <= 1.0:
            raise InvalidParameterError("rho0_eur must lie in [-1, 1]")

    @property
    def asset_rates(self) -> tuple[float, ...]:
        return (self.r_d,) + self.r_f

    @property
    def r_f1(self):
        return self.r_f[0]

    @property
    def r_f2(self):
        return self.r_f[1] if len(self.r_f) > 1 else None

    def atm_strikes(self) -> tuple[float, ...]:
        """Each leg's initial value in USD: S_USD, S_GBP * FX_GBP[, S_EUR * FX_EUR]."""
        return (self.s0[0],) + tuple(s * fx for s, fx in zip(self.s0[1:], self.fx0))


@dataclass(frozen=True)
class SimConfig:
    n_paths: int = 500_000
    horizon: float = 1.0
    n_steps: Optional[int] = None
    seed: int = 0
    scheme: Scheme = Scheme.EULER
    antithetic: bool = False
    workers: int = 1
    retain_paths: int = 0
    check_bounds: bool = False
    fingerprint: bool = False

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        if self.n_steps is None:
            object.__setattr__(self, "n_steps", max(1, int(round(self.horizon * TRADING_DAYS))))
        if not self.horizon > 0:
            raise InvalidParameterError("horizon must be positive")
        if self.n_steps < 1:
            raise InvalidParameterError("n_steps must be >= 1")
        if self.n_paths < 2:
            raise InvalidParameterError("n_paths must be >= 2")
        if self.antithetic and self.n_paths % 2:
            raise InvalidParameterError("antithetic sampling needs an even path count")
        if self.workers < 1:
            raise InvalidParameterError("workers must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidParameterError("seed must be an unsigned 64-bit integer")

    @property
    def dt(self) -> float:
        return self.horizon / self.n_steps


@dataclass
class TerminalSample:
    """Terminal asset prices (n, n_assets) and FX rates (n, n_rates), row i = path i."""

    assets: np.ndarray
    fx: np.ndarray
    paths: Optional[dict] = None
    elapsed: float = 0.0
    fingerprint: Optional[str] = None
    bound_violations: int = 0
    horizon: float = 1.0
    n_steps: int = 0

    def __len__(self):
        return self.assets.shape[0]

    @property
    def case(self) -> Case:
        return Case.CASE1 if self.assets.shape[1] == 2 else Case.CASE2

    @property
    def s_usd(self):
        return self.assets[:, 0]

    @property
    def s_gbp(self):
        return self.assets[:, 1]

    @property
    def s_eur(self):
        return self.assets[:, 2] if self.assets.shape[1] > 2 else None

    @property
    def fx_gbp(self):
        return self.fx[:, 0]

    @property
    def fx_eur(self):
        return self.fx[:, 1] if self.fx.shape[1] > 1 else None


@dataclass
class PairedSample:
    """Original paths and their mirrored twins; row i of each belongs to pair i."""

    original: TerminalSample
    antithetic: TerminalSample
    elapsed: float = 0.0
    fingerprint: Optional[str] = None

    def __len__(self):
        return len(self.original)

    @property
    def bound_violations(self):
        return self.original.bound_violations + self.antithetic.bound_violations


def variant_label(model: ModelSpec, scheme) -> str:
    return f"{model.sv_variant}/{model.sc.variant}/{model.ser_variant}/{Scheme.parse(scheme)}"


def _initial_rho(sc, rho0):
    if sc.variant is ScModel.CONSTANT:
        return sc.rho_const
    lo, hi = sc.domain
    return min(max(rho0, lo), hi)


def _validate(model: ModelSpec, mkt: MarketSnapshot):
    if model.case is not mkt.case:
        raise ConfigMismatchError(f"model is {model.case} but market snapshot is {mkt.case}")
    for i, p in enumerate(model.ser):
        if p.r_d != mkt.r_d or p.r_f != mkt.r_f[i]:
            raise ConfigMismatchError(
                f"FX model {RATE_NAMES[i]} rates (r_f={p.r_f}, r_d={p.r_d}) differ from the market "
                f"snapshot (r_f={mkt.r_f[i]}, r_d={mkt.r_d})")


def _units(n: int):
    return [(a, min(a + UNIT_PATHS, n)) for a in range(0, n, UNIT_PATHS)]


def _simulate_unit(model: ModelSpec, mkt: MarketSnapshot, cfg: SimConfig,
                   start: int, stop: int, mirrored: bool):
    n = stop - start
    width = 2 * n if mirrored else n
    na, nr = mkt.case.n_assets, mkt.case.n_rates
    seed, dt = cfg.seed, cfg.dt
    step_fn = stepper(cfg.scheme)
    fp = StreamFingerprint() if cfg.fingerprint else None

    def normals(tag, j):
        z = standard_normals(seed, tag, j, start, stop)
        if fp is not None:
            fp.update(tag, j, z)
        return np.concatenate([z, -z]) if mirrored else z

    def jumps(tag, j, p):
        _, total = jump_draws(seed, tag, j, start, stop, dt, p)
        if fp is not None:
            fp.update(tag, j, total)
        return np.concatenate([total, total]) if mirrored else total

    sv_c = [sv_coefficients(p) for p in model.sv]
    sc_c = sc_coefficients(model.sc)
    sc_eur = model.sc_eur
    sc_eur_c = sc_coefficients(sc_eur) if sc_eur is not None else None
    ser_c = [ser_coefficients(p) for p in model.ser]
    stochastic_rho = model.sc.variant is not ScModel.CONSTANT
    rates = mkt.asset_rates

    v = [np.full(width, mkt.v0[a]) for a in range(na)]
    rho = np.full(width, _initial_rho(model.sc, mkt.rho0))
    rho_eur = None
    if na == 3:
        if sc_eur is not None:
            r0 = mkt.rho0_eur if mkt.rho0_eur is not None else mkt.rho0
            rho_eur = np.full(width, _initial_rho(sc_eur, r0))
        elif mkt.rho0_eur is not None:
            raise ConfigMismatchError("rho0_eur given without a separate EUR correlation model")
    fx = [np.full(width, mkt.fx0[r]) for r in range(nr)]
    s = [np.full(width, mkt.s0[a]) for a in range(na)]

    keep = max(0, min(cfg.retain_paths - start, n))
    trace = None
    if keep:
        trace = {}

        def record():
            for a in range(na):
                trace.setdefault(f"v_{ASSET_NAMES[a]}", []).append(v[a][:keep].copy())
            trace.setdefault("rho", []).append(rho[:keep].copy())
            if rho_eur is not None:
                trace.setdefault("rho_EUR", []).append(rho_eur[:keep].copy())
            for r in range(nr):
                trace.setdefault(f"fx_{RATE_NAMES[r]}", []).append(fx[r][:keep].copy())
            for a in range(na):
                trace.setdefault(f"S_{ASSET_NAMES[a]}", []).append(s[a][:keep].copy())
        record()

    violations = 0
    process = "?"
    j = 0
    try:
        for j in range(cfg.n_steps):
            t = j * dt
            v_new = []
            for a in range(na):
                process = f"v_{ASSET_NAMES[a]}"
                p = model.sv[a]
                dj = jumps(VOL_JUMPS[a], j, p.jump) if p.has_jumps else 0.0
                z = normals(VOL_NOISE[a], j)
                v_new.append(sv_c[a].clamp(step_fn(sv_c[a], StepInput(v[a], t, dt, z, dj))))

            process = "rho"
            rho_new, rho_eur_new = rho, rho_eur
            if stochastic_rho:
                z = normals(Tag.W_RHO, j)
                rho_new = sc_c.clamp(step_fn(sc_c, StepInput(rho, t, dt, z)))
                if sc_eur_c is not None:
                    rho_eur_new = sc_eur_c.clamp(step_fn(sc_eur_c, StepInput(rho_eur, t, dt, z)))

            fx_new = []
            for r in range(nr):
                process = f"fx_{RATE_NAMES[r]}"
                p = model.ser[r]
                dj = jumps(FX_JUMPS[r], j, p.jump) if p.has_jumps else 0.0
                z = normals(FX_NOISE[r], j)
                fx_new.append(ser_c[r].clamp(step_fn(ser_c[r], StepInput(fx[r], t, dt, z, dj))))

            z_gbp = normals(Tag.Z_GBP, j)
            shocks = [mix_correlated(z_gbp, normals(Tag.Z_USD, j), rho), z_gbp]
            if na == 3:
                shocks.append(mix_correlated(z_gbp, normals(Tag.Z_EUR, j),
                                             rho if rho_eur is None else rho_eur))
            s_new = []
            for a in range(na):
                process = f"S_{ASSET_NAMES[a]}"
                coeffs = asset_coefficients(rates[a], v[a])
                s_new.append(np.maximum(euler_step(coeffs, StepInput(s[a], t, dt, shocks[a])), 0.0))

            v, rho, rho_eur, fx, s = v_new, rho_new, rho_eur_new, fx_new, s_new

            if cfg.check_bounds:
                violations += sum(int(np.count_nonzero(~(x >= 0))) for x in v + fx + s)
                lo, hi = sc_c.domain
                violations += int(np.count_nonzero(~((rho >= lo) & (rho <= hi))))
                if rho_eur is not None:
                    lo, hi = sc_eur_c.domain
                    violations += int(np.count_nonzero(~((rho_eur >= lo) & (rho_eur <= hi))))
            if trace is not None:
                record()
    except NumericalBlowupError as exc:
        idx = exc.path if exc.path is not None else 0
        raise NumericalBlowupError(str(exc.args[0]), path=start + idx % n, step=j,
                                   process=process) from exc

    assets = np.column_stack(s)
    fx_out = np.column_stack(fx)
    if trace is not None:
        trace = {k: np.column_stack(vals) for k, vals in trace.items()}
    return assets, fx_out, trace, violations, (fp.hexdigest() if fp else None)


def _run_units(model, mkt, cfg, n_units_paths, mirrored):
    _validate(model, mkt)
    units = _units(n_units_paths)

    def work(unit):
        return _simulate_unit(model, mkt, cfg, unit[0], unit[1], mirrored)

    t0 = time.perf_counter()
    try:
        if cfg.workers == 1 or len(units) == 1:
            results = [work(u) for u in units]
        else:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                results = list(pool.map(work, units))
    except NumericalBlowupError as exc:
        exc.variant = variant_label(model, cfg.scheme)
        raise
    elapsed = time.perf_counter() - t0

    fp = None
    if cfg.fingerprint:
        agg = StreamFingerprint()
        for r in results:
            agg.merge(r[4])
        fp = agg.hexdigest()
    return units, results, elapsed, fp


def _merge_traces(traces):
    traces = [t for t in traces if t]
    if not traces:
        return None
    return {k: np.vstack([t[k] for t in traces]) for k in traces[0]}


def simulate(model: ModelSpec, mkt: MarketSnapshot, cfg: SimConfig) -> TerminalSample:
    """Simulate ``cfg.n_paths`` independent paths and return their terminal values."""
    if cfg.antithetic:
        raise ConfigMismatchError("cfg.antithetic is set; use simulate_antithetic")
    units, results, elapsed, fp = _run_units(model, mkt, cfg, cfg.n_paths, mirrored=False)
    return TerminalSample(
        assets=np.vstack([r[0] for r in results]),
        fx=np.vstack([r[1] for r in results]),
        paths=_merge_traces([r[2] for r in results]),
        elapsed=elapsed,
        fingerprint=fp,
        bound_violations=sum(r[3] for r in results),
        horizon=cfg.horizon,
        n_steps=cfg.n_steps,
    )


def simulate_antithetic(model: ModelSpec, mkt: MarketSnapshot, cfg: SimConfig) -> PairedSample:
    """Simulate ``n_paths / 2`` paths plus mirrored twins (Gaussian draws negated, jumps shared)."""
    if not cfg.antithetic:
        raise ConfigMismatchError("simulate_antithetic needs cfg.antithetic = True")
    n_pairs = cfg.n_paths // 2
    units, results, elapsed, fp = _run_units(model, mkt, cfg, n_pairs, mirrored=True)
    orig_a, twin_a, orig_f, twin_f, viol_o, viol_t = [], [], [], [], 0, 0
    for (a, b), r in zip(units, results):
        m = b - a
        orig_a.append(r[0][:m])
        twin_a.append(r[0][m:])
        orig_f.append(r[1][:m])
        twin_f.append(r[1][m:])
        viol_o += r[3]
    paths = _merge_traces([r[2] for r in results])
    common = dict(horizon=cfg.horizon, n_steps=cfg.n_steps, elapsed=elapsed, fingerprint=fp)
    original = TerminalSample(np.vstack(orig_a), np.vstack(orig_f), paths=paths,
                              bound_violations=viol_o, **common)
    twin = TerminalSample(np.vstack(twin_a), np.vstack(twin_f), bound_violations=viol_t, **common)
    return PairedSample(original, twin, elapsed=elapsed, fingerprint=fp)


def write_path_dump(sample: TerminalSample, path, dt: Optional[float] = None) -> int:
    """Write retained paths as CSV rows (path, step, t, one column per process)."""
    if not sample.paths:
        raise ValueError("sample has no retained paths; set SimConfig.retain_paths")
    names = list(sample.paths)
    n_keep, n_cols = sample.paths[names[0]].shape
    dt = dt if dt is not None else sample.horizon / max(sample.n_steps, 1)
    rows = 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["path", "step", "t"] + names)
        for i in range(n_keep):
            for j in range(n_cols):
                w.writerow([i, j, repr(j * dt)] + [repr(float(sample.paths[k][i, j])) for k in names])
                rows += 1
    return rows
