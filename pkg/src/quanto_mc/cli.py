"""Command line entry point: ``quanto-mc price|sweep|greeks|calibrate --config FILE``.

Configuration is an INI file. Every value has a default that is resolved
explicitly and written to the log and to ``manifest.json``. Command-line
flags override file values.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure of a non-sweep command.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import datetime as _dt
import io
import json
import logging
import platform
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .calibration import (CASE_INSTRUMENTS, Calibration, CalibrationWindow, ModelLibrary, Rates,
                          build_market_snapshot, default_library, load_series_set)
from .engine import MarketSnapshot, SimConfig
from .errors import (ConfigError, ConfigMismatchError, DataError, DomainSaturationError,
                     InvalidParameterError, NumericalBlowupError)
from .greeks import GREEK_CSV_COLUMNS, BumpMode, CorrBumpSpec, Pair, correlation_greeks
from .harness import (Sweep, merge_benchmark, run_sweep, write_sweep_csv, write_sweep_markdown,
                      write_timings_csv)
from .models import (Case, JumpParams, ScModel, ScParams, SerModel, SerParams, SvModel, SvParams,
                     parse_tag)
from .pricing import PRICE_CSV_COLUMNS, Z_STAR, price_row, run_and_price
from .schemes import Scheme

log = logging.getLogger("quanto_mc")

COMMANDS = ("price", "sweep", "greeks", "calibrate")
EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4
SWEEP_CHOICES = ("StochasticCorr", "ConstantCorr", "both")

_SECTIONS = {
    "run": {"case", "as_of", "out"},
    "data": {"sp500", "ftse100", "stoxx600", "gbpusd", "eurusd"},
    "market": {"s0", "fx0", "v0", "rho0", "rho0_eur"},
    "rates": {"r_d", "r_f1", "r_f2"},
    "strikes": {"k1", "k2", "k3"},
    "model": {"sv", "sc", "ser"},
    "sim": {"paths", "horizon", "steps", "seed", "scheme", "antithetic", "workers"},
    "calibration": {"lookback", "window"},
    "greeks": {"h", "mode", "pair", "auto_widen"},
    "sweep": {"sweep", "variant_workers"},
}
_PREFIXES = {"sv": SvModel, "sc": ScModel, "sc_eur": ScModel, "ser": SerModel}
_JUMP_KEYS = ("lam", "mu_j", "sigma_j")
_PARAM_TYPES = {"sv": SvParams, "sc": ScParams, "sc_eur": ScParams, "ser": SerParams}


def _override_keys(prefix: str) -> set:
    names = {f.name for f in dataclasses.fields(_PARAM_TYPES[prefix])} - {"variant", "jump", "r_f", "r_d"}
    if prefix in ("sv", "ser"):
        names |= set(_JUMP_KEYS)
    return names


@dataclass(frozen=True)
class RunConfig:
    command: str
    case: Case
    as_of: Optional[_dt.date]
    data: dict
    market: dict
    rates: Rates
    strikes: Optional[tuple]
    sv: SvModel
    sc: ScModel
    ser: SerModel
    sim: SimConfig
    window: Optional[CalibrationWindow]
    lookback: int
    rolling_window: int
    bump: CorrBumpSpec
    sweep: str
    variant_workers: int
    out: Path
    overrides: dict = field(default_factory=dict)
    source: Optional[str] = None

    def echo(self) -> dict:
        """JSON-ready view of every resolved setting."""
        sim = dataclasses.asdict(self.sim)
        sim["scheme"] = str(self.sim.scheme)
        return {
            "command": self.command, "case": str(self.case),
            "as_of": self.as_of.isoformat() if self.as_of else None,
            "data": {k: str(v) for k, v in self.data.items()},
            "market": self.market,
            "rates": {"r_d": self.rates.r_d, "r_f": list(self.rates.r_f)},
            "strikes": list(self.strikes) if self.strikes else "atm",
            "model": {"sv": str(self.sv), "sc": str(self.sc), "ser": str(self.ser)},
            "sim": sim, "z_star": Z_STAR,
            "calibration": {"lookback": self.lookback, "window": self.rolling_window},
            "greeks": {"h": self.bump.h, "mode": str(self.bump.mode), "pair": str(self.bump.pair),
                       "auto_widen": self.bump.auto_widen},
            "sweep": {"sweep": self.sweep, "variant_workers": self.variant_workers},
            "out": str(self.out), "overrides": self.overrides,
        }


def _get(cp, section, key, conv, default, name=None):
    name = name or f"{section}.{key}"
    if not cp.has_option(section, key):
        return default
    raw = cp.get(section, key).strip()
    try:
        return conv(raw)
    except (ValueError, InvalidParameterError) as exc:
        raise ConfigError(name, f"{raw!r}: {exc}") from None


def _bool(raw: str) -> bool:
    low = raw.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def _floats(raw: str) -> tuple:
    return tuple(float(x) for x in raw.split(",") if x.strip())


def _seed(raw) -> int:
    value = int(raw, 0) if isinstance(raw, str) else int(raw)
    if not 0 <= value < 2 ** 64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return value


def _check_sections(cp):
    for sec in cp.sections():
        if sec in _SECTIONS:
            unknown = set(cp.options(sec)) - _SECTIONS[sec]
            if unknown:
                raise ConfigError(f"{sec}.{sorted(unknown)[0]}", f"unknown key; valid: {', '.join(sorted(_SECTIONS[sec]))}")
            continue
        prefix, _, tag = sec.partition(".")
        if prefix not in _PREFIXES or not tag:
            raise ConfigError(sec, "unknown section")
        try:
            parse_tag(_PREFIXES[prefix], tag)
        except InvalidParameterError as exc:
            raise ConfigError(sec, str(exc)) from None
        valid = _override_keys(prefix)
        unknown = set(cp.options(sec)) - valid
        if unknown:
            raise ConfigError(f"{sec}.{sorted(unknown)[0]}", f"unknown key; valid: {', '.join(sorted(valid))}")


def _overrides(cp) -> dict:
    out = {}
    for sec in cp.sections():
        prefix, _, tag = sec.partition(".")
        if prefix in _PREFIXES and tag:
            variant = parse_tag(_PREFIXES[prefix], tag)
            values = {}
            for key in cp.options(sec):
                raw = cp.get(sec, key).strip()
                if key == "weibull_sqrt_diffusion":
                    values[key] = _get(cp, sec, key, _bool, False)
                else:
                    values[key] = _get(cp, sec, key, _floats, ())
            out[(prefix, variant.value)] = values
    return out


def parse_config(path=None, text: Optional[str] = None, command: str = "price", flags: Optional[dict] = None) -> RunConfig:
    """Read and validate a configuration; ``flags`` holds command-line overrides."""
    flags = {k: v for k, v in (flags or {}).items() if v is not None}
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str.lower
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError("--config", f"file not found: {path}")
        try:
            cp.read_string(path.read_text(), source=str(path))
        except configparser.Error as exc:
            raise ConfigError("--config", str(exc)) from None
        base = path.parent
    else:
        try:
            cp.read_string(text or "")
        except configparser.Error as exc:
            raise ConfigError("config", str(exc)) from None
        base = Path.cwd()
    _check_sections(cp)
    if command not in COMMANDS:
        raise ConfigError("command", f"unknown command {command!r}; valid: {', '.join(COMMANDS)}")

    case = _get(cp, "run", "case", Case.parse, Case.CASE1)
    as_of = _get(cp, "run", "as_of", _dt.date.fromisoformat, None)
    out = Path(flags.get("out") or _get(cp, "run", "out", str, "out"))

    data = {}
    if cp.has_section("data"):
        for key in cp.options("data"):
            p = Path(cp.get("data", key).strip())
            p = p if p.is_absolute() else (base / p)
            if not p.is_file():
                raise ConfigError(f"data.{key}", f"file not found: {p}")
            data[key.upper()] = p

    market = {}
    if cp.has_section("market"):
        for key in ("s0", "fx0", "v0"):
            if cp.has_option("market", key):
                market[key] = list(_get(cp, "market", key, _floats, ()))
        for key in ("rho0", "rho0_eur"):
            if cp.has_option("market", key):
                market[key] = _get(cp, "market", key, float, None)
    full_market = all(k in market for k in ("s0", "fx0", "v0", "rho0"))

    needed = CASE_INSTRUMENTS[case]
    if data:
        missing = [n for n in needed if n not in data]
        if missing:
            raise ConfigError("data", f"{case} needs {', '.join(n.lower() for n in missing)}")
        extra = [n for n in data if n not in needed]
        if extra:
            raise ConfigError("data", f"{case} does not use {', '.join(n.lower() for n in extra)}")
        if as_of is None:
            raise ConfigError("run.as_of", "required when [data] is given")
    elif not full_market:
        raise ConfigError("data", "give either [data] CSV paths or a complete [market] section")
    if command == "calibrate" and not data:
        raise ConfigError("data", "calibrate needs [data] CSV paths")

    rates = Rates(_get(cp, "rates", "r_d", float, 0.0),
                  (_get(cp, "rates", "r_f1", float, 0.0), _get(cp, "rates", "r_f2", float, 0.0)))
    strikes = None
    if cp.has_section("strikes"):
        keys = ("k1", "k2", "k3")[: case.n_assets]
        given = [k for k in keys if cp.has_option("strikes", k)]
        if given and len(given) != len(keys):
            raise ConfigError("strikes", f"give all of {', '.join(keys)} or none")
        if given:
            strikes = tuple(_get(cp, "strikes", k, float, None) for k in keys)

    sv = _get(cp, "model", "sv", lambda r: parse_tag(SvModel, r), SvModel.HESTON, "model.sv")
    sc = _get(cp, "model", "sc", lambda r: parse_tag(ScModel, r), ScModel.WRIGHT_FISHER, "model.sc")
    ser = _get(cp, "model", "ser", lambda r: parse_tag(SerModel, r), SerModel.GBM, "model.ser")

    horizon = _get(cp, "sim", "horizon", float, 1.0)
    sim_kwargs = dict(
        n_paths=int(flags.get("paths") or _get(cp, "sim", "paths", int, 500_000)),
        horizon=horizon,
        n_steps=flags.get("steps") or _get(cp, "sim", "steps", int, None),
        seed=_seed(flags["seed"]) if "seed" in flags else _get(cp, "sim", "seed", _seed, 0),
        scheme=_get(cp, "sim", "scheme", Scheme.parse, Scheme.EULER, "sim.scheme"),
        antithetic=_get(cp, "sim", "antithetic", _bool, False),
        workers=int(flags.get("workers") or _get(cp, "sim", "workers", int, 1)),
        check_bounds=True,
    )
    try:
        sim = SimConfig(**sim_kwargs)
    except InvalidParameterError as exc:
        msg = str(exc)
        fld = ("sim.paths" if "path" in msg else "sim.workers" if "workers" in msg else
               "sim.seed" if "seed" in msg else "sim.steps" if "n_steps" in msg else "sim.horizon")
        raise ConfigError(fld, msg) from None

    lookback = _get(cp, "calibration", "lookback", int, 252)
    rolling = _get(cp, "calibration", "window", int, 30)
    window = None
    if as_of is not None:
        try:
            window = CalibrationWindow(as_of, lookback, rolling)
        except InvalidParameterError as exc:
            raise ConfigError("calibration", str(exc)) from None

    try:
        bump = CorrBumpSpec(
            h=_get(cp, "greeks", "h", float, 0.01),
            mode=_get(cp, "greeks", "mode", BumpMode.parse, BumpMode.PARALLEL_SHIFT),
            pair=_get(cp, "greeks", "pair", Pair.parse, Pair.GBP_USD),
            auto_widen=_get(cp, "greeks", "auto_widen", _bool, True),
        )
    except InvalidParameterError as exc:
        raise ConfigError("greeks", str(exc)) from None
    if bump.pair is Pair.EUR_USD and case is Case.CASE1:
        raise ConfigError("greeks.pair", "EUR_USD needs case2")

    sweep = flags.get("sweep") or _get(cp, "sweep", "sweep", str, "both")
    if sweep not in SWEEP_CHOICES:
        raise ConfigError("sweep.sweep", f"valid: {', '.join(SWEEP_CHOICES)}")
    variant_workers = _get(cp, "sweep", "variant_workers", int, 1)
    if variant_workers < 1:
        raise ConfigError("sweep.variant_workers", "must be >= 1")

    return RunConfig(command, case, as_of, data, market, rates, strikes, sv, sc, ser, sim, window,
                     lookback, rolling, bump, sweep, variant_workers, out, _overrides(cp),
                     str(path) if path else None)


def _apply(params, values: dict, leg: int):
    kwargs, jump = {}, {}
    for key, vals in values.items():
        if isinstance(vals, bool):
            kwargs[key] = vals
            continue
        v = vals[leg] if len(vals) > leg else vals[-1]
        (jump if key in _JUMP_KEYS else kwargs)[key] = v
    if jump:
        base = params.jump or JumpParams(0.0)
        kwargs["jump"] = replace(base, **jump)
    try:
        return replace(params, **kwargs)
    except TypeError as exc:
        raise ConfigError(type(params).__name__, str(exc)) from None


def apply_overrides(library: ModelLibrary, overrides: dict) -> ModelLibrary:
    sv = dict(library.sv)
    sc = dict(library.sc)
    ser = dict(library.ser)
    sc_eur = dict(library.sc_eur) if library.sc_eur else None
    for (prefix, tag), values in overrides.items():
        try:
            if prefix == "sv":
                k = SvModel(tag)
                sv[k] = tuple(_apply(p, values, i) for i, p in enumerate(sv[k]))
            elif prefix == "ser":
                k = SerModel(tag)
                ser[k] = tuple(_apply(p, values, i) for i, p in enumerate(ser[k]))
            elif prefix == "sc":
                k = ScModel(tag)
                sc[k] = _apply(sc[k], values, 0)
            elif sc_eur is not None:
                k = ScModel(tag)
                sc_eur[k] = _apply(sc_eur[k], values, 0)
        except InvalidParameterError as exc:
            raise ConfigError(f"{prefix}.{tag}", str(exc)) from None
    return ModelLibrary(library.case, sv, sc, ser, sc_eur)


def resolve_inputs(cfg: RunConfig) -> tuple[MarketSnapshot, ModelLibrary, Optional[Calibration]]:
    """Calibrate from data (if any), then apply [market] and per-variant overrides."""
    calib = None
    if cfg.data:
        series = load_series_set(cfg.data)
        calib = build_market_snapshot(series, cfg.window, cfg.case, cfg.rates, cfg.strikes)
        snap, library = calib.snapshot, calib.library
    else:
        snap, library = None, default_library(cfg.case, cfg.rates, tuple(cfg.market["fx0"]))
    m = cfg.market
    fields = {}
    try:
        if snap is None:
            s0, fx0 = tuple(m["s0"]), tuple(m["fx0"])
            atm = (s0[0],) + tuple(s * x for s, x in zip(s0[1:], fx0))
            snap = MarketSnapshot(cfg.case, s0, fx0, tuple(m["v0"]), m["rho0"], cfg.rates.r_d,
                                  tuple(cfg.rates.r_f[: cfg.case.n_rates]),
                                  cfg.strikes or atm, rho0_eur=m.get("rho0_eur"))
        else:
            for key in ("s0", "fx0", "v0"):
                if key in m:
                    fields[key] = tuple(m[key])
            for key in ("rho0", "rho0_eur"):
                if key in m:
                    fields[key] = m[key]
            if fields:
                snap = replace(snap, **fields)
    except InvalidParameterError as exc:
        raise ConfigError("market", str(exc)) from None
    return snap, apply_overrides(library, cfg.overrides), calib


def _write_csv(path: Path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def _fmt_list(values) -> str:
    return ", ".join(repr(float(v)) for v in values)


def calibration_ini(snap: MarketSnapshot, library: ModelLibrary, cfg: RunConfig) -> str:
    """A self-contained config that reproduces the calibrated inputs without the CSVs."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str.lower
    cp["run"] = {"case": str(snap.case)}
    if cfg.as_of:
        cp["run"]["as_of"] = cfg.as_of.isoformat()
    cp["market"] = {"s0": _fmt_list(snap.s0), "fx0": _fmt_list(snap.fx0), "v0": _fmt_list(snap.v0),
                    "rho0": repr(snap.rho0)}
    if snap.rho0_eur is not None:
        cp["market"]["rho0_eur"] = repr(snap.rho0_eur)
    r_f = list(snap.r_f) + [0.0] * (2 - len(snap.r_f))
    cp["rates"] = {"r_d": repr(snap.r_d), "r_f1": repr(r_f[0]), "r_f2": repr(r_f[1])}
    cp["strikes"] = {f"k{i + 1}": repr(k) for i, k in enumerate(snap.strikes)}

    def section(params_list):
        first = params_list[0]
        out = {}
        for f in dataclasses.fields(first):
            if f.name in ("variant", "r_f", "r_d"):
                continue
            vals = [getattr(p, f.name) for p in params_list]
            if f.name == "jump":
                if vals[0] is not None:
                    for jk in _JUMP_KEYS:
                        out[jk] = _fmt_list(getattr(j, jk) for j in vals)
                continue
            if isinstance(vals[0], bool):
                out[f.name] = "true" if vals[0] else "false"
            else:
                out[f.name] = _fmt_list(vals)
        return out

    for k, params in library.sv.items():
        cp[f"sv.{k.value}"] = section(list(params))
    for k, params in library.sc.items():
        cp[f"sc.{k.value}"] = section([params])
    if library.sc_eur:
        for k, params in library.sc_eur.items():
            cp[f"sc_eur.{k.value}"] = section([params])
    for k, params in library.ser.items():
        cp[f"ser.{k.value}"] = section(list(params))
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def _manifest(cfg: RunConfig, outputs, elapsed, extra=None) -> dict:
    return {
        "command": cfg.command,
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "seed": cfg.sim.seed,
        "config_file": cfg.source,
        "config": cfg.echo(),
        "outputs": sorted(str(p.name) for p in outputs),
        "elapsed_s": elapsed,
        **(extra or {}),
    }


def run(cfg: RunConfig, verbose: bool = False) -> int:
    """Execute one command; returns the exit status."""
    t0 = time.perf_counter()
    for key, value in cfg.echo().items():
        log.info("resolved %s = %s", key, value)
    snap, library, calib = resolve_inputs(cfg)
    cfg.out.mkdir(parents=True, exist_ok=True)
    outputs, extra = [], {}

    if cfg.command == "calibrate":
        path = cfg.out / "calibration.ini"
        path.write_text(calibration_ini(snap, library, cfg))
        outputs.append(path)
        if calib is not None:
            extra["calibration"] = {k: v for k, v in calib.diagnostics.items()}
            extra["calibration"]["last_date"] = calib.last_date.isoformat()
        print(f"wrote {path}")

    elif cfg.command == "price":
        model = library.spec(cfg.sv, cfg.sc, cfg.ser)
        report = run_and_price(model, snap, cfg.sim)
        row = price_row(model, cfg.sim, report)
        path = cfg.out / "price.csv"
        _write_csv(path, PRICE_CSV_COLUMNS, [row])
        outputs.append(path)
        extra["elapsed_simulation_s"] = report.elapsed
        print(",".join(PRICE_CSV_COLUMNS))
        print(",".join(row[c] for c in PRICE_CSV_COLUMNS))

    elif cfg.command == "greeks":
        model = library.spec(cfg.sv, cfg.sc, cfg.ser)
        modes = [cfg.bump.mode]
        if verbose:
            modes += [m for m in BumpMode if m is not cfg.bump.mode]
        rows = []
        label = f"{model.sv_variant}/{model.sc.variant}/{model.ser_variant}/{cfg.sim.scheme}"
        for mode in modes:
            rep = correlation_greeks(model, snap, cfg.sim, replace(cfg.bump, mode=mode))
            rows.append(rep.row(label))
        path = cfg.out / "greeks.csv"
        _write_csv(path, GREEK_CSV_COLUMNS, rows)
        outputs.append(path)
        print(",".join(GREEK_CSV_COLUMNS))
        for row in rows:
            print(",".join(row[c] for c in GREEK_CSV_COLUMNS))

    else:
        tables = {}
        sweeps = [Sweep.STOCHASTIC, Sweep.CONSTANT] if cfg.sweep == "both" else [Sweep.parse(cfg.sweep)]
        for sw in sweeps:
            tables[sw] = run_sweep(library, snap, cfg.sim, sw, variant_workers=cfg.variant_workers)
        benchmark = None
        if len(tables) == 2 and tables[Sweep.STOCHASTIC].successes and tables[Sweep.CONSTANT].successes:
            benchmark = merge_benchmark(tables[Sweep.STOCHASTIC], tables[Sweep.CONSTANT])
            extra["benchmark"] = benchmark.summary()
            print(benchmark.summary())
        for sw, table in tables.items():
            suffix = "" if sw is Sweep.STOCHASTIC else "_const"
            outputs.append(write_sweep_csv(table, cfg.out / f"sweep{suffix}.csv"))
            outputs.append(write_timings_csv(table, cfg.out / f"timings{suffix}.csv"))
            outputs.append(write_sweep_markdown(table, cfg.out / f"sweep{suffix}.md",
                                                benchmark if sw is Sweep.STOCHASTIC else None))
            n_ok = len(table.successes)
            extra[f"{sw}_successes"] = n_ok
            extra[f"{sw}_bound_violations"] = sum(r.violations for r in table.rows)
            print(f"{sw}: {len(table)} variants, {n_ok} succeeded, target {table.target}")

    elapsed = time.perf_counter() - t0
    manifest = cfg.out / "manifest.json"
    manifest.write_text(json.dumps(_manifest(cfg, outputs + [manifest], elapsed, extra), indent=2, default=str) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quanto-mc", description="Monte Carlo pricing of quanto best-of options.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="INI configuration file")
    p.add_argument("--seed", type=str, help="unsigned 64-bit seed (overrides [sim] seed)")
    p.add_argument("--paths", type=int, help="number of Monte Carlo paths")
    p.add_argument("--steps", type=int, help="number of time steps")
    p.add_argument("--workers", type=int, help="worker threads")
    p.add_argument("--out", help="output directory")
    p.add_argument("--sweep", choices=SWEEP_CHOICES, help="which sweep(s) to run")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        flags = {"seed": args.seed, "paths": args.paths, "steps": args.steps,
                 "workers": args.workers, "out": args.out, "sweep": args.sweep}
        if args.seed is not None:
            try:
                flags["seed"] = _seed(args.seed)
            except ValueError as exc:
                raise ConfigError("--seed", str(exc)) from None
        cfg = parse_config(args.config, command=args.command, flags=flags)
        return run(cfg, verbose=args.verbose)
    except (ConfigError, ConfigMismatchError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericalBlowupError, DomainSaturationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InvalidParameterError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
