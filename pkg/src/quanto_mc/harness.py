"""Variant sweeps, consensus target, percentage-error ranking and the constant-correlation benchmark."""

from __future__ import annotations

import csv
import itertools
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Callable, Optional, Sequence

from .engine import MarketSnapshot, SimConfig, simulate, simulate_antithetic
from .errors import EmptySampleError, QuantoMCError
from .models import STOCHASTIC_SC, ScModel, SerModel, SvModel
from .pricing import PriceReport, price, price_antithetic
from .schemes import Scheme

log = logging.getLogger(__name__)

N_BEST = 40
N_TOP = 30


class Sweep(str, Enum):
    STOCHASTIC = "StochasticCorr"
    CONSTANT = "ConstantCorr"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for member in cls:
            if key in (member.value.lower(), member.name.lower()):
                return member
        raise ValueError(f"unknown sweep {value!r}; valid: StochasticCorr, ConstantCorr")


@dataclass(frozen=True, order=True)
class VariantId:
    sv: str
    sc: str
    ser: str
    scheme: str

    @property
    def label(self) -> str:
        return f"{self.sv}/{self.sc}/{self.ser}/{self.scheme}"

    def __str__(self):
        return self.label


def enumerate_variants(sweep=Sweep.STOCHASTIC) -> list[VariantId]:
    sweep = Sweep.parse(sweep)
    scs = STOCHASTIC_SC if sweep is Sweep.STOCHASTIC else (ScModel.CONSTANT,)
    return [VariantId(sv.value, sc.value, ser.value, sch.value)
            for sv, sc, ser, sch in itertools.product(SvModel, scs, SerModel, Scheme)]


@dataclass
class VariantRow:
    vid: VariantId
    report: Optional[PriceReport]
    elapsed: float
    status: str = "ok"
    violations: int = 0
    pct_error: Optional[float] = None
    rank_se: Optional[int] = None
    rank_pe: Optional[int] = None
    top30: bool = False

    @property
    def ok(self) -> bool:
        return self.status == "ok" and self.report is not None


@dataclass
class VariantTable:
    sweep: Sweep
    rows: list
    target: Optional[float] = None
    degraded: bool = False
    n_best_used: int = 0

    def __len__(self):
        return len(self.rows)

    @property
    def successes(self) -> list:
        return [r for r in self.rows if r.ok]

    def row(self, vid: VariantId) -> VariantRow:
        return next(r for r in self.rows if r.vid == vid)

    def ranked(self) -> list:
        ok = sorted(self.successes, key=lambda r: r.rank_pe)
        return ok + sorted((r for r in self.rows if not r.ok), key=lambda r: r.vid)


def record_timing(fn: Callable, *args, **kwargs):
    """Run ``fn`` and return (result, elapsed wall-clock seconds)."""
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, max(time.perf_counter() - t0, 0.0)


def _simulate_and_price(model, mkt, vcfg):
    if vcfg.antithetic:
        paired = simulate_antithetic(model, mkt, vcfg)
        return price_antithetic(paired, mkt, vcfg), paired.bound_violations
    sample = simulate(model, mkt, vcfg)
    return price(sample, mkt, vcfg), sample.bound_violations


def _run_variant(library, mkt: MarketSnapshot, cfg: SimConfig, vid: VariantId) -> VariantRow:
    t0 = time.perf_counter()
    try:
        model = library.spec(vid.sv, vid.sc, vid.ser)
        vcfg = replace(cfg, scheme=Scheme(vid.scheme))
        (report, violations), elapsed = record_timing(_simulate_and_price, model, mkt, vcfg)
    except (QuantoMCError, FloatingPointError, ValueError) as exc:
        log.warning("variant %s failed: %s", vid, exc)
        return VariantRow(vid, None, time.perf_counter() - t0, status=f"failed:{type(exc).__name__}")
    if not (math.isfinite(report.price) and math.isfinite(report.std_error)):
        return VariantRow(vid, None, elapsed, status="failed:NonFinitePrice")
    return VariantRow(vid, report, elapsed, violations=violations)


def compute_target(rows: Sequence[VariantRow], n_best: int = N_BEST) -> tuple[float, bool, int]:
    """Mean price of the ``n_best`` lowest-stderr successes (ties by VariantId)."""
    ok = sorted((r for r in rows if r.ok), key=lambda r: (r.report.std_error, r.vid))
    if not ok:
        raise EmptySampleError("no successful variants to form a target")
    best = ok[:n_best]
    return math.fsum(r.report.price for r in best) / len(best), len(ok) < n_best, len(best)


def pct_error(price: float, target: float) -> float:
    return 100.0 * abs(price - target) / abs(target)


def score_table(table: VariantTable, target: Optional[float] = None) -> VariantTable:
    """Fill target, pct_error, both ranks and the top-30 flags in place."""
    if target is None:
        table.target, table.degraded, table.n_best_used = compute_target(table.rows)
    else:
        table.target = target
    ok = table.successes
    for r in table.rows:
        r.pct_error = r.rank_se = r.rank_pe = None
        r.top30 = False
    for i, r in enumerate(sorted(ok, key=lambda r: (r.report.std_error, r.vid)), 1):
        r.rank_se = i
    for r in ok:
        r.pct_error = pct_error(r.report.price, table.target)
    for i, r in enumerate(sorted(ok, key=lambda r: (r.pct_error, r.vid)), 1):
        r.rank_pe = i
        r.top30 = i <= N_TOP
    return table


def run_sweep(library, mkt: MarketSnapshot, cfg: SimConfig, sweep=Sweep.STOCHASTIC,
              variant_workers: int = 1, variants: Optional[Sequence[VariantId]] = None) -> VariantTable:
    """Price every variant with the same seed and path budget, then score the table.

    Per-variant failures are recorded in ``status`` and excluded from the target.
    """
    sweep = Sweep.parse(sweep)
    vids = list(variants) if variants is not None else enumerate_variants(sweep)
    if variant_workers > 1:
        with ThreadPoolExecutor(max_workers=variant_workers) as pool:
            rows = list(pool.map(lambda v: _run_variant(library, mkt, cfg, v), vids))
    else:
        rows = [_run_variant(library, mkt, cfg, v) for v in vids]
    table = VariantTable(sweep, rows)
    if table.successes:
        score_table(table)
    return table


@dataclass
class BenchmarkReport:
    target: float
    merged: list
    best_constant: Optional[VariantRow]
    placement_overall: Optional[int]
    placement_top30: Optional[int]
    n_stochastic: int
    n_constant: int

    def summary(self) -> str:
        if self.best_constant is None:
            return "no successful constant-correlation variant"
        return (f"best constant-correlation model {self.best_constant.vid} "
                f"(pct_error {self.best_constant.pct_error:.4f}%) places {self.placement_overall} overall "
                f"and {self.placement_top30} against the top {N_TOP} stochastic-correlation variants")


def merge_benchmark(sc_table: VariantTable, const_table: VariantTable) -> BenchmarkReport:
    """Re-score constant rows against the stochastic target and place them in its ordering."""
    if not sc_table.successes or not const_table.successes:
        raise EmptySampleError("both tables need at least one successful variant")
    if sc_table.target is None:
        score_table(sc_table)
    score_table(const_table, target=sc_table.target)
    sc_ok = sc_table.successes
    const_ok = const_table.successes
    merged = sorted([("SC", r) for r in sc_ok] + [("CONST", r) for r in const_ok],
                    key=lambda x: (x[1].pct_error, x[0] != "SC", x[1].vid))
    best = min(const_ok, key=lambda r: (r.pct_error, r.vid))
    overall = 1 + sum(1 for r in sc_ok if r.pct_error < best.pct_error)
    top = [r for r in sc_ok if r.top30]
    among_top = 1 + sum(1 for r in top if r.pct_error < best.pct_error)
    return BenchmarkReport(sc_table.target, merged, best, overall, among_top,
                           len(sc_table.rows), len(const_table.rows))


SWEEP_CSV_COLUMNS = ("sv", "sc", "ser", "scheme", "price", "stderr", "ci_low", "ci_high",
                     "pct_error", "rank_se", "rank_pe", "top30", "status")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def sweep_rows(table: VariantTable) -> list[dict]:
    out = []
    for r in sorted(table.rows, key=lambda r: r.vid):
        rep = r.report
        out.append({
            "sv": r.vid.sv, "sc": r.vid.sc, "ser": r.vid.ser, "scheme": r.vid.scheme,
            "price": _fmt(rep.price if rep else None),
            "stderr": _fmt(rep.std_error if rep else None),
            "ci_low": _fmt(rep.ci_low if rep else None),
            "ci_high": _fmt(rep.ci_high if rep else None),
            "pct_error": _fmt(r.pct_error), "rank_se": _fmt(r.rank_se), "rank_pe": _fmt(r.rank_pe),
            "top30": _fmt(r.top30), "status": r.status,
        })
    return out


def write_sweep_csv(table: VariantTable, path) -> Path:
    """One row per variant in VariantId order; wall-clock timings live in timings.csv."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SWEEP_CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(sweep_rows(table))
    return path


def write_timings_csv(table: VariantTable, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sv", "sc", "ser", "scheme", "elapsed_s", "status"])
        for r in sorted(table.rows, key=lambda r: r.vid):
            w.writerow([r.vid.sv, r.vid.sc, r.vid.ser, r.vid.scheme, f"{r.elapsed:.6f}", r.status])
    return path


def render_markdown(table: VariantTable, benchmark: Optional[BenchmarkReport] = None,
                    timings: bool = True) -> str:
    lines = [f"# {table.sweep} sweep", ""]
    if table.target is not None:
        note = " (degraded: fewer than 40 successes)" if table.degraded else ""
        lines += [f"Target price: {table.target:.6f} from the {table.n_best_used} lowest-stderr variants{note}.",
                  f"Top {N_TOP} rows by percentage error are in bold.", ""]
    head = "| rank | SV | SC | SER | scheme | price | stderr | % error |"
    sep = "|---:|---|---|---|---|---:|---:|---:|"
    if timings:
        head += " time (s) |"
        sep += "---:|"
    lines += [head, sep]
    for r in table.ranked():
        if r.ok:
            cells = [str(r.rank_pe), r.vid.sv, r.vid.sc, r.vid.ser, r.vid.scheme,
                     f"{r.report.price:.4f}", f"{r.report.std_error:.4f}", f"{r.pct_error:.4f}"]
        else:
            cells = ["-", r.vid.sv, r.vid.sc, r.vid.ser, r.vid.scheme, r.status, "", ""]
        if timings:
            cells.append(f"{r.elapsed:.3f}")
        if r.top30:
            cells = [f"**{c}**" for c in cells]
        lines.append("| " + " | ".join(cells) + " |")
    if benchmark is not None:
        lines += ["", "## Constant-correlation benchmark", "", benchmark.summary(), ""]
    return "\n".join(lines) + "\n"


def write_sweep_markdown(table: VariantTable, path, benchmark: Optional[BenchmarkReport] = None) -> Path:
    path = Path(path)
    path.write_text(render_markdown(table, benchmark))
    return path
