"""Generate the synthetic daily fixtures under data/fixtures (deterministic)."""

import csv
import datetime as dt
import math
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "data" / "fixtures"
SEED = 20200101


def business_days(start, end):
    d = start
    while d <= end:
        if d.weekday() < 5:
            yield d
        d += dt.timedelta(days=1)


def main():
    dates = list(business_days(dt.date(2020, 1, 1), dt.date(2023, 12, 29)))
    n = len(dates)
    rng = np.random.default_rng(SEED)
    h = 1.0 / 252

    # slowly varying correlation and variances so rolling statistics have structure
    rho = np.empty(n)
    rho[0] = 0.55
    for i in range(1, n):
        rho[i] = np.clip(rho[i - 1] + 2.0 * (0.55 - rho[i - 1]) * h + 0.25 * math.sqrt(h) * rng.standard_normal(), 0.05, 0.95)
    var = np.empty((3, n))
    var[:, 0] = (0.04, 0.03, 0.035)
    for i in range(1, n):
        v = var[:, i - 1]
        var[:, i] = np.maximum(v + 3.0 * (var[:, 0] - v) * h + 0.25 * np.sqrt(v * h) * rng.standard_normal(3), 1e-3)

    z = rng.standard_normal((4, n))
    base = z[1]
    usd = rho * base + np.sqrt(1 - rho ** 2) * z[0]
    eur = 0.7 * base + math.sqrt(1 - 0.49) * z[2]
    shocks = np.vstack([usd, base, eur])
    mu = np.array([0.07, 0.04, 0.05])
    logret = (mu[:, None] - 0.5 * var) * h + np.sqrt(var * h) * shocks
    logret[:, 0] = 0.0
    levels = np.array([3230.0, 7604.0, 418.0])[:, None] * np.exp(np.cumsum(logret, axis=1))

    fx = np.empty((2, n))
    fx[:, 0] = (1.32, 1.12)
    mean_fx = np.array([1.27, 1.10])
    fx_noise = rng.standard_normal((2, n))
    for i in range(1, n):
        f = fx[:, i - 1]
        fx[:, i] = f + 1.5 * (mean_fx - f) * h + 0.08 * f * math.sqrt(h) * fx_noise[:, i]

    OUT.mkdir(parents=True, exist_ok=True)
    series = {"sp500": levels[0], "ftse100": levels[1], "stoxx600": levels[2],
              "gbpusd": fx[0], "eurusd": fx[1]}
    for name, values in series.items():
        with open(OUT / f"{name}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["date", "close"])
            for d, v in zip(dates, values):
                w.writerow([d.isoformat(), f"{v:.6f}"])


if __name__ == "__main__":
    main()
