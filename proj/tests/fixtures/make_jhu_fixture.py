#!/usr/bin/env python3
"""Generate a synthetic JHU-format confirmed-cases file.

The United Kingdom series follows a renewal process whose incidence tracks a
piecewise log-linear curve with UK-like waves (about 4e4-2e5 daily cases
around the 2021/22 winter), plus reporting artifacts: weekday effects, a
Christmas reporting gap followed by a batch, and one downward revision of
the cumulative total. A handful of other countries exercise the parser
(quoted names, multi-province sums).

Usage: make_jhu_fixture.py [out.csv]
"""

import csv
import datetime as dt
import sys

import numpy as np
from scipy import stats

START = dt.date(2020, 1, 22)
END = dt.date(2023, 3, 9)

UK_ANCHORS = [
    ("2020-01-22", 2), ("2020-03-01", 30), ("2020-04-10", 5000), ("2020-06-15", 1000),
    ("2020-08-15", 1100), ("2020-10-20", 20000), ("2020-11-25", 15000), ("2021-01-05", 60000),
    ("2021-03-15", 5000), ("2021-05-15", 2500), ("2021-07-17", 48000), ("2021-08-05", 26000),
    ("2021-10-20", 45000), ("2021-11-20", 39000), ("2021-12-02", 46000), ("2021-12-29", 185000),
    ("2022-01-08", 150000), ("2022-01-25", 90000), ("2022-03-20", 95000), ("2022-06-01", 10000),
    ("2022-07-10", 25000), ("2023-03-09", 3000),
]

# Mon..Sun reporting multipliers.
WEEKDAY = np.array([0.86, 1.12, 1.05, 1.02, 1.02, 1.0, 0.86])


def serial_interval(mean=6.6, sd=3.5, tau=26):
    shape, scale = (mean / sd) ** 2, sd ** 2 / mean
    cdf = stats.gamma.cdf(np.arange(tau + 1), shape, scale=scale)
    w = np.diff(cdf)
    return w / w.sum()


def dates():
    n = (END - START).days + 1
    return [START + dt.timedelta(days=k) for k in range(n)]


def target_curve(days, anchors):
    x = np.array([(dt.date.fromisoformat(d) - START).days for d, _ in anchors], float)
    y = np.log([v for _, v in anchors])
    t = np.array([(d - START).days for d in days], float)
    return np.exp(np.interp(t, x, y))


def renewal(target, rng, phi):
    """Poisson renewal process whose mean follows `target`."""
    tau = len(phi)
    x = np.zeros(len(target))
    for t in range(len(target)):
        past = sum(phi[u - 1] * x[t - u] for u in range(1, tau + 1) if t - u >= 0)
        if t < tau or past <= 0:
            mean = target[t]
        else:
            # R_t chosen so that the expected incidence follows the target.
            mean = target[t] / max(sum(phi[u - 1] * target[t - u] for u in range(1, tau + 1)), 1e-9) * past
        x[t] = rng.poisson(mean)
    return x


def reported(days, true, rng, christmas=True, revision=None):
    obs = true * WEEKDAY[[d.weekday() for d in days]]
    obs = obs * rng.lognormal(0.0, 0.03, len(obs))
    obs = np.round(obs)
    idx = {d: k for k, d in enumerate(days)}
    if christmas:
        backlog = 0.0
        for year in (2020, 2021, 2022):
            for d, keep in ((dt.date(year, 12, 25), 0.25), (dt.date(year, 12, 26), 0.35)):
                if d in idx:
                    k = idx[d]
                    backlog += obs[k] * (1 - keep)
                    obs[k] = np.round(obs[k] * keep)
            k = idx.get(dt.date(year, 12, 27))
            if k is not None:
                obs[k] += np.round(backlog)
            backlog = 0.0
    cum = np.cumsum(obs).astype(np.int64)
    if revision is not None:
        d, amount = revision
        cum[idx[d]:] -= amount
    return cum


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "jhu_confirmed_synthetic.csv"
    rng = np.random.default_rng(20211206)
    phi = serial_interval()
    days = dates()

    uk_true = renewal(target_curve(days, UK_ANCHORS), rng, phi)
    uk_cum = reported(days, uk_true, rng, revision=(dt.date(2020, 7, 2), 30000))
    territories = {"Bermuda": 0.0011, "Gibraltar": 0.0008, "Isle of Man": 0.0006}
    parts = {name: np.floor(uk_cum * share).astype(np.int64) for name, share in territories.items()}
    mainland = uk_cum - sum(parts.values())

    rows = [("", "United Kingdom", 55.3781, -3.436, mainland)]
    rows += [(name, "United Kingdom", 0.0, 0.0, parts[name]) for name in territories]

    def simple(scale, seed):
        r = np.random.default_rng(seed)
        anchors = [(d, max(1, int(v * scale))) for d, v in UK_ANCHORS]
        return reported(days, renewal(target_curve(days, anchors), r, phi), r, christmas=False)

    rows.append(("", "Korea, South", 35.9078, 127.7669, simple(0.4, 1)))
    rows.append(("", "Germany", 51.1657, 10.4515, simple(1.1, 2)))
    rows.append(("Reunion", "France", -21.1151, 55.5364, simple(0.01, 3)))
    rows.append(("", "France", 46.2276, 2.2137, simple(1.2, 4)))
    rows.append(("", "Italy", 41.8719, 12.5674, simple(0.8, 5)))

    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["Province/State", "Country/Region", "Lat", "Long"] +
                   [f"{d.month}/{d.day}/{d.year % 100}" for d in days])
        for prov, country, lat, lon, cum in rows:
            w.writerow([prov, country, lat, lon] + [int(v) for v in cum])


if __name__ == "__main__":
    main()
