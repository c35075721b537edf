"""Regenerates the synthetic minute-bar fixtures under data/fixtures."""

import datetime as dt
import math
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "data" / "fixtures"


def session_minutes():
    for start, end in ((9 * 60 + 30, 11 * 60 + 30), (13 * 60, 15 * 60)):
        for m in range(start + 1, end + 1):
            yield m


def stamp(day, minute):
    return f"{day.isoformat()}T{minute // 60:02d}:{minute % 60:02d}:00"


def weekdays(start, n):
    day = start
    while n:
        if day.weekday() < 5:
            yield day
            n -= 1
        day += dt.timedelta(days=1)


def day240():
    # One clean day: a slow oscillation, no zero prices and no outliers.
    rows = ["timestamp,close"]
    day = dt.date(2021, 1, 4)
    for k, m in enumerate(session_minutes()):
        rows.append(f"{stamp(day, m)},{5000 + 5 * math.sin(k / 15):.4f}")
    (OUT / "day240.csv").write_text("\n".join(rows) + "\n")


def pipeline_bars():
    # 25 trading days of a random walk with clusters of -0.12% drops, plus one lunch-break row and one
    # zero price so the ingest counters are exercised.
    rng = np.random.default_rng(20210630)
    rows = ["timestamp,close"]
    price = 5000.0
    for d, day in enumerate(weekdays(dt.date(2021, 1, 4), 25)):
        pending = 0
        for m in session_minutes():
            if pending == 0 and rng.random() < 0.012:
                pending = int(rng.integers(2, 4))
            if pending and rng.random() < 0.6:
                step = -0.0012
                pending -= 1
            else:
                step = rng.normal(0.0, 0.0003)
            price *= math.exp(step)
            rows.append(f"{stamp(day, m)},{price:.4f}")
            if d == 3 and m == 11 * 60 + 30:
                rows.append(f"{stamp(day, 12 * 60)},{price:.4f}")
            if d == 7 and m == 14 * 60:
                rows[-1] = f"{stamp(day, m)},0"
    (OUT / "bars_25d.csv").write_text("\n".join(rows) + "\n")


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    day240()
    pipeline_bars()
