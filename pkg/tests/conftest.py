import csv
from datetime import date, timedelta

import numpy as np
import pytest


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def business_dates(n, start=date(2015, 1, 1)):
    days = []
    d = start
    while len(days) < n:
        if d.weekday() < 5:
            days.append(d)
        d += timedelta(days=1)
    return days


def weekly_dates(n, start=date(2015, 1, 5)):
    return [start + timedelta(weeks=i) for i in range(n)]


@pytest.fixture
def index_csv(tmp_path):
    """A 400-row synthetic index file with positive prices and volumes."""
    rng = np.random.default_rng(42)
    n = 400
    closes = 100.0 * np.exp(np.cumsum(rng.normal(0, 0.01, n)))
    volumes = rng.uniform(1e5, 2e5, n)
    rows = [
        (d.isoformat(), repr(float(c)), repr(float(v)))
        for d, c, v in zip(business_dates(n), closes, volumes)
    ]
    return write_csv(tmp_path / "index.csv", ["date", "close", "volume"], rows)


@pytest.fixture
def panel_files(tmp_path):
    """A 4-ticker, 60-day returns panel with 2 sectors."""
    rng = np.random.default_rng(7)
    tickers = ["AAA", "BBB", "CCC", "DDD"]
    sectors = {"AAA": "1", "BBB": "1", "CCC": "2", "DDD": "2"}
    n = 60
    matrix = rng.normal(0, 0.02, (n, len(tickers)))
    rows = [
        [d.isoformat()] + [repr(float(v)) for v in matrix[i]]
        for i, d in enumerate(business_dates(n))
    ]
    panel = write_csv(tmp_path / "panel.csv", ["date"] + tickers, rows)
    sector_rows = [(t, sectors[t]) for t in tickers]
    sectors_path = write_csv(
        tmp_path / "sectors.csv", ["ticker", "sector_id"], sector_rows
    )
    return panel, sectors_path, matrix, tickers, sectors
