"""Datasets shipped with the package.

``EIGHT_DAY`` is the eight-day worked example (two factors and a stock, daily
returns in percent). ``FOUR_POINT`` is the small sample on which the greedy
self-tree isolates 4 at depth 1 and cannot reach zero residual at depth 2.
The synthetic panel mimics the schema and rough moments of five years of
daily Fama-French factor and single-stock returns; it exercises the
pipeline but does not reproduce any published figure.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .dataset import Dataset, write_csv

EIGHT_DAY = {
    "t": [1, 2, 3, 4, 5, 6, 7, 8],
    "f1": [2.0, 1.8, 5.0, 7.0, 6.0, 4.8, 2.2, 1.0],
    "f2": [2.0, 6.2, 1.8, 4.0, 6.0, 5.8, 5.0, 1.0],
    "y": [1.5, -1.0, 4.0, 2.0, 1.0, -0.5, -2.0, 0.0],
}

FOUR_POINT = (0.0, -2.0, 4.0, 1.0)

PANEL_COLUMNS = ("MEx", "SMB", "HML", "IBM")
PANEL_ROWS = 1259
PANEL_SEED = 20150501
PANEL_FILE = "synthetic_panel.csv"


def eight_day() -> Dataset:
    return Dataset.from_columns(EIGHT_DAY)


def synthetic_panel(n: int = PANEL_ROWS, seed: int = PANEL_SEED) -> tuple[list[str], Dataset]:
    """Fat-tailed correlated daily returns in percent, rounded to 2 decimals.

    Returns business-day date strings alongside the numeric columns.
    """
    rng = np.random.default_rng(seed)
    corr = np.array([
        [1.00, 0.15, 0.14, 0.73],
        [0.15, 1.00, 0.22, 0.05],
        [0.14, 0.22, 1.00, 0.15],
        [0.73, 0.05, 0.15, 1.00],
    ])
    scale = np.array([1.20, 0.59, 0.67, 1.56])
    loc = np.array([0.037, -0.018, -0.035, 0.005])
    df = 4.0
    z = rng.standard_normal((n, 4)) @ np.linalg.cholesky(corr).T
    # common chi-square mixing keeps the correlation and fattens the tails
    w = np.sqrt(rng.chisquare(df, size=(n, 1)) / (df - 2))
    returns = np.round(loc + scale * z / w, 2)
    days = np.busday_offset("2015-05-01", np.arange(n), roll="forward")
    ds = Dataset.from_columns({c: returns[:, j] for j, c in enumerate(PANEL_COLUMNS)})
    return [str(d) for d in days], ds


def write_panel_csv(path, n: int = PANEL_ROWS, seed: int = PANEL_SEED) -> None:
    dates, ds = synthetic_panel(n, seed)
    with open(path, "w", newline="") as fh:
        fh.write("date," + ",".join(ds.names) + "\n")
        for i, d in enumerate(dates):
            fh.write(d + "," + ",".join("%.2f" % c[i] for c in ds.columns) + "\n")


def synthetic_panel_path():
    """Path of the bundled panel CSV (date index column plus MEx, SMB, HML, IBM)."""
    return resources.files("leptovar") / "resources" / PANEL_FILE


def write_example_csv(path) -> None:
    write_csv(eight_day(), path)
